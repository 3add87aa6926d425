#include "akdyn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace akdyn {

CubicalSet::CubicalSet(int depth, std::vector<CellId> cells) : depth_(depth), cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

bool CubicalSet::contains(CellId c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }

CubicalSet CubicalSet::unite(const CubicalSet& other) const {
  CubicalSet out(depth_);
  out.cells_.reserve(cells_.size() + other.cells_.size());
  std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                 std::back_inserter(out.cells_));
  return out;
}

CubicalSet CubicalSet::intersect(const CubicalSet& other) const {
  CubicalSet out(depth_);
  std::set_intersection(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::back_inserter(out.cells_));
  return out;
}

CubicalSet CubicalSet::subtract(const CubicalSet& other) const {
  CubicalSet out(depth_);
  std::set_difference(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                      std::back_inserter(out.cells_));
  return out;
}

bool CubicalSet::is_subset_of(const CubicalSet& other) const {
  return std::includes(other.cells_.begin(), other.cells_.end(), cells_.begin(), cells_.end());
}

bool CubicalSet::intersects(const CubicalSet& other) const {
  auto a = cells_.begin();
  auto b = other.cells_.begin();
  while (a != cells_.end() && b != other.cells_.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

CubicalSet CubicalSet::transposed() const {
  std::vector<CellId> t;
  t.reserve(cells_.size());
  for (const CellId c : cells_) t.push_back({c.j, c.i});
  return CubicalSet(depth_, std::move(t));
}

Grid::Grid(const IRect& bounds, int depth) : bounds_(bounds), depth_(depth) {
  if (depth < 0 || depth > 30) throw std::invalid_argument("grid depth must lie in [0,30]");
  if (!(bounds.x.hi() > bounds.x.lo()) || !(bounds.y.hi() > bounds.y.lo())) {
    throw std::invalid_argument("grid bounds must have positive side lengths");
  }
  side_ = std::uint32_t{1} << depth;
  auto make_lines = [&](const Interval& side, std::vector<double>& lo, std::vector<double>& hi) {
    const Interval width = Interval(side.hi()) - Interval(side.lo());
    lo.resize(side_ + 1);
    hi.resize(side_ + 1);
    for (std::uint32_t k = 0; k <= side_; ++k) {
      const Interval scaled = Interval(static_cast<double>(k)) * width;
      const Interval offset(std::ldexp(scaled.lo(), -depth), std::ldexp(scaled.hi(), -depth));
      const Interval line = Interval(side.lo()) + offset;
      lo[k] = line.lo();
      hi[k] = line.hi();
    }
    lo[0] = hi[0] = side.lo();
    lo[side_] = std::min(lo[side_], side.hi());
    hi[side_] = std::max(hi[side_], side.hi());
  };
  make_lines(bounds.x, lo_x_, hi_x_);
  make_lines(bounds.y, lo_y_, hi_y_);
}

IRect Grid::cell_rect(CellId c) const {
  if (!valid(c)) throw std::out_of_range("cell id out of range");
  return {Interval(lo_x_[c.i], hi_x_[c.i + 1]), Interval(lo_y_[c.j], hi_y_[c.j + 1])};
}

// Smallest cell index whose upper edge is >= v, or side_ if none.
std::uint32_t Grid::lower_index(const std::vector<double>& hi_edge, double v) const {
  const auto it = std::lower_bound(hi_edge.begin() + 1, hi_edge.end(), v);
  return static_cast<std::uint32_t>(it - hi_edge.begin()) - 1;
}

// One past the largest cell index whose lower edge is <= v (0 if none).
std::uint32_t Grid::upper_index(const std::vector<double>& lo_edge, double v) const {
  const auto it = std::upper_bound(lo_edge.begin(), lo_edge.begin() + side_, v);
  return static_cast<std::uint32_t>(it - lo_edge.begin());
}

CellBlock Grid::block_covering(const IRect& r, bool& escapes) const {
  escapes = r.x.lo() < bounds_.x.lo() || r.x.hi() > bounds_.x.hi() || r.y.lo() < bounds_.y.lo() ||
            r.y.hi() > bounds_.y.hi();
  const std::uint32_t i0 = lower_index(hi_x_, r.x.lo());
  const std::uint32_t i_end = upper_index(lo_x_, r.x.hi());
  const std::uint32_t j0 = lower_index(hi_y_, r.y.lo());
  const std::uint32_t j_end = upper_index(lo_y_, r.y.hi());
  if (i0 >= i_end || j0 >= j_end) return CellBlock{};
  return {i0, i_end - 1, j0, j_end - 1};
}

CubicalSet Grid::all_cells() const {
  std::vector<CellId> cells;
  cells.reserve(cell_count());
  for (std::uint32_t j = 0; j < side_; ++j)
    for (std::uint32_t i = 0; i < side_; ++i) cells.push_back({i, j});
  return CubicalSet(depth_, std::move(cells));
}

CubicalSet block_cells(int depth, const CellBlock& b) {
  std::vector<CellId> cells;
  if (!b.empty()) {
    cells.reserve(b.size());
    for (std::uint32_t j = b.j0; j <= b.j1; ++j)
      for (std::uint32_t i = b.i0; i <= b.i1; ++i) cells.push_back({i, j});
  }
  return CubicalSet(depth, std::move(cells));
}

Covering cells_covering(const Grid& g, const IRect& r) {
  Covering out;
  const CellBlock b = g.block_covering(r, out.escapes);
  out.cells = block_cells(g.depth(), b);
  return out;
}

Neighborhood vertex_neighborhood(const Grid& g, const CubicalSet& s) {
  Neighborhood out;
  std::vector<CellId> cells;
  cells.reserve(s.size() * 3);
  const auto side = static_cast<std::int64_t>(g.side());
  for (const CellId c : s) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const std::int64_t i = std::int64_t{c.i} + di;
        const std::int64_t j = std::int64_t{c.j} + dj;
        if (i < 0 || j < 0 || i >= side || j >= side) {
          out.clipped = true;
          continue;
        }
        cells.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
  }
  out.cells = CubicalSet(s.depth(), std::move(cells));
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

}  // namespace

std::vector<CubicalSet> components(const CubicalSet& s) {
  const auto& cells = s.cells();
  UnionFind uf(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const CellId c = cells[k];
    // Forward neighbours in row-major order suffice for an undirected relation.
    const std::int64_t nbrs[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
    for (const auto& d : nbrs) {
      const std::int64_t i = std::int64_t{c.i} + d[0];
      const std::int64_t j = std::int64_t{c.j} + d[1];
      if (i < 0 || j < 0 || i > 0xffffffffLL || j > 0xffffffffLL) continue;
      const CellId n{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
      const auto it = std::lower_bound(cells.begin(), cells.end(), n);
      if (it != cells.end() && *it == n) uf.join(k, static_cast<std::size_t>(it - cells.begin()));
    }
  }
  // Roots are the smallest index of each class, so classes come out ordered
  // by their smallest cell.
  std::vector<std::size_t> slot(cells.size(), SIZE_MAX);
  std::vector<std::vector<CellId>> parts;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::size_t r = uf.find(k);
    if (slot[r] == SIZE_MAX) {
      slot[r] = parts.size();
      parts.emplace_back();
    }
    parts[slot[r]].push_back(cells[k]);
  }
  std::vector<CubicalSet> out;
  out.reserve(parts.size());
  for (auto& p : parts) out.emplace_back(s.depth(), std::move(p));
  return out;
}

CubicalSet refine(const CubicalSet& s) {
  std::vector<CellId> cells;
  cells.reserve(s.size() * 4);
  for (const CellId c : s) {
    cells.push_back({2 * c.i, 2 * c.j});
    cells.push_back({2 * c.i + 1, 2 * c.j});
    cells.push_back({2 * c.i, 2 * c.j + 1});
    cells.push_back({2 * c.i + 1, 2 * c.j + 1});
  }
  return CubicalSet(s.depth() + 1, std::move(cells));
}

CubicalSet coarsen(const CubicalSet& s, int levels) {
  std::vector<CellId> cells;
  cells.reserve(s.size());
  for (const CellId c : s) cells.push_back({c.i >> levels, c.j >> levels});
  return CubicalSet(s.depth() - levels, std::move(cells));
}

}  // namespace akdyn
