#include "akdyn/mapgraph.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <thread>

namespace akdyn {

Digraph::Digraph(std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> targets)
    : offsets_(std::move(offsets)), targets_(std::move(targets)) {
  if (offsets_.empty() || offsets_.back() != targets_.size()) {
    throw std::invalid_argument("Digraph: inconsistent offsets");
  }
}

Digraph Digraph::from_edges(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<std::uint32_t> offsets(n + 1, 0);
  std::vector<std::uint32_t> targets;
  targets.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) throw std::out_of_range("Digraph: edge endpoint out of range");
    ++offsets[a + 1];
    targets.push_back(b);
  }
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
  return Digraph(std::move(offsets), std::move(targets));
}

bool Digraph::has_edge(std::uint32_t a, std::uint32_t b) const {
  const auto s = successors(a);
  return std::find(s.begin(), s.end(), b) != s.end();
}

Digraph Digraph::reversed() const {
  const std::size_t n = size();
  std::vector<std::uint32_t> offsets(n + 1, 0);
  for (const std::uint32_t t : targets_) ++offsets[t + 1];
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
  std::vector<std::uint32_t> targets(targets_.size());
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::uint32_t v = 0; v < n; ++v)
    for (const std::uint32_t t : successors(v)) targets[fill[t]++] = v;
  return Digraph(std::move(offsets), std::move(targets));
}

Digraph Digraph::induced(const std::vector<std::uint8_t>& keep, std::vector<std::uint32_t>& original) const {
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> renumber(size(), kNone);
  original.clear();
  for (std::uint32_t v = 0; v < size(); ++v) {
    if (keep[v]) {
      renumber[v] = static_cast<std::uint32_t>(original.size());
      original.push_back(v);
    }
  }
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> targets;
  for (const std::uint32_t v : original) {
    for (const std::uint32_t t : successors(v))
      if (renumber[t] != kNone) targets.push_back(renumber[t]);
    offsets.push_back(static_cast<std::uint32_t>(targets.size()));
  }
  return Digraph(std::move(offsets), std::move(targets));
}

ComponentLabels tarjan(const Digraph& g) {
  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = g.size();
  ComponentLabels out;
  out.component.assign(n, kUnvisited);
  std::vector<std::uint32_t> index(n, kUnvisited);
  std::vector<std::uint32_t> low(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t v;
    std::uint32_t next;  // position in the successor list
  };
  std::vector<Frame> calls;
  std::uint32_t counter = 0;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    calls.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!calls.empty()) {
      Frame& f = calls.back();
      const auto succ = g.successors(f.v);
      if (f.next < succ.size()) {
        const std::uint32_t w = succ[f.next++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          calls.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::uint32_t v = f.v;
      calls.pop_back();
      if (!calls.empty()) low[calls.back().v] = std::min(low[calls.back().v], low[v]);
      if (low[v] != index[v]) continue;
      const std::uint32_t c = out.count++;
      std::size_t members = 0;
      std::uint32_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        out.component[w] = c;
        ++members;
      } while (w != v);
      out.recurrent.push_back(members > 1 || g.has_edge(v, v) ? 1 : 0);
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> strong_components(const Digraph& g) {
  const ComponentLabels labels = tarjan(g);
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> slot(labels.count, kNone);
  std::vector<std::vector<std::uint32_t>> out;
  // Scanning vertices in increasing order yields sorted members and orders
  // the components by their smallest vertex.
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    const std::uint32_t c = labels.component[v];
    if (!labels.recurrent[c]) continue;
    if (slot[c] == kNone) {
      slot[c] = static_cast<std::uint32_t>(out.size());
      out.emplace_back();
    }
    out[slot[c]].push_back(v);
  }
  return out;
}

namespace {

class BitRows {
 public:
  BitRows(std::size_t rows, std::size_t bits) : words_((bits + 63) / 64), data_(rows * words_, 0) {}
  std::uint64_t* row(std::size_t r) { return data_.data() + r * words_; }
  const std::uint64_t* row(std::size_t r) const { return data_.data() + r * words_; }
  void set(std::size_t r, std::size_t b) { row(r)[b / 64] |= std::uint64_t{1} << (b % 64); }
  bool test(std::size_t r, std::size_t b) const { return (row(r)[b / 64] >> (b % 64)) & 1u; }
  void or_into(std::size_t dst, const std::uint64_t* src) {
    std::uint64_t* d = row(dst);
    for (std::size_t w = 0; w < words_; ++w) d[w] |= src[w];
  }
  std::size_t words() const { return words_; }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> data_;
};

}  // namespace

Relation reach_relation(const Digraph& g, const std::vector<std::vector<std::uint32_t>>& sets) {
  const std::size_t k = sets.size();
  if (k == 0) return {};
  const ComponentLabels labels = tarjan(g);
  BitRows mark(labels.count, k);
  for (std::size_t p = 0; p < k; ++p)
    for (const std::uint32_t v : sets[p]) mark.set(labels.component[v], p);

  // Components of each label, to visit them in completion order.
  std::vector<std::vector<std::uint32_t>> members(labels.count);
  for (std::uint32_t v = 0; v < g.size(); ++v) members[labels.component[v]].push_back(v);

  // reach[c]: sets hit by a path of length >= 1 starting in component c.
  BitRows reach(labels.count, k);
  for (std::uint32_t c = 0; c < labels.count; ++c) {
    if (labels.recurrent[c]) reach.or_into(c, mark.row(c));
    for (const std::uint32_t v : members[c]) {
      for (const std::uint32_t w : g.successors(v)) {
        const std::uint32_t d = labels.component[w];
        if (d == c) continue;
        reach.or_into(c, reach.row(d));
        reach.or_into(c, mark.row(d));
      }
    }
  }
  Relation out;
  for (std::size_t p = 0; p < k; ++p) {
    std::vector<std::uint8_t> hit(k, 0);
    for (const std::uint32_t v : sets[p]) {
      const std::uint32_t c = labels.component[v];
      for (std::size_t q = 0; q < k; ++q)
        if (reach.test(c, q)) hit[q] = 1;
    }
    for (std::size_t q = 0; q < k; ++q)
      if (hit[q] && q != p) out.emplace_back(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(q));
  }
  return out;
}

namespace {

BitRows closure_rows(std::size_t n, const Relation& r) {
  BitRows rows(n, n);
  for (const auto& [a, b] : r) {
    if (a >= n || b >= n) throw std::out_of_range("relation index out of range");
    rows.set(a, b);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<std::uint64_t> rk(rows.row(k), rows.row(k) + rows.words());
    for (std::size_t i = 0; i < n; ++i)
      if (rows.test(i, k)) rows.or_into(i, rk.data());
  }
  return rows;
}

}  // namespace

Relation transitive_closure(std::size_t n, const Relation& r) {
  const BitRows rows = closure_rows(n, r);
  Relation out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rows.test(i, j)) out.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  return out;
}

bool is_acyclic(std::size_t n, const Relation& r) {
  const BitRows rows = closure_rows(n, r);
  for (std::size_t i = 0; i < n; ++i)
    if (rows.test(i, i)) return false;
  return true;
}

Relation transitive_reduction(std::size_t n, const Relation& r) {
  const BitRows rows = closure_rows(n, r);
  Relation out;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows.test(i, i)) throw std::invalid_argument("transitive_reduction: relation has a cycle");
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !rows.test(i, j)) continue;
      bool implied = false;
      for (std::size_t m = 0; m < n && !implied; ++m)
        implied = m != i && m != j && rows.test(i, m) && rows.test(m, j);
      if (!implied) out.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
  }
  return out;
}

namespace {

std::vector<std::uint8_t> reachable_from(const Digraph& g, const std::vector<std::uint8_t>& seeds) {
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < g.size(); ++v)
    if (seeds[v]) {
      seen[v] = 1;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    const std::uint32_t v = queue.back();
    queue.pop_back();
    for (const std::uint32_t w : g.successors(v))
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
  }
  return seen;
}

}  // namespace

std::vector<std::uint8_t> invariant_vertices(const Digraph& g) {
  const ComponentLabels labels = tarjan(g);
  std::vector<std::uint8_t> on_cycle(g.size(), 0);
  for (std::uint32_t v = 0; v < g.size(); ++v) on_cycle[v] = labels.recurrent[labels.component[v]];
  const std::vector<std::uint8_t> forward = reachable_from(g, on_cycle);
  const std::vector<std::uint8_t> backward = reachable_from(g.reversed(), on_cycle);
  std::vector<std::uint8_t> out(g.size(), 0);
  for (std::size_t v = 0; v < g.size(); ++v) out[v] = forward[v] && backward[v];
  return out;
}

MapBuildError::MapBuildError(CellId c, const std::string& what)
    : std::runtime_error("cell (" + std::to_string(c.i) + "," + std::to_string(c.j) + "): " + what), cell(c) {}

EdgeBudgetExceeded::EdgeBudgetExceeded(int d, std::uint64_t edges, std::uint64_t budget)
    : std::runtime_error("edge budget exceeded at depth " + std::to_string(d) + ": " + std::to_string(edges) +
                         " edges > " + std::to_string(budget)),
      depth(d) {}

CellBlock cell_image(const Grid& grid, const ParamBox& P, CellId c, bool& escapes) {
  return grid.block_covering(eval_box(P, grid.cell_rect(c)), escapes);
}

CellBlock IntervalMap::image(CellId c, bool& escapes) const { return cell_image(grid_, params_, c, escapes); }

void TableMap::set(CellId c, const CellBlock& image, bool escapes) {
  const auto it = std::lower_bound(table_.begin(), table_.end(), c,
                                   [](const auto& entry, CellId k) { return entry.first < k; });
  if (it != table_.end() && it->first == c) {
    it->second = {image, escapes};
  } else {
    table_.insert(it, {c, {image, escapes}});
  }
}

CellBlock TableMap::image(CellId c, bool& escapes) const {
  const auto it = std::lower_bound(table_.begin(), table_.end(), c,
                                   [](const auto& entry, CellId k) { return entry.first < k; });
  if (it == table_.end() || it->first != c) {
    escapes = false;
    return {};
  }
  escapes = it->second.second;
  return it->second.first;
}

Covering image_of(const CellMap& f, const CubicalSet& s) {
  Covering out;
  std::vector<CellId> cells;
  for (const CellId c : s) {
    bool esc = false;
    const CellBlock b = f.image(c, esc);
    out.escapes = out.escapes || esc;
    if (b.empty()) continue;
    for (std::uint32_t j = b.j0; j <= b.j1; ++j)
      for (std::uint32_t i = b.i0; i <= b.i1; ++i) cells.push_back({i, j});
  }
  out.cells = CubicalSet(s.depth(), std::move(cells));
  return out;
}

std::optional<std::uint32_t> MapGraph::local_index(CellId c) const {
  const auto& cells = domain_.cells();
  const auto it = std::lower_bound(cells.begin(), cells.end(), c);
  if (it == cells.end() || *it != c) return std::nullopt;
  return static_cast<std::uint32_t>(it - cells.begin());
}

std::vector<std::uint32_t> MapGraph::local_indices(const CubicalSet& s) const {
  std::vector<std::uint32_t> out;
  out.reserve(s.size());
  for (const CellId c : s) {
    const auto v = local_index(c);
    if (!v) throw std::invalid_argument("cell outside the graph domain");
    out.push_back(*v);
  }
  return out;
}

CubicalSet MapGraph::cells_of(const std::vector<std::uint32_t>& vertices) const {
  std::vector<CellId> cells;
  cells.reserve(vertices.size());
  for (const std::uint32_t v : vertices) cells.push_back(cell(v));
  return CubicalSet(domain_.depth(), std::move(cells));
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 4096) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

// Visits the domain positions of the cells of block b, row by row.
template <class Fn>
void for_each_in_domain(const std::vector<CellId>& cells, bool full, std::uint32_t side, const CellBlock& b,
                        Fn&& fn) {
  if (b.empty()) return;
  for (std::uint32_t j = b.j0; j <= b.j1; ++j) {
    if (full) {
      for (std::uint32_t i = b.i0; i <= b.i1; ++i) fn(j * side + i);
      continue;
    }
    auto it = std::lower_bound(cells.begin(), cells.end(), CellId{b.i0, j});
    for (; it != cells.end() && it->j == j && it->i <= b.i1; ++it)
      fn(static_cast<std::uint32_t>(it - cells.begin()));
  }
}

}  // namespace

MapGraph MapGraph::build(const Grid& grid, const ParamBox& P, const CubicalSet& domain,
                         const BuildOptions& options) {
  return build(IntervalMap(grid, P), domain, options);
}

MapGraph MapGraph::build(const CellMap& f, const CubicalSet& domain, const BuildOptions& options) {
  const Grid& grid = f.grid();
  if (domain.depth() != grid.depth()) throw std::invalid_argument("domain depth differs from grid depth");
  MapGraph m(grid, domain);
  const auto& cells = m.domain_.cells();
  const std::size_t n = cells.size();
  for (const CellId c : cells)
    if (!grid.valid(c)) throw std::out_of_range("domain cell outside the grid");
  if (n > std::numeric_limits<std::uint32_t>::max() - 1) {
    throw EdgeBudgetExceeded(grid.depth(), n, std::numeric_limits<std::uint32_t>::max());
  }
  m.images_.resize(n);
  m.escapes_.assign(n, 0);

  // Images are independent per cell; failures are reported for the smallest
  // failing cell so the outcome does not depend on scheduling.
  std::vector<std::string> failure(n);
  std::atomic<bool> failed{false};
  parallel_for(n, options.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t v = lo; v < hi; ++v) {
      try {
        bool esc = false;
        m.images_[v] = f.image(cells[v], esc);
        m.escapes_[v] = esc ? 1 : 0;
      } catch (const std::exception& e) {
        failure[v] = e.what();
        failed = true;
      }
    }
  });
  if (failed) {
    for (std::size_t v = 0; v < n; ++v)
      if (!failure[v].empty()) throw MapBuildError(cells[v], failure[v]);
  }

  const bool full = n == grid.cell_count();
  const std::uint32_t side = grid.side();
  std::vector<std::uint32_t> offsets(n + 1, 0);
  parallel_for(n, options.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t v = lo; v < hi; ++v) {
      std::uint32_t count = 0;
      for_each_in_domain(cells, full, side, m.images_[v], [&](std::uint32_t) { ++count; });
      offsets[v + 1] = count;
    }
  });
  std::uint64_t total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    total += offsets[v + 1];
    if (options.edge_budget != 0 && total > options.edge_budget) {
      throw EdgeBudgetExceeded(grid.depth(), total, options.edge_budget);
    }
    if (total > std::numeric_limits<std::uint32_t>::max()) {
      throw EdgeBudgetExceeded(grid.depth(), total, std::numeric_limits<std::uint32_t>::max());
    }
    offsets[v + 1] = static_cast<std::uint32_t>(total);
  }
  std::vector<std::uint32_t> targets(total);
  parallel_for(n, options.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t v = lo; v < hi; ++v) {
      std::uint32_t pos = offsets[v];
      for_each_in_domain(cells, full, side, m.images_[v], [&](std::uint32_t w) { targets[pos++] = w; });
    }
  });
  m.graph_ = Digraph(std::move(offsets), std::move(targets));
  return m;
}

std::vector<CubicalSet> scc(const MapGraph& m) {
  std::vector<CubicalSet> out;
  for (const auto& comp : strong_components(m.graph())) out.push_back(m.cells_of(comp));
  return out;
}

Relation reach_partial_order(const MapGraph& m, const std::vector<CubicalSet>& sets) {
  std::vector<std::vector<std::uint32_t>> local;
  local.reserve(sets.size());
  for (const auto& s : sets) local.push_back(m.local_indices(s));
  return reach_relation(m.graph(), local);
}

CubicalSet invariant_part_cover(const MapGraph& m, const CubicalSet& s) {
  std::vector<std::uint8_t> keep(m.size(), 0);
  for (const std::uint32_t v : m.local_indices(s)) keep[v] = 1;
  std::vector<std::uint32_t> original;
  const Digraph sub = m.graph().induced(keep, original);
  const std::vector<std::uint8_t> inv = invariant_vertices(sub);
  std::vector<std::uint32_t> vertices;
  for (std::uint32_t k = 0; k < sub.size(); ++k)
    if (inv[k]) vertices.push_back(original[k]);
  return m.cells_of(vertices);
}

}  // namespace akdyn
