#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "akdyn/model.hpp"

namespace akdyn {

/// Index of a grid cell; i runs along x, j along y.
struct CellId {
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  /// Row-major sort key (row j first); defines the canonical cell order.
  std::uint64_t key() const { return (std::uint64_t{j} << 32) | i; }
  static CellId from_key(std::uint64_t k) {
    return {static_cast<std::uint32_t>(k & 0xffffffffu), static_cast<std::uint32_t>(k >> 32)};
  }

  friend bool operator==(const CellId&, const CellId&) = default;
  friend auto operator<=>(const CellId& a, const CellId& b) { return a.key() <=> b.key(); }
};

/// Inclusive rectangular range of cells [i0,i1] x [j0,j1].
struct CellBlock {
  std::uint32_t i0 = 1;
  std::uint32_t i1 = 0;
  std::uint32_t j0 = 1;
  std::uint32_t j1 = 0;

  bool empty() const { return i0 > i1 || j0 > j1; }
  std::uint64_t size() const {
    return empty() ? 0 : std::uint64_t{i1 - i0 + 1} * (j1 - j0 + 1);
  }
  bool contains(CellId c) const { return c.i >= i0 && c.i <= i1 && c.j >= j0 && c.j <= j1; }
  friend bool operator==(const CellBlock&, const CellBlock&) = default;
};

/// Finite union of closed cells at one depth: a sorted, duplicate-free list.
class CubicalSet {
 public:
  CubicalSet() = default;
  explicit CubicalSet(int depth) : depth_(depth) {}
  /// Sorts and deduplicates.
  CubicalSet(int depth, std::vector<CellId> cells);

  int depth() const { return depth_; }
  const std::vector<CellId>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  bool contains(CellId c) const;
  auto begin() const { return cells_.begin(); }
  auto end() const { return cells_.end(); }

  CubicalSet unite(const CubicalSet& other) const;
  CubicalSet intersect(const CubicalSet& other) const;
  CubicalSet subtract(const CubicalSet& other) const;
  bool is_subset_of(const CubicalSet& other) const;
  bool intersects(const CubicalSet& other) const;
  /// Image under the coordinate swap (i,j) -> (j,i).
  CubicalSet transposed() const;

  friend bool operator==(const CubicalSet&, const CubicalSet&) = default;

 private:
  int depth_ = 0;
  std::vector<CellId> cells_;
};

/// Uniform grid of 2^depth x 2^depth cells over the rectangle `bounds`.
///
/// Cell edges are computed from integer indices with outward rounding, so
/// neighbouring cells share (or overlap in) their edges and the cells cover
/// `bounds` without gaps. Edges of a child cell coincide with the matching
/// edges of its parent.
class Grid {
 public:
  Grid(const IRect& bounds, int depth);

  const IRect& bounds() const { return bounds_; }
  int depth() const { return depth_; }
  std::uint32_t side() const { return side_; }
  std::uint64_t cell_count() const { return std::uint64_t{side_} * side_; }
  bool valid(CellId c) const { return c.i < side_ && c.j < side_; }

  /// Closed rectangle of the cell. Throws std::out_of_range for bad ids.
  IRect cell_rect(CellId c) const;

  /// Block of all cells whose closed rectangle meets r; `escapes` is set
  /// iff r is not contained in bounds().
  CellBlock block_covering(const IRect& r, bool& escapes) const;

  Grid refined() const { return Grid(bounds_, depth_ + 1); }
  CubicalSet all_cells() const;

 private:
  std::uint32_t lower_index(const std::vector<double>& hi_edge, double v) const;
  std::uint32_t upper_index(const std::vector<double>& lo_edge, double v) const;

  IRect bounds_;
  int depth_;
  std::uint32_t side_;
  // lo_x_[k] / hi_x_[k]: lower / upper rounding of the k-th vertical grid line.
  std::vector<double> lo_x_, hi_x_, lo_y_, hi_y_;
};

struct Covering {
  CubicalSet cells;
  bool escapes = false;
};

Covering cells_covering(const Grid& g, const IRect& r);

CubicalSet block_cells(int depth, const CellBlock& b);

struct Neighborhood {
  CubicalSet cells;
  bool clipped = false;  ///< some neighbour fell outside the grid
};

/// s together with every cell sharing at least a vertex with a cell of s.
Neighborhood vertex_neighborhood(const Grid& g, const CubicalSet& s);

/// Partition of s into classes of vertex-adjacent (8-connected) cells,
/// ordered by their smallest cell.
std::vector<CubicalSet> components(const CubicalSet& s);

/// Every cell replaced by its four children at depth + 1.
CubicalSet refine(const CubicalSet& s);

/// Parent cells at depth - levels.
CubicalSet coarsen(const CubicalSet& s, int levels);

}  // namespace akdyn
