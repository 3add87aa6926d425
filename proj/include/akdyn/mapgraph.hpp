#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "akdyn/grid.hpp"

namespace akdyn {

/// Directed graph over vertices 0..n-1 in compressed sparse row form.
class Digraph {
 public:
  Digraph() : offsets_{0} {}
  Digraph(std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> targets);
  static Digraph from_edges(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

  std::size_t size() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size(); }
  std::span<const std::uint32_t> successors(std::uint32_t v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  bool has_edge(std::uint32_t a, std::uint32_t b) const;

  Digraph reversed() const;
  /// Subgraph on the vertices with keep[v] != 0, renumbered in increasing
  /// order; `original[k]` receives the old index of new vertex k.
  Digraph induced(const std::vector<std::uint8_t>& keep, std::vector<std::uint32_t>& original) const;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> targets_;
};

/// Labelling of all strongly connected components, numbered in the order
/// Tarjan's algorithm completes them (a reverse topological order).
struct ComponentLabels {
  std::vector<std::uint32_t> component;  ///< per vertex
  std::vector<std::uint8_t> recurrent;   ///< per component: >= 2 vertices or a self-loop
  std::uint32_t count = 0;
};

/// Iterative Tarjan; safe on graphs with millions of vertices.
ComponentLabels tarjan(const Digraph& g);

/// Nontrivial strongly connected components, each sorted, ordered by their
/// smallest vertex.
std::vector<std::vector<std::uint32_t>> strong_components(const Digraph& g);

/// Pairs (p, q), p != q, of a strict relation over indices 0..n-1, kept sorted.
using Relation = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

/// (p, q) iff a path of length >= 1 leads from a vertex of sets[p] to a
/// vertex of sets[q]. The sets must be disjoint.
Relation reach_relation(const Digraph& g, const std::vector<std::vector<std::uint32_t>>& sets);

Relation transitive_closure(std::size_t n, const Relation& r);
/// Minimal relation with the same transitive closure; `r` must be acyclic.
Relation transitive_reduction(std::size_t n, const Relation& r);
bool is_acyclic(std::size_t n, const Relation& r);

/// Vertices with a bi-infinite path inside the graph: those that are
/// reachable from a cycle and can reach a cycle.
std::vector<std::uint8_t> invariant_vertices(const Digraph& g);

/// Raised when interval evaluation of one cell's image fails.
class MapBuildError : public std::runtime_error {
 public:
  MapBuildError(CellId cell, const std::string& what);
  CellId cell;
};

struct BuildOptions {
  unsigned threads = 1;
  /// Maximal number of stored edges; 0 disables the check.
  std::uint64_t edge_budget = 0;
};

/// Raised when a graph would exceed BuildOptions::edge_budget.
class EdgeBudgetExceeded : public std::runtime_error {
 public:
  EdgeBudgetExceeded(int depth, std::uint64_t edges, std::uint64_t budget);
  int depth;
};

/// Cell-to-block map on a grid: the multivalued map F whose value on a cell
/// covers the image of that cell.
class CellMap {
 public:
  virtual ~CellMap() = default;
  virtual const Grid& grid() const = 0;
  /// Block of cells covering the image of c; `escapes` is set when the
  /// image may leave the grid bounds.
  virtual CellBlock image(CellId c, bool& escapes) const = 0;
};

/// Rigorous enclosure of the map over a parameter box.
class IntervalMap final : public CellMap {
 public:
  IntervalMap(Grid grid, ParamBox P) : grid_(std::move(grid)), params_(std::move(P)) {}
  const Grid& grid() const override { return grid_; }
  const ParamBox& params() const { return params_; }
  CellBlock image(CellId c, bool& escapes) const override;

 private:
  Grid grid_;
  ParamBox params_;
};

/// Explicitly tabulated map; cells without an entry have an empty image.
class TableMap final : public CellMap {
 public:
  explicit TableMap(Grid grid) : grid_(std::move(grid)) {}
  void set(CellId c, const CellBlock& image, bool escapes = false);
  const Grid& grid() const override { return grid_; }
  CellBlock image(CellId c, bool& escapes) const override;

 private:
  Grid grid_;
  std::vector<std::pair<CellId, std::pair<CellBlock, bool>>> table_;
};

/// Union of the images of the cells of s.
Covering image_of(const CellMap& f, const CubicalSet& s);

/// Combinatorial outer enclosure of the map over a domain of grid cells.
///
/// For every domain cell Q, every parameter in the box and every q in Q, the
/// image f(q) lies in the union of image(Q) or, when escapes(Q) is set, may
/// leave the grid bounds. The graph keeps only the edges whose target lies
/// in the domain; images leaving the domain truncate orbits.
class MapGraph {
 public:
  static MapGraph build(const CellMap& f, const CubicalSet& domain, const BuildOptions& options = {});
  static MapGraph build(const Grid& grid, const ParamBox& P, const CubicalSet& domain,
                        const BuildOptions& options = {});

  const Grid& grid() const { return grid_; }
  const CubicalSet& domain() const { return domain_; }
  const Digraph& graph() const { return graph_; }
  std::size_t size() const { return domain_.size(); }

  CellId cell(std::uint32_t v) const { return domain_.cells()[v]; }
  CellBlock image(std::uint32_t v) const { return images_[v]; }
  bool escapes(std::uint32_t v) const { return escapes_[v] != 0; }
  std::optional<std::uint32_t> local_index(CellId c) const;

  /// Local indices of the cells of s (which must lie in the domain).
  std::vector<std::uint32_t> local_indices(const CubicalSet& s) const;
  CubicalSet cells_of(const std::vector<std::uint32_t>& vertices) const;

 private:
  MapGraph(Grid grid, CubicalSet domain) : grid_(std::move(grid)), domain_(std::move(domain)) {}

  Grid grid_;
  CubicalSet domain_;
  Digraph graph_;
  std::vector<CellBlock> images_;
  std::vector<std::uint8_t> escapes_;
};

/// Image block of a single cell; the shared primitive of every graph build.
CellBlock cell_image(const Grid& grid, const ParamBox& P, CellId c, bool& escapes);

std::vector<CubicalSet> scc(const MapGraph& m);
Relation reach_partial_order(const MapGraph& m, const std::vector<CubicalSet>& sets);
/// Cells of s lying on a bi-infinite path of the graph restricted to s.
CubicalSet invariant_part_cover(const MapGraph& m, const CubicalSet& s);

}  // namespace akdyn
