#include "akdyn/morse.hpp"

#include <algorithm>
#include <tuple>

namespace akdyn {

std::string to_string(Isolation s) {
  switch (s) {
    case Isolation::verified: return "verified";
    case Isolation::boundary_touching: return "boundary-touching";
    case Isolation::failed: return "failed";
  }
  return "failed";
}

Isolation isolation_from_string(const std::string& s) {
  for (const auto v : {Isolation::verified, Isolation::boundary_touching, Isolation::failed})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown isolation status '" + s + "'");
}

namespace {

// Index of the set containing each cell, for ancestor lookups.
struct SetLookup {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> entries;

  explicit SetLookup(const std::vector<CubicalSet>& sets) {
    for (std::uint32_t s = 0; s < sets.size(); ++s)
      for (const CellId c : sets[s]) entries.emplace_back(c.key(), s);
    std::sort(entries.begin(), entries.end());
  }
  std::optional<std::uint32_t> find(CellId c) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(c.key(), std::uint32_t{0}));
    if (it == entries.end() || it->first != c.key()) return std::nullopt;
    return it->second;
  }
};

struct Level {
  std::vector<CubicalSet> sets;
  Relation order;
};

CubicalSet union_of(int depth, const std::vector<CubicalSet>& sets) {
  std::vector<CellId> cells;
  for (const auto& s : sets) cells.insert(cells.end(), s.begin(), s.end());
  return CubicalSet(depth, std::move(cells));
}

bool proves_nonempty(const MorseSet& s) {
  if (!s.conley) return false;
  const auto& r = s.conley->leray_rank;
  return r[0] + r[1] + r[2] > 0;
}

// True when some subdivision of s, at most `levels` deep, carries no cycle:
// then no orbit stays in |s| and its invariant part is empty.
bool vanishes_under_refinement(Grid grid, const ParamBox& P, CubicalSet s, int levels, const BuildOptions& build) {
  for (int k = 0; k < levels; ++k) {
    s = refine(s);
    grid = grid.refined();
    const MapGraph m = MapGraph::build(grid, P, s, build);
    s = union_of(grid.depth(), scc(m));
    if (s.empty()) return true;
  }
  return false;
}

}  // namespace

MorseDecomposition compute_decomposition(const ParamBox& P, const IRect& B, int d0, int d,
                                         const DecompositionOptions& options) {
  if (d0 < 0 || d0 > d) throw std::invalid_argument("initial depth must lie in [0, depth]");
  P.validate();
  MorseDecomposition out;
  out.params = P;
  out.bounds = B;
  out.initial_depth = d0;
  out.depth = d;
  out.absorbing = verify_absorbing(P, B);

  Grid grid(B, d0);
  CubicalSet retained = grid.all_cells();
  std::vector<Level> history;
  std::vector<CubicalSet> finals;
  Relation final_order;
  for (int depth = d0;; ++depth) {
    const MapGraph m = MapGraph::build(grid, P, retained, options.build);
    std::vector<CubicalSet> sets = scc(m);
    Relation order = reach_partial_order(m, sets);
    if (depth == d) {
      finals = std::move(sets);
      final_order = std::move(order);
      break;
    }
    retained = refine(union_of(depth, sets));
    history.push_back({std::move(sets), std::move(order)});
    grid = grid.refined();
  }

  // Deterministic numbering.
  std::vector<std::uint32_t> perm(finals.size());
  for (std::uint32_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::make_tuple(-static_cast<std::int64_t>(finals[a].size()), finals[a].cells().front()) <
           std::make_tuple(-static_cast<std::int64_t>(finals[b].size()), finals[b].cells().front());
  });
  std::vector<std::uint32_t> rank(finals.size());
  for (std::uint32_t k = 0; k < perm.size(); ++k) rank[perm[k]] = k;

  Relation order;
  for (const auto& [p, q] : final_order) order.emplace_back(rank[p], rank[q]);
  for (std::size_t level = 0; level < history.size(); ++level) {
    const int levels_up = d - (d0 + static_cast<int>(level));
    const SetLookup lookup(history[level].sets);
    std::vector<std::uint32_t> ancestor(finals.size());
    for (std::size_t k = 0; k < finals.size(); ++k) {
      const CellId c = finals[k].cells().front();
      const auto a = lookup.find({c.i >> levels_up, c.j >> levels_up});
      if (!a) throw std::logic_error("Morse set cell without an ancestor component");
      ancestor[k] = *a;
    }
    const auto& rel = history[level].order;
    for (std::size_t p = 0; p < finals.size(); ++p)
      for (std::size_t q = 0; q < finals.size(); ++q) {
        if (ancestor[p] == ancestor[q]) continue;
        if (std::binary_search(rel.begin(), rel.end(), std::make_pair(ancestor[p], ancestor[q])))
          order.emplace_back(rank[p], rank[q]);
      }
  }
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  if (!is_acyclic(finals.size(), order)) throw std::logic_error("Morse order is not acyclic");
  out.order = transitive_closure(finals.size(), order);

  out.sets.resize(finals.size());
  for (std::uint32_t k = 0; k < perm.size(); ++k) {
    out.sets[k].id = k;
    out.sets[k].cells = std::move(finals[perm[k]]);
  }
  if (options.compute_indices) {
    const IntervalMap f(grid, P);
    for (MorseSet& s : out.sets) analyze_set(f, s);
  }
  if (options.spurious_levels > 0) {
    std::vector<std::int64_t> renumber(out.sets.size(), -1);
    std::vector<MorseSet> kept;
    for (MorseSet& s : out.sets) {
      if (!proves_nonempty(s) &&
          vanishes_under_refinement(grid, P, s.cells, options.spurious_levels, options.build)) {
        ++out.spurious;
        continue;
      }
      renumber[s.id] = static_cast<std::int64_t>(kept.size());
      s.id = static_cast<std::uint32_t>(kept.size());
      kept.push_back(std::move(s));
    }
    Relation restricted;
    for (const auto& [p, q] : out.order)
      if (renumber[p] >= 0 && renumber[q] >= 0)
        restricted.emplace_back(static_cast<std::uint32_t>(renumber[p]), static_cast<std::uint32_t>(renumber[q]));
    out.sets = std::move(kept);
    out.order = std::move(restricted);
  }
  return out;
}

namespace {

// The lower sides of B at 0 lie on the boundary of the invariant quadrant, so
// only the other sides bound the phase space seen by the grid.
bool on_open_side(const Grid& g, std::uint32_t i0, std::uint32_t j0, std::uint32_t i1, std::uint32_t j1) {
  const std::uint32_t last = g.side() - 1;
  return i1 == last || j1 == last || (i0 == 0 && g.bounds().x.lo() != 0.0) ||
         (j0 == 0 && g.bounds().y.lo() != 0.0);
}

bool block_meets(const CellBlock& b, const CubicalSet& s) {
  if (b.empty()) return false;
  for (std::uint32_t j = b.j0; j <= b.j1; ++j) {
    const auto it = std::lower_bound(s.begin(), s.end(), CellId{b.i0, j});
    if (it != s.end() && it->j == j && it->i <= b.i1) return true;
  }
  return false;
}

}  // namespace

Isolation check_isolation(const CellMap& f, const CubicalSet& M) {
  for (const CellId c : M)
    if (on_open_side(f.grid(), c.i, c.j, c.i, c.j)) return Isolation::boundary_touching;
  const Neighborhood nb = vertex_neighborhood(f.grid(), M);
  const CubicalSet fm = image_of(f, M).cells;
  for (const CellId q : nb.cells.subtract(M)) {
    if (!fm.contains(q)) continue;
    bool esc = false;
    if (block_meets(f.image(q, esc), M)) return Isolation::failed;
  }
  return Isolation::verified;
}

IndexPair build_index_pair(const CellMap& f, const CubicalSet& M) {
  auto attempt = [&](const CubicalSet& m, CubicalSet& offending) {
    const Covering fm = image_of(f, m);
    if (fm.escapes) throw IndexPairError("index not computed: leaves B");
    IndexPair ip{m.unite(fm.cells), CubicalSet(m.depth())};
    ip.p2 = ip.p1.subtract(m);
    std::vector<CellId> bad;
    for (const CellId q : ip.p2) {
      bool esc = false;
      const CellBlock b = f.image(q, esc);
      if (esc) throw IndexPairError("index not computed: leaves B");
      if (block_meets(b, m)) bad.push_back(q);
    }
    offending = CubicalSet(m.depth(), std::move(bad));
    return ip;
  };
  CubicalSet offending;
  IndexPair ip = attempt(M, offending);
  if (offending.empty()) return ip;
  ip = attempt(M.unite(offending), offending);
  if (!offending.empty()) throw IndexPairError("index pair invalid");
  return ip;
}

bool attractor_certificate(const CellMap& f, const CubicalSet& M) {
  if (M.empty()) return false;
  for (const CellId c : M) {
    bool esc = false;
    const CellBlock b = f.image(c, esc);
    // A block on the outer ring may touch the boundary of B, which is then
    // part of the boundary of |M|; such images are not certified.
    if (esc || b.empty() || on_open_side(f.grid(), b.i0, b.j0, b.i1, b.j1)) return false;
    for (std::uint32_t j = b.j0; j <= b.j1; ++j)
      for (std::uint32_t i = b.i0; i <= b.i1; ++i)
        if (!M.contains({i, j})) return false;
  }
  return true;
}

std::vector<int> component_map(const CellMap& f, const CubicalSet& M) {
  const std::vector<CubicalSet> comps = components(M);
  std::vector<int> out;
  for (const CubicalSet& c : comps) {
    const CubicalSet img = image_of(f, c).cells;
    int hit = -1;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      if (!img.intersects(comps[k])) continue;
      hit = hit == -1 ? static_cast<int>(k) : -2;
    }
    out.push_back(hit < 0 ? -1 : hit);
  }
  return out;
}

void analyze_set(const CellMap& f, MorseSet& s) {
  s.component_map = component_map(f, s.cells);
  s.component_count = static_cast<std::uint32_t>(s.component_map.size());
  s.pictogram = Pictogram{};
  s.pictogram.components = s.component_count;
  s.pictogram.period = permutation_cycles(s.component_map);
  s.attractor_certificate = attractor_certificate(f, s.cells);
  s.isolation = check_isolation(f, s.cells);
  s.index_pair.reset();
  s.conley.reset();
  if (s.isolation != Isolation::verified) {
    s.index_error = s.isolation == Isolation::boundary_touching ? "index not computed: touches the boundary of B"
                                                                : "index not computed: isolation failed";
    return;
  }
  try {
    IndexPair ip = build_index_pair(f, s.cells);
    ConleyIndex idx = conley_index(f, ip.p1, ip.p2);
    s.pictogram = classify(idx, ip.p2.empty(), s.component_map);
    s.index_pair = std::move(ip);
    s.conley = std::move(idx);
    s.index_error.clear();
  } catch (const IndexPairError& e) {
    s.index_error = e.what();
  } catch (const InducedMapError& e) {
    s.index_error = e.what();
  }
}

}  // namespace akdyn
