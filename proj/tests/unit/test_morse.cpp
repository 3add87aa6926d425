#include <doctest.h>

#include <algorithm>
#include <random>

#include "akdyn/morse.hpp"

using namespace akdyn;

namespace {

const IRect kUnit{Interval(0.0, 8.0), Interval(0.0, 8.0)};

CellBlock blk(std::uint32_t i0, std::uint32_t i1, std::uint32_t j0, std::uint32_t j1) { return {i0, i1, j0, j1}; }
CellBlock one(std::uint32_t i, std::uint32_t j) { return blk(i, i, j, j); }

CubicalSet cells(int depth, std::vector<CellId> c) { return CubicalSet(depth, std::move(c)); }

ParamBox diagonal_box(const char* lo, const char* hi, const char* eps_lo = "0.8", const char* eps_hi = "0.8") {
  ParamBox P;
  P.alpha1 = Interval::from_decimal(lo, hi);
  P.alpha2 = P.alpha1;
  P.epsilon = Interval::from_decimal(eps_lo, eps_hi);
  return P;
}

const IRect kB{Interval(0.0, 101.0), Interval(0.0, 101.0)};

CubicalSet image_cells(const CellMap& f, const CubicalSet& s) { return image_of(f, s).cells; }

}  // namespace

TEST_CASE("isolation status") {
  TableMap f(Grid(kUnit, 3));
  // Two cells mapping onto each other in the middle of the grid.
  f.set({3, 3}, one(4, 3));
  f.set({4, 3}, one(3, 3));
  const CubicalSet M = cells(3, {{3, 3}, {4, 3}});
  CHECK(check_isolation(f, M) == Isolation::verified);

  // A cycle that leaves M through (5,3) and returns.
  TableMap g(Grid(kUnit, 3));
  g.set({3, 3}, one(4, 3));
  g.set({4, 3}, one(5, 3));
  g.set({5, 3}, one(3, 3));
  CHECK(check_isolation(g, M) == Isolation::failed);

  TableMap top(Grid(kUnit, 3));
  top.set({3, 7}, one(3, 7));
  CHECK(check_isolation(top, cells(3, {{3, 7}})) == Isolation::boundary_touching);
  TableMap right(Grid(kUnit, 3));
  right.set({7, 2}, one(7, 2));
  CHECK(check_isolation(right, cells(3, {{7, 2}})) == Isolation::boundary_touching);

  // Lower sides at 0 bound the quadrant; elsewhere they are ordinary sides.
  TableMap corner(Grid(kUnit, 3));
  corner.set({0, 0}, one(0, 0));
  CHECK(check_isolation(corner, cells(3, {{0, 0}})) == Isolation::verified);
  TableMap shifted(Grid(IRect{Interval(1.0, 9.0), Interval(0.0, 8.0)}, 3));
  shifted.set({0, 2}, one(0, 2));
  CHECK(check_isolation(shifted, cells(3, {{0, 2}})) == Isolation::boundary_touching);

  CHECK(isolation_from_string(to_string(Isolation::boundary_touching)) == Isolation::boundary_touching);
  CHECK_THROWS_AS(isolation_from_string("isolated"), std::invalid_argument);
}

TEST_CASE("index pairs") {
  SUBCASE("forward invariant set has an empty exit set") {
    TableMap f(Grid(kUnit, 3));
    f.set({2, 2}, one(3, 2));
    f.set({3, 2}, one(2, 2));
    const IndexPair ip = build_index_pair(f, cells(3, {{2, 2}, {3, 2}}));
    CHECK(ip.p1 == cells(3, {{2, 2}, {3, 2}}));
    CHECK(ip.p2.empty());
  }
  SUBCASE("one cell stretched onto its right neighbour") {
    TableMap f(Grid(kUnit, 3));
    f.set({2, 2}, blk(2, 3, 2, 2));
    f.set({3, 2}, one(5, 5));
    const IndexPair ip = build_index_pair(f, cells(3, {{2, 2}}));
    CHECK(ip.p1 == cells(3, {{2, 2}, {3, 2}}));
    CHECK(ip.p2 == cells(3, {{3, 2}}));
  }
  SUBCASE("repair absorbs a returning exit cell") {
    TableMap f(Grid(kUnit, 3));
    f.set({2, 2}, one(3, 2));
    f.set({3, 2}, blk(3, 4, 2, 2));
    f.set({4, 2}, blk(1, 2, 2, 2));
    f.set({1, 2}, one(0, 5));
    const CubicalSet M = cells(3, {{2, 2}, {3, 2}});
    const IndexPair ip = build_index_pair(f, M);
    CHECK(ip.p1 == cells(3, {{1, 2}, {2, 2}, {3, 2}, {4, 2}}));
    CHECK(ip.p2 == cells(3, {{1, 2}}));
    // Conditions checked directly on the table.
    const CubicalSet core = ip.p1.subtract(ip.p2);
    CHECK(M.is_subset_of(core));
    CHECK(image_cells(f, core).is_subset_of(ip.p1));
    CHECK(image_cells(f, ip.p2).intersect(ip.p1).is_subset_of(ip.p2));
  }
  SUBCASE("a second failure is reported") {
    TableMap f(Grid(kUnit, 3));
    f.set({2, 2}, one(3, 2));
    f.set({3, 2}, blk(3, 4, 2, 2));
    f.set({4, 2}, blk(1, 2, 2, 2));
    f.set({1, 2}, one(2, 2));
    CHECK_THROWS_WITH_AS(build_index_pair(f, cells(3, {{2, 2}, {3, 2}})), "index pair invalid", IndexPairError);
  }
  SUBCASE("escape") {
    TableMap f(Grid(kUnit, 3));
    f.set({2, 2}, one(2, 2), true);
    CHECK_THROWS_WITH_AS(build_index_pair(f, cells(3, {{2, 2}})), "index not computed: leaves B", IndexPairError);
  }
}

TEST_CASE("attractor certificate") {
  TableMap f(Grid(kUnit, 3));
  std::vector<CellId> block;
  for (std::uint32_t j = 2; j <= 4; ++j)
    for (std::uint32_t i = 2; i <= 4; ++i) {
      block.push_back({i, j});
      f.set({i, j}, one(3, 3));
    }
  const CubicalSet M = cells(3, block);
  CHECK(attractor_certificate(f, M));
  f.set({3, 3}, blk(3, 5, 3, 3));
  CHECK_FALSE(attractor_certificate(f, M));
  f.set({3, 3}, blk(2, 4, 2, 4));
  CHECK_FALSE(attractor_certificate(f, cells(3, {{3, 3}})));
  CHECK_FALSE(attractor_certificate(f, CubicalSet(3)));
}

TEST_CASE("certificates, isolation and index pairs on random tables") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> shift(-1, 1), len(0, 1);
  auto clamp = [](int v) { return static_cast<std::uint32_t>(std::clamp(v, 0, 7)); };
  int certified = 0, pairs = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    TableMap f(Grid(kUnit, 3));
    for (std::uint32_t j = 0; j < 8; ++j)
      for (std::uint32_t i = 0; i < 8; ++i) {
        const int i0 = static_cast<int>(i) + shift(rng), j0 = static_cast<int>(j) + shift(rng);
        f.set({i, j}, blk(clamp(i0), clamp(i0 + len(rng)), clamp(j0), clamp(j0 + len(rng))));
      }

    // Forward closure of a seed cell: F(M) inside M.
    CubicalSet M = cells(3, {{clamp(2 + shift(rng) * 2), clamp(3 + shift(rng) * 2)}});
    for (;;) {
      const CubicalSet next = M.unite(image_cells(f, M));
      if (next == M) break;
      M = next;
    }
    if (attractor_certificate(f, M)) {
      ++certified;
      CHECK(build_index_pair(f, M).p2.empty());
    }

    // Components of the graph are isolated unless they reach an open side.
    const MapGraph g = MapGraph::build(f, Grid(kUnit, 3).all_cells());
    for (const CubicalSet& c : scc(g)) {
      const Isolation iso = check_isolation(f, c);
      CHECK(iso != Isolation::failed);
      if (iso != Isolation::verified) continue;
      const IndexPair ip = build_index_pair(f, c);
      ++pairs;
      const CubicalSet core = ip.p1.subtract(ip.p2);
      CHECK(ip.p2.is_subset_of(ip.p1));
      CHECK(core == c);
      CHECK(image_cells(f, core).is_subset_of(ip.p1));
      CHECK(image_cells(f, ip.p2).intersect(ip.p1).is_subset_of(ip.p2));
    }
  }
  CHECK(pairs > 0);
  CHECK(certified > 0);
  MESSAGE(certified << " certified, " << pairs << " index pairs");
}

TEST_CASE("component map") {
  TableMap f(Grid(kUnit, 3));
  f.set({1, 1}, one(5, 5));
  f.set({5, 5}, one(1, 1));
  f.set({3, 6}, blk(1, 5, 1, 5));
  CHECK(component_map(f, cells(3, {{1, 1}, {5, 5}})) == std::vector<int>{1, 0});
  CHECK(component_map(f, cells(3, {{1, 1}, {3, 6}, {5, 5}})) == std::vector<int>{1, 0, -1});

  MorseSet s;
  s.cells = cells(3, {{1, 1}, {5, 5}});
  analyze_set(f, s);
  CHECK(s.component_count == 2);
  CHECK(s.isolation == Isolation::verified);
  CHECK(s.attractor_certificate);
  REQUIRE(s.conley.has_value());
  CHECK(s.pictogram.kind == IndexKind::attractor);
  CHECK(s.pictogram.period == std::vector<std::uint32_t>{2});
  CHECK(s.index_error.empty());
}

TEST_CASE("decomposition invariants") {
  const ParamBox P = diagonal_box("6", "6.5", "0.94", "0.95");
  const int d = 10;
  DecompositionOptions unpruned;
  unpruned.spurious_levels = 0;
  const MorseDecomposition D = compute_decomposition(P, kB, 6, d);
  const MorseDecomposition raw = compute_decomposition(P, kB, 6, d, unpruned);
  CHECK(D.absorbing);
  REQUIRE(!D.sets.empty());

  // Every set is a nontrivial component of the graph on the whole grid.
  const Grid grid(kB, d);
  const MapGraph full = MapGraph::build(grid, P, grid.all_cells());
  const std::vector<CubicalSet> comps = scc(full);
  for (const MorseSet& s : raw.sets) CHECK(std::find(comps.begin(), comps.end(), s.cells) != comps.end());
  CHECK(raw.sets.size() == comps.size());

  for (std::size_t p = 0; p < D.sets.size(); ++p) {
    CHECK(D.sets[p].id == p);
    for (std::size_t q = p + 1; q < D.sets.size(); ++q) CHECK_FALSE(D.sets[p].cells.intersects(D.sets[q].cells));
    if (p + 1 < D.sets.size()) CHECK(D.sets[p].cells.size() >= D.sets[p + 1].cells.size());
  }
  CHECK(is_acyclic(D.sets.size(), D.order));
  CHECK(transitive_closure(D.sets.size(), D.order) == D.order);
  for (const auto& [p, q] : D.order) CHECK(p != q);

  // Final reachability is part of the order.
  std::vector<CubicalSet> final_sets;
  for (const auto& s : D.sets) final_sets.push_back(s.cells);
  for (const auto& pq : reach_partial_order(full, final_sets))
    CHECK(std::binary_search(D.order.begin(), D.order.end(), pq));

  // Refinement containment against the full graphs at coarser depths.
  for (int k = 6; k < d; ++k) {
    const Grid gk(kB, k);
    std::vector<CellId> rec;
    for (const auto& c : scc(MapGraph::build(gk, P, gk.all_cells())))
      rec.insert(rec.end(), c.begin(), c.end());
    const CubicalSet recurrent(k, rec);
    for (const auto& s : D.sets) CHECK(coarsen(s.cells, d - k).is_subset_of(recurrent));
  }

  // Pruning only removes sets whose index gives no invariant part.
  CHECK(raw.sets.size() == D.sets.size() + D.spurious);
  for (const MorseSet& s : raw.sets) {
    const bool kept = std::any_of(D.sets.begin(), D.sets.end(), [&](const MorseSet& t) { return t.cells == s.cells; });
    if (!kept) {
      CHECK(s.pictogram.kind != IndexKind::attractor);
      if (s.conley) CHECK(s.conley->leray_rank == std::array<std::uint32_t, 3>{0, 0, 0});
    }
  }

  for (const MorseSet& s : D.sets) {
    if (s.attractor_certificate) {
      REQUIRE(s.index_pair.has_value());
      CHECK(s.index_pair->p2.empty());
    }
    CHECK(s.component_count == components(s.cells).size());
    CHECK(s.conley.has_value() == s.index_error.empty());
  }
}

TEST_CASE("swap symmetry on the diagonal") {
  for (const char* lo : {"1.5", "4", "7"}) {
    const std::string hi = std::to_string(std::stod(lo) + 0.5);
    const MorseDecomposition D = compute_decomposition(diagonal_box(lo, hi.c_str()), kB, 6, 10);
    for (const MorseSet& s : D.sets) {
      const CubicalSet t = s.cells.transposed();
      const auto it = std::find_if(D.sets.begin(), D.sets.end(), [&](const MorseSet& m) { return m.cells == t; });
      REQUIRE(it != D.sets.end());
      CHECK(it->pictogram == s.pictogram);
    }
  }
}

TEST_CASE("worker count does not change the result") {
  const ParamBox P = diagonal_box("7", "7.5");
  DecompositionOptions one_thread, many;
  one_thread.build.threads = 1;
  many.build.threads = 4;
  CHECK(compute_decomposition(P, kB, 5, 10, one_thread) == compute_decomposition(P, kB, 5, 10, many));
}

TEST_CASE("decomposition errors") {
  const ParamBox P = diagonal_box("1.5", "2");
  CHECK_THROWS_AS(compute_decomposition(P, kB, 9, 8), std::invalid_argument);
  DecompositionOptions tight;
  tight.build.edge_budget = 1000;
  try {
    compute_decomposition(P, kB, 4, 9, tight);
    FAIL("budget not enforced");
  } catch (const EdgeBudgetExceeded& e) {
    CHECK(e.depth >= 4);
    CHECK(e.depth <= 9);
  }
}

TEST_CASE("zero initial depth and a single level") {
  const ParamBox P = diagonal_box("1.5", "2");
  const MorseDecomposition a = compute_decomposition(P, kB, 0, 8);
  const MorseDecomposition b = compute_decomposition(P, kB, 8, 8);
  REQUIRE(a.sets.size() == b.sets.size());
  for (std::size_t k = 0; k < a.sets.size(); ++k) CHECK(a.sets[k].cells == b.sets[k].cells);
}
