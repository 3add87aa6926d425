#include "akdyn/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace akdyn {

void ParamGrid::validate() const {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("parameter grid needs at least one box per axis");
  if (!(alpha1.lo() <= alpha1.hi()) || !(alpha2.lo() <= alpha2.hi()))
    throw std::invalid_argument("empty parameter range");
  box(0, 0).validate();
}

namespace {

Interval split_point(const Interval& range, std::uint32_t k, std::uint32_t n) {
  if (k == 0) return Interval(range.lo());
  if (k == n) return Interval(range.hi());
  return Interval(range.lo()) + (Interval(range.hi()) - Interval(range.lo())) * Interval(double(k)) / Interval(double(n));
}

Interval sub_range(const Interval& range, std::uint32_t k, std::uint32_t n) {
  return Interval(split_point(range, k, n).lo(), split_point(range, k + 1, n).hi());
}

}  // namespace

ParamBox ParamGrid::box(std::uint32_t i, std::uint32_t j) const {
  if (i >= n1 || j >= n2) throw std::out_of_range("parameter box index");
  ParamBox P = base;
  P.alpha1 = sub_range(alpha1, i, n1);
  P.alpha2 = sub_range(alpha2, j, n2);
  return P;
}

bool ParamGrid::symmetric() const {
  return n1 == n2 && alpha1 == alpha2 && base.beta1 == base.beta2;
}

std::vector<BoxResult> sweep(const ParamGrid& pg, const PhaseConfig& cfg, const SweepOptions& options) {
  pg.validate();
  std::vector<BoxResult> out(pg.size());
  for (std::uint32_t j = 0; j < pg.n2; ++j)
    for (std::uint32_t i = 0; i < pg.n1; ++i) {
      BoxResult& r = out[pg.index(i, j)];
      r.i = i;
      r.j = j;
      r.params = pg.box(i, j);
      r.skipped = options.skip && options.skip(pg.index(i, j));
    }

  const unsigned workers = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(out.size())));
  DecompositionOptions dopt = cfg.options;
  if (workers > 1) dopt.build.threads = 1;
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= out.size()) return;
      BoxResult& r = out[k];
      if (r.skipped) continue;
      try {
        r.decomposition = compute_decomposition(r.params, cfg.bounds, cfg.initial_depth, cfg.depth, dopt);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      if (options.on_result) {
        const std::lock_guard<std::mutex> lock(report);
        options.on_result(r);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

bool clutch(const MorseDecomposition& a, const MorseDecomposition& b) {
  if (a.depth != b.depth || !(a.bounds == b.bounds))
    throw std::invalid_argument("clutching needs decompositions on the same grid");
  if (a.sets.size() != b.sets.size()) return false;
  std::vector<int> match_a(a.sets.size(), -1), match_b(b.sets.size(), -1);
  for (std::size_t p = 0; p < a.sets.size(); ++p)
    for (std::size_t q = 0; q < b.sets.size(); ++q) {
      if (!a.sets[p].cells.intersects(b.sets[q].cells)) continue;
      if (match_a[p] != -1 || match_b[q] != -1) return false;
      match_a[p] = static_cast<int>(q);
      match_b[q] = static_cast<int>(p);
    }
  for (std::size_t p = 0; p < a.sets.size(); ++p) {
    if (match_a[p] < 0) return false;
    if (!(a.sets[p].pictogram == b.sets[static_cast<std::size_t>(match_a[p])].pictogram)) return false;
  }
  return true;
}

MorseDecomposition mirror(const MorseDecomposition& d) {
  MorseDecomposition m = d;
  std::swap(m.params.alpha1, m.params.alpha2);
  std::swap(m.params.beta1, m.params.beta2);
  m.bounds = IRect{d.bounds.y, d.bounds.x};
  for (MorseSet& s : m.sets) {
    s.cells = s.cells.transposed();
    if (s.index_pair) {
      s.index_pair->p1 = s.index_pair->p1.transposed();
      s.index_pair->p2 = s.index_pair->p2.transposed();
    }
    // Components are listed by smallest cell, which the swap reorders.
    const std::vector<CubicalSet> before = components(d.sets[s.id].cells);
    const std::vector<CubicalSet> after = components(s.cells);
    std::vector<int> where(before.size(), -1);
    for (std::size_t k = 0; k < before.size(); ++k) {
      const CubicalSet t = before[k].transposed();
      where[k] = static_cast<int>(std::find(after.begin(), after.end(), t) - after.begin());
    }
    std::vector<int> cmap(s.component_map.size(), -1);
    for (std::size_t k = 0; k < s.component_map.size(); ++k)
      cmap[static_cast<std::size_t>(where[k])] = s.component_map[k] < 0 ? -1 : where[static_cast<std::size_t>(s.component_map[k])];
    s.component_map = std::move(cmap);
  }
  std::vector<std::uint32_t> perm(m.sets.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::make_tuple(-static_cast<std::int64_t>(m.sets[a].cells.size()), m.sets[a].cells.cells().front()) <
           std::make_tuple(-static_cast<std::int64_t>(m.sets[b].cells.size()), m.sets[b].cells.cells().front());
  });
  std::vector<std::uint32_t> rank(perm.size());
  for (std::uint32_t k = 0; k < perm.size(); ++k) rank[perm[k]] = k;
  std::vector<MorseSet> sorted;
  for (std::uint32_t k = 0; k < perm.size(); ++k) {
    sorted.push_back(std::move(m.sets[perm[k]]));
    sorted.back().id = k;
  }
  m.sets = std::move(sorted);
  Relation order;
  for (const auto& [p, q] : d.order) order.emplace_back(rank[p], rank[q]);
  std::sort(order.begin(), order.end());
  m.order = std::move(order);
  return m;
}

std::vector<ClutchEdge> adjacent_pairs(const ParamGrid& pg) {
  std::vector<ClutchEdge> e;
  for (std::uint32_t j = 0; j < pg.n2; ++j)
    for (std::uint32_t i = 0; i + 1 < pg.n1; ++i) e.push_back({pg.index(i, j), pg.index(i + 1, j), false});
  for (std::uint32_t j = 0; j + 1 < pg.n2; ++j)
    for (std::uint32_t i = 0; i < pg.n1; ++i) e.push_back({pg.index(i, j), pg.index(i, j + 1), false});
  return e;
}

std::vector<ClutchEdge> clutch_all(const ParamGrid& pg, const std::vector<std::optional<MorseDecomposition>>& d) {
  if (d.size() != pg.size()) throw std::invalid_argument("one decomposition slot per box required");
  std::vector<ClutchEdge> e = adjacent_pairs(pg);
  for (ClutchEdge& x : e) x.success = d[x.a] && d[x.b] && clutch(*d[x.a], *d[x.b]);
  return e;
}

ContinuationDiagram classes(const ParamGrid& pg, const std::vector<ClutchEdge>& edges,
                            const std::vector<std::optional<MorseDecomposition>>& d) {
  const std::size_t n = pg.size();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const ClutchEdge& e : edges) {
    if (e.a >= n || e.b >= n) throw std::out_of_range("clutching edge outside the grid");
    if (!e.success) continue;
    const std::uint32_t ra = find(static_cast<std::uint32_t>(e.a)), rb = find(static_cast<std::uint32_t>(e.b));
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  ContinuationDiagram out;
  out.n1 = pg.n1;
  out.n2 = pg.n2;
  out.edges = edges;
  out.label.resize(n);
  for (std::uint32_t k = 0; k < n; ++k) out.label[k] = find(k);
  out.classes = out.label;
  std::sort(out.classes.begin(), out.classes.end());
  out.classes.erase(std::unique(out.classes.begin(), out.classes.end()), out.classes.end());

  // Colors by class rank; a mirror class reuses the color of its partner.
  std::vector<std::int64_t> class_color(n, -1);
  std::uint32_t next_color = 0;
  const bool can_mirror = pg.symmetric() && d.size() == n;
  for (const std::uint32_t c : out.classes) {
    if (class_color[c] >= 0) continue;
    class_color[c] = next_color++;
    if (!can_mirror) continue;
    const std::uint32_t ci = c % pg.n1, cj = c / pg.n1;
    const std::uint32_t partner = out.label[pg.index(cj, ci)];
    if (partner == c || class_color[partner] >= 0) continue;
    const auto& dc = d[c];
    const auto& dm = d[pg.index(cj, ci)];
    if (dc && dm && clutch(mirror(*dc), *dm)) class_color[partner] = class_color[c];
  }
  out.color.resize(n);
  for (std::uint32_t k = 0; k < n; ++k) out.color[k] = static_cast<std::uint32_t>(class_color[out.label[k]]);
  return out;
}

std::string pictogram_code(const Pictogram& p) {
  std::string s = to_string(p.kind) + "/" + std::to_string(p.components);
  if (!p.period.empty()) {
    s += "/p";
    for (std::size_t k = 0; k < p.period.size(); ++k) s += (k ? "," : "") + std::to_string(p.period[k]);
  }
  if (p.flip == Flip::yes) s += "/-";
  if (p.flip == Flip::undetermined && p.kind != IndexKind::undetermined) s += "/?";
  if (p.loops) s += "/o" + std::to_string(p.loops);
  return s;
}

std::string cm_summary(const MorseDecomposition& d) {
  std::string s;
  for (const MorseSet& m : d.sets) s += (m.id ? ";" : "") + std::to_string(m.id) + ":" + pictogram_code(m.pictogram);
  s += "|";
  bool first = true;
  for (const auto& [p, q] : d.reduced_order()) {
    s += (first ? "" : ",") + std::to_string(p) + ">" + std::to_string(q);
    first = false;
  }
  return s;
}

}  // namespace akdyn
