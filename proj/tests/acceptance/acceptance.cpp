// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--extended] [--suite PATH]...

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "akdyn/continuation.hpp"
#include "akdyn/simulate.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using namespace akdyn;

namespace {

const IRect kB{Interval(0.0, 101.0), Interval(0.0, 101.0)};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int criterion, const std::string& title, Verdict& v, double seconds) {
  std::cout << "criterion " << criterion << ": " << (v.ok ? "PASS" : "FAIL") << "  " << title << ";"
            << v.detail.str() << " (" << std::fixed;
  std::cout.precision(2);
  std::cout << seconds << " s)" << std::endl;
  std::cout.unsetf(std::ios::fixed);
  if (!v.ok) ++failures;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ParamBox region(const char* lo, const char* hi, const char* eps_lo = "0.8", const char* eps_hi = "0.8") {
  ParamBox P;
  P.alpha1 = Interval::from_decimal(lo, hi);
  P.alpha2 = P.alpha1;
  P.epsilon = Interval::from_decimal(eps_lo, eps_hi);
  return P;
}

MorseDecomposition decompose(const ParamBox& P, int depth) {
  DecompositionOptions opt;
  opt.build.threads = workers();
  return compute_decomposition(P, kB, std::min(depth, 6), depth, opt);
}

std::string describe(const MorseDecomposition& d) {
  std::string s;
  for (const MorseSet& m : d.sets) s += (s.empty() ? "" : ",") + pictogram_code(m.pictogram);
  return s;
}

std::size_t count_kind(const MorseDecomposition& d, IndexKind k, std::uint32_t comps) {
  return static_cast<std::size_t>(std::count_if(d.sets.begin(), d.sets.end(), [&](const MorseSet& m) {
    return m.pictogram.kind == k && m.component_count == comps;
  }));
}

bool has_order(const MorseDecomposition& d, std::uint32_t hi, std::uint32_t lo) {
  return std::binary_search(d.order.begin(), d.order.end(), std::make_pair(hi, lo));
}

/// Number of points not inside the cells of an attracting set of `d`.
std::size_t outside_attractors(const MorseDecomposition& d, const std::vector<State>& pts) {
  const Grid g(d.bounds, d.depth);
  std::vector<CellId> attracting;
  for (const MorseSet& m : d.sets)
    if (m.pictogram.kind == IndexKind::attractor) attracting.insert(attracting.end(), m.cells.begin(), m.cells.end());
  const CubicalSet target(d.depth, attracting);
  std::size_t bad = 0;
  for (const State& s : pts) {
    const Covering c = cells_covering(g, IRect{Interval(s.x), Interval(s.y)});
    if (c.escapes || !c.cells.intersects(target)) ++bad;
  }
  return bad;
}

/// Greedy clustering of points closer than `tol`.
std::vector<State> limit_points(const std::vector<State>& pts, double tol) {
  std::vector<State> out;
  for (const State& s : pts)
    if (std::none_of(out.begin(), out.end(), [&](const State& q) { return std::hypot(q.x - s.x, q.y - s.y) < tol; }))
      out.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------

void depth_study() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  const ParamBox P = region("6", "6.5", "0.94", "0.95");
  Params p;
  p.alpha1 = p.alpha2 = 6.0;
  p.epsilon = 0.94;
  const auto scan = attractor_scan(p, kB, {128, 10000, workers()});

  const auto d8 = decompose(P, 8);
  v.detail << " d8=" << describe(d8);
  v.require(d8.sets.size() == 1, "one set at depth 8");
  if (d8.sets.size() == 1) {
    v.require(d8.sets[0].attractor_certificate, "depth 8 attractor certificate");
    v.require(d8.sets[0].index_pair && d8.sets[0].index_pair->p2.empty(), "depth 8 exit set empty");
  }

  const auto d10 = decompose(P, 10);
  v.detail << " d10=" << describe(d10);
  v.require(d10.sets.size() == 2, "two sets at depth 10");
  v.require(count_kind(d10, IndexKind::repeller, 1) == 1, "one repeller at depth 10");
  const auto ring = std::find_if(d10.sets.begin(), d10.sets.end(),
                                 [](const MorseSet& m) { return m.pictogram.kind == IndexKind::attractor; });
  v.require(ring != d10.sets.end() && ring->pictogram.loops == 1, "depth 10 attractor with one loop");
  if (ring != d10.sets.end() && ring->conley) {
    const RMatrix minus_one{{Rational(-1)}};
    v.detail << " L1" << (ring->conley->leray[1] == minus_one ? "=(-1)" : "!=(-1)");
    v.require(ring->conley->leray[1] == minus_one, "L1 = (-1) on the ring");
  } else {
    v.require(false, "index of the depth 10 attractor");
  }

  const auto d11 = decompose(P, 11);
  v.detail << " d11=" << describe(d11);
  v.require(d11.sets.size() == 4, "four sets at depth 11");
  v.require(count_kind(d11, IndexKind::repeller, 1) == 1, "one repeller at depth 11");
  v.require(count_kind(d11, IndexKind::saddle, 2) == 1, "one two-component saddle at depth 11");
  v.require(std::count_if(d11.sets.begin(), d11.sets.end(),
                          [](const MorseSet& m) { return m.pictogram.kind == IndexKind::attractor; }) == 2,
            "two attractors at depth 11");

  for (const auto* d : {&d8, &d10, &d11}) {
    const std::size_t bad = outside_attractors(*d, scan);
    if (bad) v.detail << " depth " << d->depth << ": " << bad << " scan points outside attractors";
    v.require(bad == 0, "simulated attractor contained at depth " + std::to_string(d->depth));
  }
  report(1, "depth study alpha in [6,6.5]^2, epsilon in [0.94,0.95]", v, since(t0));
}

std::map<std::string, MorseDecomposition> regions;

void diagonal_regions() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  struct Region {
    const char* name;
    const char* lo;
    const char* hi;
    std::size_t sets;
  };
  const Region table[] = {{"a", "1.5", "2", 1},   {"b", "4", "4.5", 2},     {"c", "7", "7.5", 4},
                          {"d", "17.5", "18", 6}, {"e", "20", "20.5", 8}, {"h", "60", "60.5", 3}};
  for (const Region& r : table) {
    const auto d = decompose(region(r.lo, r.hi), 12);
    v.detail << " (" << r.name << ")=" << describe(d);
    v.require(d.absorbing, std::string("absorbing box in (") + r.name + ")");
    v.require(d.sets.size() == r.sets, std::string("set count in (") + r.name + ")");
    regions[r.name] = d;
  }

  const auto& a = regions["a"];
  v.require(count_kind(a, IndexKind::attractor, 1) == 1 && a.sets[0].attractor_certificate,
            "(a) certified attractor");

  const auto& b = regions["b"];
  v.require(count_kind(b, IndexKind::saddle, 1) == 1, "(b) one-component saddle");
  v.require(count_kind(b, IndexKind::attractor, 2) == 1, "(b) two-component attractor");
  for (std::uint32_t k = 0; k < b.sets.size(); ++k) {
    const MorseSet& m = b.sets[k];
    if (m.pictogram.kind == IndexKind::attractor) {
      const RMatrix swap{{Rational(0), Rational(1)}, {Rational(1), Rational(0)}};
      v.require(m.conley && m.conley->maps[0] == swap, "(b) A0 swaps the attractor components");
      v.require(m.pictogram.period == std::vector<std::uint32_t>{2}, "(b) attractor period 2");
    } else {
      v.detail << " (b) saddle flip=" << to_string(m.pictogram.flip);
      for (std::uint32_t q = 0; q < b.sets.size(); ++q)
        if (q != k) v.require(has_order(b, k, q), "(b) saddle above attractor");
    }
  }

  const auto& c = regions["c"];
  v.require(count_kind(c, IndexKind::repeller, 1) == 1, "(c) repeller");
  v.require(count_kind(c, IndexKind::saddle, 1) == 2, "(c) two one-component saddles");
  v.require(count_kind(c, IndexKind::attractor, 2) == 1, "(c) two-component attractor");

  const auto& e = regions["e"];
  v.require(count_kind(e, IndexKind::attractor, 4) == 2, "(e) two attractors of 4 components");
  report(2, "diagonal regions at depth 12", v, since(t0));
}

void absorbing_certificate() {
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli::run({"verify", "--absorbing"}, out, err);
  const double s = since(t0);
  Verdict v;
  v.detail << " exit " << code;
  v.require(code == cli::kOk, "exit status");
  v.require(out.str().find("absorbing certificate: true") != std::string::npos, "certificate true");
  v.require(out.str().find("B = [0, 101] x [0, 101]") != std::string::npos, "B = [0,101]^2");
  v.require(s < 1.0, "under one second");
  report(3, "verify --absorbing for alpha in [0,80]^2", v, s);
}

void property_suites(const std::vector<std::string>& suites) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  v.require(!suites.empty(), "no suites given");
  for (const std::string& path : suites) {
    const std::string name = fs::path(path).filename().string();
    const int status = std::system((path + " > /dev/null 2>&1").c_str());
    v.detail << " " << name << (status == 0 ? "=ok" : "=failed");
    v.require(status == 0, name);
  }
  report(4, "property suites", v, since(t0));
}

void cross_validation(bool extended) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  std::vector<std::string> names{"b", "c", "d"};
  if (extended) names = {"a", "b", "c", "d", "e", "h"};
  for (const std::string& name : names) {
    const MorseDecomposition& d = regions.at(name);
    const Params p = d.params.lower_corner();
    const auto pts = attractor_scan(p, kB, {512, 10000, workers()});
    const std::size_t bad = outside_attractors(d, pts);
    v.detail << " (" << name << ") " << bad << "/" << pts.size() << " outside";
    v.require(bad == 0, "(" + name + ") scan inside attracting sets");
    if (name != "d") continue;

    const auto limits = limit_points(pts, 1e-6);
    v.detail << ", " << limits.size() << " limit points";
    v.require(limits.size() == 8, "(d) eight limit points");
    std::vector<int> orbit(limits.size(), -1);
    int orbits = 0;
    bool period4 = limits.size() == 8;
    for (std::size_t k = 0; period4 && k < limits.size(); ++k) {
      if (orbit[k] >= 0) continue;
      State s = limits[k];
      for (int step = 1; step <= 4; ++step) {
        s = eval_point(p, s);
        const auto it = std::find_if(limits.begin(), limits.end(),
                                     [&](const State& q) { return std::hypot(q.x - s.x, q.y - s.y) < 1e-6; });
        if (it == limits.end()) {
          period4 = false;
          break;
        }
        orbit[static_cast<std::size_t>(it - limits.begin())] = orbits;
        if (step < 4 && it == limits.begin() + static_cast<std::ptrdiff_t>(k)) period4 = false;
      }
      period4 = period4 && std::hypot(s.x - limits[k].x, s.y - limits[k].y) < 1e-6;
      ++orbits;
    }
    v.detail << " in " << orbits << " orbits";
    v.require(period4 && orbits == 2, "(d) two period-4 orbits");
  }
  report(5, "attractor scans (512x512, 10^4 iterations) against Morse sets", v, since(t0));
}

void lyapunov() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  v.detail.precision(9);
  const auto tent = lyapunov_max(tent_harness(), sample_initial({0.01, 0.99, false}, 128), 5000, 1000, workers());
  v.detail << " tent mean=" << tent.mean << " max=" << tent.max;
  v.require(std::abs(tent.mean - std::log(2.0)) <= 0.01 && std::abs(tent.max - std::log(2.0)) <= 0.01,
            "tent harness ln 2 +- 0.01");

  OrbitEnsemble zero;
  zero.initial = sample_initial({});
  const auto z = lyapunov_max(zero, workers());
  v.detail << " alpha=0 max=" << z.max;
  bool all = true;
  for (double x : z.values) all = all && std::abs(x - std::log(0.2)) <= 1e-6;
  v.require(all, "alpha = 0 gives ln 0.2 +- 1e-6");

  OrbitEnsemble a;
  a.params.alpha1 = a.params.alpha2 = 1.75;
  a.initial = sample_initial({});
  const auto ra = lyapunov_max(a, workers());
  v.detail << " alpha=1.75 max=" << ra.max;
  v.require(ra.max < 0.0, "negative exponent in region (a)");
  report(6, "Lyapunov kernel", v, since(t0));
}

void symmetry(bool extended) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  for (int depth : extended ? std::vector<int>{10, 12} : std::vector<int>{10}) {
    ParamGrid pg;
    pg.alpha1 = pg.alpha2 = Interval(0.0, 20.0);
    pg.n1 = pg.n2 = 4;
    PhaseConfig cfg;
    cfg.bounds = kB;
    cfg.depth = depth;
    const auto res = sweep(pg, cfg, {workers(), {}, {}});
    std::size_t compared = 0, mismatched = 0;
    for (std::uint32_t j = 0; j < 4; ++j)
      for (std::uint32_t i = 0; i < 4; ++i) {
        const auto& a = res[pg.index(i, j)];
        const auto& b = res[pg.index(j, i)];
        if (!a.decomposition || !b.decomposition) {
          ++mismatched;
          continue;
        }
        const MorseDecomposition m = mirror(*a.decomposition);
        const MorseDecomposition& t = *b.decomposition;
        bool same = m.params == t.params && m.order == t.order && m.sets.size() == t.sets.size();
        for (std::size_t k = 0; same && k < m.sets.size(); ++k) {
          const MorseSet& x = m.sets[k];
          const MorseSet& y = t.sets[k];
          same = x.cells == y.cells && x.pictogram == y.pictogram && x.isolation == y.isolation &&
                 x.attractor_certificate == y.attractor_certificate && x.index_pair == y.index_pair &&
                 x.component_map == y.component_map && x.conley.has_value() == y.conley.has_value() &&
                 (!x.conley || (x.conley->homology == y.conley->homology &&
                                x.conley->leray_rank == y.conley->leray_rank));
        }
        ++compared;
        if (!same) ++mismatched;
      }
    v.detail << " depth " << depth << ": " << compared << " pairs, " << mismatched << " mismatched";
    v.require(mismatched == 0, "mirror images at depth " + std::to_string(depth));
  }
  report(7, "4x4 sweep over [0,20]^2: box (i,j) mirrors box (j,i)", v, since(t0));
}

std::map<std::string, std::string> run_in(const fs::path& dir, std::vector<std::string> args, int& code) {
  fs::remove_all(dir);
  args.push_back("--out");
  args.push_back(dir.string());
  std::ostringstream out, err;
  code = cli::run(args, out, err);
  std::map<std::string, std::string> files;
  files["<stdout>"] = out.str();
  if (fs::exists(dir))
    for (const auto& e : fs::directory_iterator(dir)) {
      std::ifstream f(e.path(), std::ios::binary);
      std::ostringstream s;
      s << f.rdbuf();
      files[e.path().filename().string()] = s.str();
    }
  return files;
}

void determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  const fs::path root = fs::temp_directory_path() / ("akdyn_acceptance_" + std::to_string(::getpid()));
  const std::vector<std::vector<std::string>> commands{
      {"analyze", "--alpha1", "4:4.5", "--alpha2", "4:4.5", "--depth", "10", "--ppm", "64"},
      {"sweep", "--alpha-range", "0:20", "--grid", "2x2", "--depth", "9"},
      {"simulate", "--alpha1", "17.5", "--alpha2", "17.5", "--m", "64", "--iters", "2000", "--plot"},
      {"lyapunov", "--alpha", "0:20", "--count", "3", "--samples", "16", "--plot"},
      {"bifdiag", "--count", "40", "--record", "20", "--plot"},
  };
  for (const auto& cmd : commands) {
    int c1 = 0, c2 = 0, c3 = 0;
    auto args = cmd;
    const auto first = run_in(root / "one", args, c1);
    const auto again = run_in(root / "again", args, c2);
    args.insert(args.end(), {"--jobs", "4"});
    const auto parallel = run_in(root / "four", args, c3);
    // The output directory is echoed on stdout; compare only the files.
    auto files = [](std::map<std::string, std::string> m) {
      m.erase("<stdout>");
      return m;
    };
    const bool same = c1 == 0 && c2 == 0 && c3 == 0 && files(first).size() > 0 && files(first) == files(again) &&
                      files(first) == files(parallel);
    v.detail << " " << cmd[0] << (same ? "=same" : "=differs") << "(" << files(first).size() << " files)";
    v.require(same, cmd[0] + " byte-identical across runs and --jobs");
  }
  fs::remove_all(root);
  report(8, "determinism across repeated runs and worker counts", v, since(t0));
}

}  // namespace

int main(int argc, char** argv) {
  bool extended = false;
  std::vector<std::string> suites;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--extended") {
      extended = true;
    } else if (a == "--suite" && k + 1 < argc) {
      suites.emplace_back(argv[++k]);
    } else {
      std::cerr << "usage: acceptance [--extended] [--suite PATH]...\n";
      return 64;
    }
  }
  try {
    depth_study();
    diagonal_regions();
    absorbing_certificate();
    property_suites(suites);
    cross_validation(extended);
    lyapunov();
    symmetry(extended);
    determinism();
  } catch (const std::exception& e) {
    std::cout << "aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
