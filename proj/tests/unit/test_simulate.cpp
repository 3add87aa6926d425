#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "akdyn/simulate.hpp"

using namespace akdyn;

namespace {

const IRect kB{Interval(0.0, 101.0), Interval(0.0, 101.0)};

Params diagonal(double a) {
  Params p;
  p.alpha1 = p.alpha2 = a;
  return p;
}

// Distinct points after rounding to a 1e-6 lattice.
std::vector<State> distinct(const std::vector<State>& pts) {
  std::map<std::pair<long long, long long>, State> m;
  for (const State& s : pts) m.emplace(std::make_pair(std::llround(s.x * 1e6), std::llround(s.y * 1e6)), s);
  std::vector<State> out;
  for (const auto& [k, s] : m) out.push_back(s);
  return out;
}

double fixed_point_by_bisection(double alpha, double beta, unsigned n) {
  auto g = [&](double x) { return alpha / (1.0 + std::pow(x, n)) + beta * x - x; };
  double lo = 0.0, hi = alpha / (1.0 - beta) + 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("attractor scan") {
  SUBCASE("zero iterations return the start grid") {
    const auto pts = attractor_scan(diagonal(5.0), kB, {4, 0, 1});
    REQUIRE(pts.size() == 16);
    CHECK(pts[0] == scan_start(kB, 4, 0, 0));
    CHECK(pts[6] == scan_start(kB, 4, 2, 1));
    CHECK(pts[6].x == doctest::Approx(101.0 * 2.5 / 4));
    CHECK(pts[6].y == doctest::Approx(101.0 * 1.25 / 4));
    for (const State& s : pts) CHECK(s.x != s.y);
  }
  SUBCASE("alpha = 1.75 settles in a set of diameter below 1") {
    const auto pts = attractor_scan(diagonal(1.75), kB, {64, 10000, 1});
    double diam = 0.0;
    for (const State& a : pts)
      for (const State& b : {pts.front(), pts.back()}) diam = std::max(diam, std::hypot(a.x - b.x, a.y - b.y));
    CHECK(diam < 1.0);
  }
  SUBCASE("two period-4 orbits") {
    const Params p = diagonal(17.5);
    const auto pts = distinct(attractor_scan(p, kB, {64, 10000, 1}));
    REQUIRE(pts.size() == 8);
    std::vector<int> orbit(8, -1);
    int orbits = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      if (orbit[k] >= 0) continue;
      State s = pts[k];
      for (int step = 1; step <= 4; ++step) {
        s = eval_point(p, s);
        const auto it = std::find_if(pts.begin(), pts.end(),
                                     [&](const State& q) { return std::hypot(q.x - s.x, q.y - s.y) < 1e-6; });
        REQUIRE(it != pts.end());
        orbit[static_cast<std::size_t>(it - pts.begin())] = orbits;
        if (step < 4) CHECK(std::hypot(s.x - pts[k].x, s.y - pts[k].y) > 1e-3);
      }
      CHECK(std::hypot(s.x - pts[k].x, s.y - pts[k].y) < 1e-6);
      ++orbits;
    }
    CHECK(orbits == 2);
  }
  SUBCASE("threads do not change the result") {
    const Params p = diagonal(30.0);
    CHECK(attractor_scan(p, kB, {16, 500, 1}) == attractor_scan(p, kB, {16, 500, 3}));
  }
  CHECK_THROWS_AS(attractor_scan(diagonal(1.0), kB, {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("largest Lyapunov exponent") {
  const auto inits = sample_initial({}, 128, 1);
  REQUIRE(inits.size() == 128);
  for (const State& s : inits) {
    CHECK(s.x >= s.y);
    CHECK(s.y >= 0.01);
    CHECK(s.x <= 50.0);
  }
  CHECK(sample_initial({}, 128, 1) == inits);

  SUBCASE("decoupled linear regime") {
    const auto r = lyapunov_max(OrbitEnsemble{diagonal(0.0), inits, 5000, 1000});
    for (const double v : r.values) CHECK(v == doctest::Approx(std::log(0.2)).epsilon(1e-12));
    CHECK(r.mean == doctest::Approx(std::log(0.2)));
  }
  SUBCASE("tent harness") {
    std::vector<State> starts;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 16; ++k) starts.push_back({u(rng), u(rng)});
    const auto r = lyapunov_max(tent_harness(), starts, 5000, 1000);
    for (const double v : r.values) CHECK(std::abs(v - std::log(2.0)) <= 0.01);
  }
  SUBCASE("negative exponent at alpha = 1.75") {
    const auto r = lyapunov_max(OrbitEnsemble{diagonal(1.75), inits, 5000, 1000});
    CHECK(r.max < 0.0);
    CHECK(r.mean <= r.max);
  }
  SUBCASE("summary and threads") {
    const OrbitEnsemble e{diagonal(30.0), std::vector<State>(inits.begin(), inits.begin() + 12), 500, 300};
    const auto a = lyapunov_max(e, 1), b = lyapunov_max(e, 4);
    CHECK(a.values == b.values);
    CHECK(a.max == *std::max_element(a.values.begin(), a.values.end()));
  }
  SUBCASE("non-finite states are reported") {
    PlaneMap blowup{[](const State& s) { return State{s.x * 1e300, s.y}; },
                    [](const State&) { return Matrix2{{{1.0, 0.0}, {0.0, 1.0}}}; }};
    CHECK_THROWS_AS(lyapunov_max(blowup, {{1.0, 1.0}}, 0, 5), std::runtime_error);
    CHECK_THROWS_AS(lyapunov_max(blowup, {{1.0, 1.0}, {2.0, 2.0}}, 0, 5, 2), std::runtime_error);
  }
  CHECK_THROWS_AS(lyapunov_max(tent_harness(), inits, 0, 0), std::invalid_argument);
}

TEST_CASE("tangent propagation matches orbit separation") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> alpha(0.5, 40.0), coord(0.05, 40.0), angle(0.0, 6.283185307179586);
  int checked = 0;
  for (int run = 0; run < 100; ++run) {
    Params p;
    p.alpha1 = alpha(rng);
    p.alpha2 = alpha(rng);
    const State s0{coord(rng), coord(rng)};
    const double th = angle(rng);
    double vx = std::cos(th), vy = std::sin(th);
    State s = s0;
    for (int step = 0; step < 4; ++step) {
      const Matrix2 J = jacobian(p, s);
      const double wx = J[0][0] * vx + J[0][1] * vy, wy = J[1][0] * vx + J[1][1] * vy;
      vx = wx;
      vy = wy;
      s = eval_point(p, s);
    }
    const double h = 1e-7;
    State q{s0.x + h * std::cos(th), s0.y + h * std::sin(th)};
    for (int step = 0; step < 4; ++step) q = eval_point(p, q);
    const double tangent = std::hypot(vx, vy);
    const double separation = std::hypot(q.x - s.x, q.y - s.y) / h;
    if (tangent < 1e-6) continue;  // separation is then dominated by rounding
    CHECK(std::abs(separation / tangent - 1.0) < 0.05);
    ++checked;
  }
  CHECK(checked >= 90);
}

TEST_CASE("bifurcation diagram") {
  BifurcationOptions o;
  o.count = 2;
  o.record = 50;
  o.burn_in = 1000;
  auto pts = bifurcation_diagram(o);
  REQUIRE(pts.size() == 100);
  CHECK(pts.front().alpha == 22.5);
  CHECK(pts.back().alpha == 36.0);
  CHECK(std::count_if(pts.begin(), pts.end(), [](const auto& b) { return b.alpha == 22.5; }) == 50);

  o.alpha_lo = 0.5;
  o.alpha_hi = 1.5;
  o.count = 6;
  pts = bifurcation_diagram(o);
  for (std::size_t k = 0; k < o.count; ++k) {
    const auto first = pts.begin() + static_cast<long>(k * o.record);
    const auto [lo, hi] = std::minmax_element(first, first + static_cast<long>(o.record),
                                              [](const auto& a, const auto& b) { return a.value < b.value; });
    CHECK(hi->value - lo->value < 1e-9);
  }
  o.threads = 3;
  const auto again = bifurcation_diagram(o);
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(again[k].value == pts[k].value);
  o.projection = Projection::y;
  o.alpha_lo = 30.0;
  o.alpha_hi = 31.0;
  o.count = 2;
  Params p = diagonal(31.0);
  State s = o.start;
  for (std::uint64_t t = 0; t < o.burn_in + o.record; ++t) s = eval_point(p, s);
  CHECK(bifurcation_diagram(o).back().value == s.y);
  o.count = 1;
  CHECK_THROWS_AS(bifurcation_diagram(o), std::invalid_argument);
}

TEST_CASE("diagonal orbits") {
  SUBCASE("fixed point") {
    const double x = fixed_point_by_bisection(1.5, 0.2, 3);
    for (const double v : diagonal_orbit(1.5, 0.2, 3, x, 100)) CHECK(std::abs(v - x) < 1e-10);
  }
  SUBCASE("agrees with the planar map on the diagonal") {
    for (const double eps : {0.0, 0.5}) {
      Params p = diagonal(27.0);
      p.epsilon = eps;
      const auto orbit = diagonal_orbit(27.0, 0.2, 3, 3.3, 100);
      State s{3.3, 3.3};
      for (std::size_t t = 1; t <= 100; ++t) {
        s = eval_point(p, s);
        CHECK(s.x == orbit[t]);
      }
    }
  }
  SUBCASE("diagonal is invariant") {
    const Params p = diagonal(17.5);
    State s{4.2, 4.2};
    for (int t = 0; t < 1000; ++t) {
      s = eval_point(p, s);
      REQUIRE(s.x == s.y);
    }
  }
  SUBCASE("geometric decay without production") {
    const auto orbit = diagonal_orbit(0.0, 0.2, 3, 7.0, 20);
    for (std::size_t t = 0; t <= 20; ++t) CHECK(orbit[t] == doctest::Approx(7.0 * std::pow(0.2, t)).epsilon(1e-12));
  }
}
