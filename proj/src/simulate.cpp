#include "akdyn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>

namespace akdyn {

namespace {

// Runs body(k) for k in [0, n) on up to `threads` threads, in contiguous
// chunks; results must be written to per-k slots.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  const unsigned t = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
  if (t <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> failure(t);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = n * w / t; k < n * (w + 1) / t; ++k) body(k);
      } catch (...) {
        failure[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (const auto& e : failure)
    if (e) std::rethrow_exception(e);
}

}  // namespace

State scan_start(const IRect& box, std::uint32_t m, std::uint32_t i, std::uint32_t j) {
  const double wx = (box.x.hi() - box.x.lo()) / m;
  const double wy = (box.y.hi() - box.y.lo()) / m;
  return {box.x.lo() + (i + 0.5) * wx, box.y.lo() + (j + 0.25) * wy};
}

std::vector<State> attractor_scan(const Params& p, const IRect& box, const ScanOptions& options) {
  if (options.m == 0) throw std::invalid_argument("scan needs m >= 1");
  const std::uint32_t m = options.m;
  std::vector<State> out(std::size_t{m} * m);
  parallel_for(m, options.threads, [&](std::size_t j) {
    for (std::uint32_t i = 0; i < m; ++i) {
      State s = scan_start(box, m, i, static_cast<std::uint32_t>(j));
      for (std::uint64_t t = 0; t < options.iters; ++t) s = eval_point(p, s);
      out[j * m + i] = s;
    }
  });
  return out;
}

PlaneMap model_map(const Params& p) {
  return {[p](const State& s) { return eval_point(p, s); }, [p](const State& s) { return jacobian(p, s); }};
}

PlaneMap tent_harness() {
  return {[](const State& s) { return State{s.x < 0.5 ? 2.0 * s.x : 2.0 * (1.0 - s.x), 0.5 * s.y}; },
          [](const State& s) { return Matrix2{{{s.x < 0.5 ? 2.0 : -2.0, 0.0}, {0.0, 0.5}}}; }};
}

LyapunovSummary lyapunov_max(const PlaneMap& map, const std::vector<State>& inits, std::uint64_t burn_in,
                             std::uint64_t iters, unsigned threads) {
  if (iters == 0) throw std::invalid_argument("lyapunov_max needs iters >= 1");
  if (inits.empty()) throw std::invalid_argument("lyapunov_max needs at least one initial condition");
  LyapunovSummary out;
  out.values.resize(inits.size());
  parallel_for(inits.size(), threads, [&](std::size_t k) {
    auto check = [](const State& s) {
      if (!std::isfinite(s.x) || !std::isfinite(s.y)) throw std::runtime_error("non-finite state in orbit");
    };
    State s = inits[k];
    for (std::uint64_t t = 0; t < burn_in; ++t) s = map.f(s);
    check(s);
    double vx = 1.0 / std::sqrt(1.25), vy = 0.5 / std::sqrt(1.25);
    double sum = 0.0;
    for (std::uint64_t t = 0; t < iters; ++t) {
      const Matrix2 J = map.df(s);
      const double wx = J[0][0] * vx + J[0][1] * vy;
      const double wy = J[1][0] * vx + J[1][1] * vy;
      const double len = std::hypot(wx, wy);
      sum += std::log(len);
      vx = wx / len;
      vy = wy / len;
      s = map.f(s);
      check(s);
    }
    out.values[k] = sum / static_cast<double>(iters);
  });
  double total = 0.0;
  out.max = out.values.front();
  for (const double v : out.values) {
    total += v;
    out.max = std::max(out.max, v);
  }
  out.mean = total / static_cast<double>(out.values.size());
  return out;
}

LyapunovSummary lyapunov_max(const OrbitEnsemble& e, unsigned threads) {
  return lyapunov_max(model_map(e.params), e.initial, e.burn_in, e.recorded, threads);
}

std::vector<State> sample_initial(const SampleRegion& r, std::size_t count, std::uint64_t seed) {
  if (!(r.lo <= r.hi) || r.lo < 0.0) throw std::invalid_argument("invalid sampling region");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(r.lo, r.hi);
  std::vector<State> out;
  out.reserve(count);
  while (out.size() < count) {
    State s{u(rng), u(rng)};
    if (r.upper_half && s.x < s.y) std::swap(s.x, s.y);
    out.push_back(s);
  }
  return out;
}

std::vector<BifurcationPoint> bifurcation_diagram(const BifurcationOptions& o) {
  if (o.count < 2) throw std::invalid_argument("bifurcation diagram needs count >= 2");
  std::vector<BifurcationPoint> out(std::size_t{o.count} * o.record);
  parallel_for(o.count, o.threads, [&](std::size_t k) {
    Params p = o.base;
    const double a = o.alpha_lo + (o.alpha_hi - o.alpha_lo) * static_cast<double>(k) / (o.count - 1);
    p.alpha1 = p.alpha2 = a;
    State s = o.start;
    for (std::uint64_t t = 0; t < o.burn_in; ++t) s = eval_point(p, s);
    for (std::uint64_t t = 0; t < o.record; ++t) {
      s = eval_point(p, s);
      out[k * o.record + t] = {a, o.projection == Projection::x ? s.x : s.y};
    }
  });
  return out;
}

std::vector<double> diagonal_orbit(double alpha, double beta, unsigned n, double x0, std::uint64_t iters) {
  if (x0 < 0.0) throw std::invalid_argument("diagonal orbit starts in the quadrant");
  std::vector<double> out{x0};
  out.reserve(iters + 1);
  double x = x0;
  for (std::uint64_t t = 0; t < iters; ++t) {
    double xn = 1.0;
    for (unsigned k = 0; k < n; ++k) xn *= x;
    x = alpha / (1.0 + xn) + beta * x;
    out.push_back(x);
  }
  return out;
}

}  // namespace akdyn
