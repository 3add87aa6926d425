#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "akdyn/model.hpp"

namespace akdyn {

/// Protocol constants of the orbit experiments.
struct OrbitEnsemble {
  Params params;
  std::vector<State> initial;
  std::uint64_t burn_in = 5000;
  std::uint64_t recorded = 1000;
};

struct ScanOptions {
  std::uint32_t m = 512;
  std::uint64_t iters = 10000;
  unsigned threads = 1;
};

/// Initial point (i, j) of an m x m scan of `box`. The y offset differs from
/// the x offset so that no initial point lies on the diagonal of a square box.
State scan_start(const IRect& box, std::uint32_t m, std::uint32_t i, std::uint32_t j);

/// T-th iterate of every scan start, in row-major order (j outer).
std::vector<State> attractor_scan(const Params& p, const IRect& box, const ScanOptions& options = {});

struct PlaneMap {
  std::function<State(const State&)> f;
  std::function<Matrix2(const State&)> df;
};

PlaneMap model_map(const Params& p);
/// (T(x), y / 2) with the full tent map T; its largest exponent is ln 2.
PlaneMap tent_harness();

struct LyapunovSummary {
  std::vector<double> values;  ///< one per initial condition
  double mean = 0.0;
  double max = 0.0;
};

/// Largest Lyapunov exponent by the tangent-vector method: after `burn_in`
/// steps, the mean log stretch of a renormalized tangent vector over `iters`
/// steps. Throws std::runtime_error on a non-finite state.
LyapunovSummary lyapunov_max(const PlaneMap& map, const std::vector<State>& inits, std::uint64_t burn_in,
                             std::uint64_t iters, unsigned threads = 1);
LyapunovSummary lyapunov_max(const OrbitEnsemble& e, unsigned threads = 1);

/// Region sampled for initial conditions: [lo, hi]^2, optionally restricted to x >= y.
struct SampleRegion {
  double lo = 0.01;
  double hi = 50.0;
  bool upper_half = true;
};

/// `count` deterministic pseudo-random points of the region.
std::vector<State> sample_initial(const SampleRegion& r, std::size_t count = 128, std::uint64_t seed = 1);

enum class Projection { x, y };

struct BifurcationOptions {
  double alpha_lo = 22.5;
  double alpha_hi = 36.0;
  std::uint32_t count = 1000;
  std::uint64_t burn_in = 5000;
  std::uint64_t record = 200;
  State start{1.001, 1.0};
  Projection projection = Projection::x;
  /// beta, epsilon and n; the alphas are overwritten by the sweep value.
  Params base;
  unsigned threads = 1;
};

struct BifurcationPoint {
  double alpha = 0.0;
  double value = 0.0;
};

/// For `count` evenly spaced alpha = alpha1 = alpha2, the projections of
/// `record` post-transient iterates, ordered by alpha.
std::vector<BifurcationPoint> bifurcation_diagram(const BifurcationOptions& options);

/// x_0, ..., x_iters of x' = alpha / (1 + x^n) + beta x.
std::vector<double> diagonal_orbit(double alpha, double beta, unsigned n, double x0, std::uint64_t iters);

}  // namespace akdyn
