#pragma once

#include <array>

#include "akdyn/interval.hpp"

namespace akdyn {

/// Point parameters of the two-gene map.
///
///   x' = alpha1 / (1 + (1-eps) x^n + eps y^n) + beta1 x
///   y' = alpha2 / (1 + eps x^n + (1-eps) y^n) + beta2 y
struct Params {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.2;
  double beta2 = 0.2;
  double epsilon = 0.8;
  unsigned n = 3;

  /// Throws std::invalid_argument when a field is outside its range.
  void validate() const;
};

/// Interval-valued parameters; every parameter in the box is covered by the
/// rigorous evaluations below. `n` stays an integer.
struct ParamBox {
  Interval alpha1;
  Interval alpha2;
  Interval beta1{0.2};
  Interval beta2{0.2};
  Interval epsilon{0.8};
  unsigned n = 3;

  static ParamBox point(const Params& p);
  /// Any point of the box (lower corner), for non-rigorous side computations.
  Params lower_corner() const;
  void validate() const;

  friend bool operator==(const ParamBox&, const ParamBox&) = default;
};

struct State {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const State&, const State&) = default;
};

/// Axis-parallel rectangle with interval sides.
struct IRect {
  Interval x;
  Interval y;

  bool contains(const IRect& r) const { return x.contains(r.x) && y.contains(r.y); }
  /// `r` lies in the open interior of this rectangle.
  bool strictly_contains(const IRect& r) const {
    return x.strictly_contains(r.x) && y.strictly_contains(r.y);
  }
  friend bool operator==(const IRect&, const IRect&) = default;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

State eval_point(const Params& p, const State& s);

/// Outer enclosure of { f_lambda(q) : lambda in P, q in r }.
IRect eval_box(const ParamBox& P, const IRect& r);

/// Analytic Jacobian, row-major: J[0] = (dx'/dx, dx'/dy).
Matrix2 jacobian(const Params& p, const State& s);

/// [0,b1] x [0,b2] with b_i = (sup alpha_i + c_i) / (1 - sup beta_i).
///
/// The bound is computed with outward rounding. When the rounding enclosure
/// of b_i contains a short decimal (at most 12 significant digits), that
/// value is returned instead of the one-ulp-larger upper bound, so the
/// default regime yields exactly [0,101]^2; the absorbing property itself is
/// certified separately by verify_absorbing().
IRect absorbing_box(const ParamBox& P, double c1, double c2);

/// True only if eval_box(P, B) lies in the interior of B. False means
/// "not proven".
bool verify_absorbing(const ParamBox& P, const IRect& B);

}  // namespace akdyn
