#include "akdyn/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace akdyn {
namespace {

double ipow(double x, unsigned n) {
  double r = 1.0;
  for (unsigned k = 0; k < n; ++k) r *= x;
  return r;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void Params::validate() const {
  require(std::isfinite(alpha1) && alpha1 >= 0.0, "alpha1 must be >= 0");
  require(std::isfinite(alpha2) && alpha2 >= 0.0, "alpha2 must be >= 0");
  require(beta1 >= 0.0 && beta1 < 1.0, "beta1 must lie in [0,1)");
  require(beta2 >= 0.0 && beta2 < 1.0, "beta2 must lie in [0,1)");
  require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must lie in [0,1]");
  require(n >= 1, "n must be >= 1");
}

ParamBox ParamBox::point(const Params& p) {
  return {p.alpha1, p.alpha2, p.beta1, p.beta2, p.epsilon, p.n};
}

Params ParamBox::lower_corner() const {
  return {alpha1.lo(), alpha2.lo(), beta1.lo(), beta2.lo(), epsilon.lo(), n};
}

void ParamBox::validate() const {
  require(alpha1.lo() >= 0.0, "alpha1 must be >= 0");
  require(alpha2.lo() >= 0.0, "alpha2 must be >= 0");
  require(beta1.lo() >= 0.0 && beta1.hi() < 1.0, "beta1 must lie in [0,1)");
  require(beta2.lo() >= 0.0 && beta2.hi() < 1.0, "beta2 must lie in [0,1)");
  require(epsilon.lo() >= 0.0 && epsilon.hi() <= 1.0, "epsilon must lie in [0,1]");
  require(n >= 1, "n must be >= 1");
}

// The coupled sums are formed as 1 + (a + b) so that swapping the roles of
// x and y (with swapped parameters) reproduces bit-identical results.
State eval_point(const Params& p, const State& s) {
  const double xn = ipow(s.x, p.n);
  const double yn = ipow(s.y, p.n);
  const double d1 = 1.0 + ((1.0 - p.epsilon) * xn + p.epsilon * yn);
  const double d2 = 1.0 + (p.epsilon * xn + (1.0 - p.epsilon) * yn);
  return {p.alpha1 / d1 + p.beta1 * s.x, p.alpha2 / d2 + p.beta2 * s.y};
}

IRect eval_box(const ParamBox& P, const IRect& r) {
  if (r.x.lo() < 0.0 || r.y.lo() < 0.0) {
    throw std::invalid_argument("eval_box requires a rectangle in the nonnegative quadrant");
  }
  const Interval one(1.0);
  const Interval xn = pow_nat(r.x, P.n);
  const Interval yn = pow_nat(r.y, P.n);
  const Interval keep = one - P.epsilon;
  const Interval d1 = one + (keep * xn + P.epsilon * yn);
  const Interval d2 = one + (P.epsilon * xn + keep * yn);
  return {P.alpha1 / d1 + P.beta1 * r.x, P.alpha2 / d2 + P.beta2 * r.y};
}

Matrix2 jacobian(const Params& p, const State& s) {
  const double n = static_cast<double>(p.n);
  const double xn = ipow(s.x, p.n);
  const double yn = ipow(s.y, p.n);
  const double xn1 = ipow(s.x, p.n - 1);
  const double yn1 = ipow(s.y, p.n - 1);
  const double d1 = 1.0 + ((1.0 - p.epsilon) * xn + p.epsilon * yn);
  const double d2 = 1.0 + (p.epsilon * xn + (1.0 - p.epsilon) * yn);
  const double g1 = p.alpha1 * n / (d1 * d1);
  const double g2 = p.alpha2 * n / (d2 * d2);
  Matrix2 j{};
  j[0][0] = -g1 * (1.0 - p.epsilon) * xn1 + p.beta1;
  j[0][1] = -g1 * p.epsilon * yn1;
  j[1][0] = -g2 * p.epsilon * xn1;
  j[1][1] = -g2 * (1.0 - p.epsilon) * yn1 + p.beta2;
  return j;
}

namespace {

double tidy_upper_bound(const Interval& b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", b.hi());
  const double v = std::strtod(buf, nullptr);
  return b.contains(v) ? v : b.hi();
}

}  // namespace

IRect absorbing_box(const ParamBox& P, double c1, double c2) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("absorbing_box: c1, c2 must be > 0");
  if (P.beta1.hi() >= 1.0 || P.beta2.hi() >= 1.0) {
    throw std::invalid_argument("absorbing_box: upper bound of beta must be < 1");
  }
  const Interval one(1.0);
  const Interval b1 = (Interval(P.alpha1.hi()) + Interval(c1)) / (one - Interval(P.beta1.hi()));
  const Interval b2 = (Interval(P.alpha2.hi()) + Interval(c2)) / (one - Interval(P.beta2.hi()));
  return {Interval(0.0, tidy_upper_bound(b1)), Interval(0.0, tidy_upper_bound(b2))};
}

namespace {

// Interior relative to the phase space [0,inf): a lower edge at 0 is part of
// the boundary of the phase space, not of B.
bool inside_edge(const Interval& box, const Interval& image) {
  const bool lower_ok = box.lo() == 0.0 ? image.lo() >= 0.0 : image.lo() > box.lo();
  return lower_ok && image.hi() < box.hi();
}

}  // namespace

bool verify_absorbing(const ParamBox& P, const IRect& B) {
  const IRect image = eval_box(P, B);
  return inside_edge(B.x, image.x) && inside_edge(B.y, image.y);
}

}  // namespace akdyn
