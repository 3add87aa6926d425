#include "akdyn/interval.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>

namespace akdyn {
namespace rounding {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude FMA residuals may be inexact because of gradual
// underflow; results there are widened by one ulp unconditionally.
constexpr double kTiny = 0x1p-960;

double checked(double x) {
  if (!std::isfinite(x)) throw IntervalOverflow();
  return x;
}

// Exact error of s = fl(a + b): a + b = s + e.
double two_sum_error(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

}  // namespace

double next_up(double x) { return std::nextafter(x, kInf); }
double next_down(double x) { return std::nextafter(x, -kInf); }

double add_down(double a, double b) {
  const double s = checked(a + b);
  return two_sum_error(a, b, s) < 0.0 ? next_down(s) : s;
}

double add_up(double a, double b) {
  const double s = checked(a + b);
  return two_sum_error(a, b, s) > 0.0 ? next_up(s) : s;
}

double sub_down(double a, double b) { return add_down(a, -b); }
double sub_up(double a, double b) { return add_up(a, -b); }

double mul_down(double a, double b) {
  const double p = checked(a * b);
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::fabs(p) < kTiny) return next_down(p);
  return std::fma(a, b, -p) < 0.0 ? next_down(p) : p;
}

double mul_up(double a, double b) {
  const double p = checked(a * b);
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::fabs(p) < kTiny) return next_up(p);
  return std::fma(a, b, -p) > 0.0 ? next_up(p) : p;
}

namespace {

// Sign of a/b - fl(a/b): +1 if the quotient was rounded down, -1 if up.
int div_residual_sign(double a, double b, double q) {
  const double r = std::fma(-q, b, a);
  if (r == 0.0) return 0;
  return ((r > 0.0) == (b > 0.0)) ? 1 : -1;
}

}  // namespace

double div_down(double a, double b) {
  const double q = checked(a / b);
  if (a == 0.0) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_down(q);
  return div_residual_sign(a, b, q) < 0 ? next_down(q) : q;
}

double div_up(double a, double b) {
  const double q = checked(a / b);
  if (a == 0.0) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_up(q);
  return div_residual_sign(a, b, q) > 0 ? next_up(q) : q;
}

}  // namespace rounding

using namespace rounding;

Interval::Interval(double v) : Interval(v, v) {}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi)) throw std::invalid_argument("interval endpoint is NaN");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw IntervalOverflow();
  if (lo > hi) throw std::invalid_argument("interval with lo > hi");
}

namespace {

double parse_rounded(const std::string& text, int mode) {
  const int saved = std::fegetround();
  std::fesetround(mode);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  std::fesetround(saved);
  if (end == text.c_str() || *end != '\0') {
    throw std::invalid_argument("malformed number '" + text + "'");
  }
  return v;
}

}  // namespace

Interval Interval::from_decimal(std::string_view text) {
  const std::string s(text);
  return Interval(parse_rounded(s, FE_DOWNWARD), parse_rounded(s, FE_UPWARD));
}

Interval Interval::from_decimal(std::string_view lo, std::string_view hi) {
  return hull(from_decimal(lo), from_decimal(hi));
}

double Interval::width() const { return sub_up(hi_, lo_); }

Interval operator+(const Interval& a, const Interval& b) {
  return {add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi())};
}

Interval operator-(const Interval& a, const Interval& b) {
  return {sub_down(a.lo(), b.hi()), sub_up(a.hi(), b.lo())};
}

Interval operator-(const Interval& a) { return {-a.hi(), -a.lo()}; }

Interval operator*(const Interval& a, const Interval& b) {
  // Nonnegative operands dominate the model evaluation.
  if (a.lo() >= 0.0 && b.lo() >= 0.0) {
    return {mul_down(a.lo(), b.lo()), mul_up(a.hi(), b.hi())};
  }
  const double lo = std::min({mul_down(a.lo(), b.lo()), mul_down(a.lo(), b.hi()),
                              mul_down(a.hi(), b.lo()), mul_down(a.hi(), b.hi())});
  const double hi = std::max({mul_up(a.lo(), b.lo()), mul_up(a.lo(), b.hi()),
                              mul_up(a.hi(), b.lo()), mul_up(a.hi(), b.hi())});
  return {lo, hi};
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains(0.0)) throw DivisionByZeroInterval();
  const double lo = std::min({div_down(a.lo(), b.lo()), div_down(a.lo(), b.hi()),
                              div_down(a.hi(), b.lo()), div_down(a.hi(), b.hi())});
  const double hi = std::max({div_up(a.lo(), b.lo()), div_up(a.lo(), b.hi()),
                              div_up(a.hi(), b.lo()), div_up(a.hi(), b.hi())});
  return {lo, hi};
}

namespace {

// x >= 0; repeated directed multiplication is monotone on the nonnegatives.
double pow_down(double x, unsigned n) {
  double r = x;
  for (unsigned k = 1; k < n; ++k) r = mul_down(r, x);
  return r;
}

double pow_up(double x, unsigned n) {
  double r = x;
  for (unsigned k = 1; k < n; ++k) r = mul_up(r, x);
  return r;
}

}  // namespace

Interval pow_nat(const Interval& a, unsigned n) {
  if (n == 0) throw std::invalid_argument("pow_nat requires n >= 1");
  const bool even = n % 2 == 0;
  if (a.lo() >= 0.0) return {pow_down(a.lo(), n), pow_up(a.hi(), n)};
  if (a.hi() <= 0.0) {
    if (even) return {pow_down(-a.hi(), n), pow_up(-a.lo(), n)};
    return {-pow_up(-a.lo(), n), -pow_down(-a.hi(), n)};
  }
  if (even) return {0.0, pow_up(std::max(-a.lo(), a.hi()), n)};
  return {-pow_up(-a.lo(), n), pow_up(a.hi(), n)};
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

std::ostream& operator<<(std::ostream& os, const Interval& x) { return os << to_string(x); }

std::string to_string(const Interval& x) {
  std::ostringstream os;
  os.precision(17);
  os << '[' << x.lo() << ", " << x.hi() << ']';
  return os.str();
}

}  // namespace akdyn
