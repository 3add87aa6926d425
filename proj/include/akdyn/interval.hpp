#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace akdyn {

/// Raised when an interval endpoint would leave the finite doubles.
class IntervalOverflow : public std::overflow_error {
 public:
  IntervalOverflow() : std::overflow_error("interval overflow") {}
};

/// Raised by division when the divisor contains zero.
class DivisionByZeroInterval : public std::domain_error {
 public:
  DivisionByZeroInterval() : std::domain_error("division by interval containing zero") {}
};

/// Directed-rounding primitives on doubles.
///
/// Each function returns a double that is a lower (`_down`) or upper (`_up`)
/// bound of the exact real result. When the exact result is representable
/// it is returned unchanged; otherwise the nearest double on the requested
/// side. Inexactness is detected with error-free transformations (TwoSum,
/// FMA residuals), so no rounding-mode switching is required.
namespace rounding {

double next_up(double x);
double next_down(double x);

double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);

}  // namespace rounding

/// Closed real interval [lo, hi] with finite double endpoints.
///
/// All arithmetic rounds outward: the returned interval contains every exact
/// result x∘y for x in the first operand and y in the second.
class Interval {
 public:
  constexpr Interval() = default;
  /// Degenerate interval [v, v].
  Interval(double v);  // NOLINT(google-explicit-constructor)
  Interval(double lo, double hi);

  /// Tightest interval containing the real number written in `text`
  /// (a decimal literal such as "0.2"); exact literals give width 0.
  static Interval from_decimal(std::string_view text);
  /// Interval hull of two decimal literals.
  static Interval from_decimal(std::string_view lo, std::string_view hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Width rounded up.
  double width() const;
  double mid() const { return lo_ * 0.5 + hi_ * 0.5; }
  bool is_degenerate() const { return lo_ == hi_; }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }
  /// `other` lies in the open interval (lo, hi).
  bool strictly_contains(const Interval& other) const { return lo_ < other.lo_ && other.hi_ < hi_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);

/// {x^n : x in a}, tight on sign-definite inputs and folded at zero for
/// even powers of intervals that straddle it.
Interval pow_nat(const Interval& a, unsigned n);

Interval hull(const Interval& a, const Interval& b);

std::ostream& operator<<(std::ostream& os, const Interval& x);
std::string to_string(const Interval& x);

}  // namespace akdyn
