#include <doctest.h>

#include <cmath>
#include <random>

#include "akdyn/model.hpp"

using namespace akdyn;

TEST_CASE("jacobian matches central finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(0.05, 30.0), alpha(0.0, 80.0), eps(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Params p{alpha(rng), alpha(rng), 0.2, 0.3, eps(rng), 1u + static_cast<unsigned>(t % 4)};
    const State s{coord(rng), coord(rng)};
    const Matrix2 J = jacobian(p, s);
    const double h = 1e-6 * std::max(1.0, std::max(s.x, s.y));
    const State px = eval_point(p, {s.x + h, s.y}), mx = eval_point(p, {s.x - h, s.y});
    const State py = eval_point(p, {s.x, s.y + h}), my = eval_point(p, {s.x, s.y - h});
    const double fd[2][2] = {{(px.x - mx.x) / (2 * h), (py.x - my.x) / (2 * h)},
                             {(px.y - mx.y) / (2 * h), (py.y - my.y) / (2 * h)}};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) CHECK(J[r][c] == doctest::Approx(fd[r][c]).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("box evaluation encloses sampled point evaluations") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ParamBox P;
  P.alpha1 = Interval(6.0, 6.5);
  P.alpha2 = Interval(4.0, 7.5);
  P.epsilon = Interval::from_decimal("0.94", "0.95");
  long violations = 0;
  for (int t = 0; t < 2000; ++t) {
    const double x0 = 20 * u(rng), y0 = 20 * u(rng), w = u(rng);
    const IRect r{Interval(x0, x0 + w), Interval(y0, y0 + w)};
    const IRect img = eval_box(P, r);
    for (int k = 0; k < 20; ++k) {
      const Params p{6.0 + 0.5 * u(rng), 4.0 + 3.5 * u(rng), 0.2, 0.2, 0.94 + 0.01 * u(rng), 3};
      const State q = eval_point(p, {x0 + w * u(rng), y0 + w * u(rng)});
      violations += !img.x.contains(q.x) || !img.y.contains(q.y);
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("swapping the coordinates mirrors evaluations exactly") {
  const Params p{17.5, 17.5, 0.2, 0.2, 0.8, 3};
  const State a = eval_point(p, {1.25, 3.5});
  const State b = eval_point(p, {3.5, 1.25});
  CHECK(a.x == b.y);
  CHECK(a.y == b.x);
  ParamBox P = ParamBox::point(p);
  const IRect ra = eval_box(P, {Interval(1.0, 2.0), Interval(3.0, 3.5)});
  const IRect rb = eval_box(P, {Interval(3.0, 3.5), Interval(1.0, 2.0)});
  CHECK(ra.x == rb.y);
  CHECK(ra.y == rb.x);
}

TEST_CASE("zero production reduces to linear decay") {
  const Params p{0.0, 0.0, 0.2, 0.2, 0.8, 3};
  const State s = eval_point(p, {5.0, 10.0});
  CHECK(s.x == doctest::Approx(1.0));
  CHECK(s.y == doctest::Approx(2.0));
}

TEST_CASE("absorbing box for the default regime") {
  ParamBox P;
  P.alpha1 = Interval(0.0, 80.0);
  P.alpha2 = Interval(0.0, 80.0);
  P.beta1 = P.beta2 = Interval::from_decimal("0.2");
  P.epsilon = Interval::from_decimal("0.8");
  const IRect B = absorbing_box(P, 0.8, 0.8);
  CHECK(B.x == Interval(0.0, 101.0));
  CHECK(B.y == Interval(0.0, 101.0));
  CHECK(verify_absorbing(P, B));
  CHECK_FALSE(verify_absorbing(P, {Interval(0.0, 1.0), Interval(0.0, 1.0)}));
}

TEST_CASE("validation") {
  Params p{1.0, 1.0, 1.0, 0.2, 0.8, 3};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  ParamBox P;
  P.alpha1 = Interval(-1.0, 1.0);
  CHECK_THROWS_AS(P.validate(), std::invalid_argument);
  CHECK_THROWS_AS(eval_box(ParamBox{}, {Interval(-1.0, 0.0), Interval(0.0, 1.0)}), std::invalid_argument);
}
