#include <cmath>

#include "doctest.h"
#include "harnacklab/barriers.hpp"
#include "harnacklab/grushin_geometry.hpp"

using namespace hlab;
using namespace hlab::barriers;

namespace {

// L v at x from central differences of v (Grushin form, Y = x1 d/dx2).
template <typename F>
double fd_L(F&& v, const Coeffs& a, const Point2& x, double h) {
  auto at = [&](double d1, double d2) { return v(Point2{x.x1 + d1, x.x2 + d2}); };
  double v11 = (at(h, 0) - 2 * at(0, 0) + at(-h, 0)) / (h * h);
  double v22 = (at(0, h) - 2 * at(0, 0) + at(0, -h)) / (h * h);
  double v12 = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  return a.a11 * v11 + a.a22 * x.x1 * x.x1 * v22 + 2 * a.a12 * x.x1 * v12;
}

}  // namespace

TEST_CASE("barrier exponent") {
  CHECK(barrier_alpha(1.0, 1.0) == doctest::Approx(-6.0));
  CHECK(barrier_alpha(1.0, 1.5) == doctest::Approx(-11.0));
  CHECK(barrier_alpha(2.0, 1.0 * 2.0) == doctest::Approx(-6.0));
}

TEST_CASE("case classification") {
  CHECK(classify({0.5, 0.0}, 1.0) == BarrierCase::I);
  CHECK(classify({-3.0, 2.0}, 1.0) == BarrierCase::II);
  CHECK(classify({1.5, 0.0}, 1.0) == BarrierCase::III);
  CHECK(classify({2.5, 0.0}, 1.0) == BarrierCase::IV);
  CHECK(classify({1.0, 0.0}, 1.0) == BarrierCase::III);
}

TEST_CASE("case I normalization at alpha = -6") {
  // sigma = r on the inner boundary, 3r on the outer one:
  // M2 - M1 = 1, M2 3^-6 - M1 = 0
  auto s = db_barrier_constants({0.0, 0.0}, 1.0, -6.0);
  CHECK(s.case_id == BarrierCase::I);
  CHECK(s.M1 == doctest::Approx(1.0 / 728.0).epsilon(1e-15));
  CHECK(s.M2 == doctest::Approx(729.0 / 728.0).epsilon(1e-15));
  CHECK_THROWS_AS(db_barrier_constants({0.0, 0.0}, 1.0, 2.0), InvalidParameter);
}

TEST_CASE("sigma derivatives match central differences") {
  const Point2 y{0.7, -0.3};
  auto s = [&](const Point2& x) { return grushin::sigma(x, y); };
  const double h = 1e-4;
  for (Point2 x : {Point2{1.4, 0.2}, Point2{-0.5, 1.1}, Point2{0.9, -1.0}}) {
    auto d = sigma_derivatives(x, y);
    CHECK(d.sigma == doctest::Approx(s(x)).epsilon(1e-14));
    CHECK(d.d1 == doctest::Approx((s({x.x1 + h, x.x2}) - s({x.x1 - h, x.x2})) / (2 * h)).epsilon(1e-6));
    CHECK(d.d2 == doctest::Approx((s({x.x1, x.x2 + h}) - s({x.x1, x.x2 - h})) / (2 * h)).epsilon(1e-6));
    double d11 = (s({x.x1 + h, x.x2}) - 2 * s(x) + s({x.x1 - h, x.x2})) / (h * h);
    double d22 = (s({x.x1, x.x2 + h}) - 2 * s(x) + s({x.x1, x.x2 - h})) / (h * h);
    double d12 = (s({x.x1 + h, x.x2 + h}) - s({x.x1 + h, x.x2 - h}) - s({x.x1 - h, x.x2 + h}) + s({x.x1 - h, x.x2 - h})) /
                 (4 * h * h);
    CHECK(d.d11 == doctest::Approx(d11).epsilon(1e-4));
    CHECK(d.d22 == doctest::Approx(d22).epsilon(1e-4));
    CHECK(d.d12 == doctest::Approx(d12).epsilon(1e-4));
  }
}

TEST_CASE("L sigma^alpha: chain rule, factored form and differences agree") {
  const Point2 y{0.4, 0.1};
  const double alpha = -6.0;
  Coeffs a{1.3, 0.2, 0.9};
  auto v = [&](const Point2& x) { return std::pow(grushin::sigma(x, y), alpha); };
  for (Point2 x : {Point2{1.2, 0.5}, Point2{-0.8, -0.4}, Point2{0.4, 1.5}}) {
    double chain = apply_L_sigma_power(a, alpha, x, y);
    double factored = apply_L_sigma_power_factored(a, alpha, x, y);
    CHECK(factored == doctest::Approx(chain).epsilon(1e-10));
    CHECK(chain == doctest::Approx(fd_L(v, a, x, 1e-4)).epsilon(1e-4));
  }
  CHECK_THROWS_AS(apply_L_sigma_power(a, alpha, y, y), SingularityError);
}

TEST_CASE("random constant coefficients are admissible") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Coeffs a = random_admissible_coeffs(s, 1.0, 1.5);
    CHECK(is_elliptic(a, 1.0, 1.5));
  }
  CHECK(random_admissible_coeffs(7, 1.0, 1.5).a12 == random_admissible_coeffs(7, 1.0, 1.5).a12);
}

TEST_CASE("ring samples lie in the ring") {
  const Point2 y{1.5, 0.25};
  for (const auto& p : ring_samples(y, 1.0, 3.0, 200, 1)) {
    CHECK(grushin::level_h(1.0, p, y) > 1.0);
    CHECK(grushin::level_h(3.0, p, y) < 3.0);
  }
}

TEST_CASE("subsolution in case I and failure at alpha = +2") {
  const Point2 y{0.3, 0.5};
  auto samples = ring_samples(y, 1.0, 3.0, 2000, 0);
  auto spec = db_barrier_constants(y, 1.0, barrier_alpha(1.0, 1.5));
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto rep = verify_subsolution(spec, random_admissible_coeffs(s, 1.0, 1.5), samples);
    CHECK(rep.min_value / rep.scale >= -1e-8);
  }
  auto bad = ring_normalization(y, 1.0, 2.0);
  CHECK(verify_subsolution(bad, Coeffs{}, samples).min_value < 0.0);
}

TEST_CASE("barrier boundary values in case II") {
  const Point2 y{4.0, -0.5};
  auto spec = db_barrier_constants(y, 1.0, -11.0);
  for (const auto& p : h_boundary_samples(y, 1.0, 64)) CHECK(db_barrier_eval(spec, p) == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& p : h_boundary_samples(y, 3.0, 64)) CHECK(std::abs(db_barrier_eval(spec, p)) <= 1e-10);
}
