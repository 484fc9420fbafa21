#include <cmath>
#include <vector>

#include "doctest.h"
#include "harnacklab/quasimetric.hpp"

using namespace hlab;
using namespace hlab::quasimetric;

namespace {
double line(double a, double b) { return std::abs(a - b); }
double line_sq(double a, double b) { return (a - b) * (a - b); }
}  // namespace

TEST_CASE("quasi-triangle constant of a metric is at most 1") {
  std::vector<Triple<double>> t{{0, 2, 1}, {0, 1, 5}, {-1, 3, 0.5}};
  auto est = estimate_quasi_triangle_K(line, std::span<const Triple<double>>(t));
  CHECK(est.value == doctest::Approx(1.0));
  CHECK(est.argmax == 0);
  CHECK(est.used == 3);
}

TEST_CASE("squared distance has quasi-triangle constant 2 at the midpoint") {
  std::vector<Triple<double>> t{{0, 2, 1}, {0, 2, 0.5}};
  auto est = estimate_quasi_triangle_K(line_sq, std::span<const Triple<double>>(t));
  CHECK(est.value == doctest::Approx(2.0));
}

TEST_CASE("quasi-triangle estimate skips and rejects degenerate triples") {
  std::vector<Triple<double>> same{{1, 1, 1}};
  CHECK_THROWS_AS(estimate_quasi_triangle_K(line, std::span<const Triple<double>>(same)), DegenerateInput);
  // zero off the diagonal
  auto broken = [](double a, double b) { return (a == 0 && b == 2) || (a == 2 && b == 0) ? 1.0 : 0.0; };
  std::vector<Triple<double>> t{{0, 2, 1}};
  CHECK_THROWS_AS(estimate_quasi_triangle_K(broken, std::span<const Triple<double>>(t)), MetricAxiomViolation);
}

TEST_CASE("a metric satisfies the Hoelder inequality with alpha = beta = 1") {
  std::vector<Triple<double>> t{{0, 2, 1}, {0, 1, 5}, {-1, 3, 0.5}, {4, -2, 7}};
  auto def = holder_defect(line, 1.0, 1.0, std::span<const Triple<double>>(t));
  CHECK(def.value <= 1e-15);
  auto beta = minimal_holder_beta(line, 1.0, std::span<const Triple<double>>(t));
  CHECK(beta.value <= 1.0 + 1e-15);
  CHECK_THROWS_AS(holder_defect(line, 1.5, 1.0, std::span<const Triple<double>>(t)), InvalidParameter);
}

TEST_CASE("Lebesgue measure on the line doubles exactly") {
  auto interval = [](double, double r) { return 2.0 * r; };
  std::vector<Ball<double>> balls{{0.0, 1.0}, {3.0, 0.1}};
  auto d = doubling_constant(interval, std::span<const Ball<double>>(balls));
  CHECK(d.value == doctest::Approx(2.0));
  CHECK(d.q == doctest::Approx(1.0));
  auto r = reverse_doubling(interval, std::span<const Ball<double>>(balls));
  CHECK(r.value == doctest::Approx(0.5));
  auto empty = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(doubling_constant(empty, std::span<const Ball<double>>(balls)), InvalidMeasure);
}

TEST_CASE("ring modulus of intervals equals the ring width") {
  auto shell = [](double, double inner, double outer) { return 2.0 * (outer - inner); };
  for (double eps : {0.0, 0.1, 0.5}) CHECK(ring_modulus(shell, Ball<double>{0.0, 2.0}, eps).omega == doctest::Approx(eps));
  CHECK_THROWS_AS(ring_modulus(shell, Ball<double>{0.0, 2.0}, 1.0), InvalidParameter);
}

TEST_CASE("space constant validation") {
  CHECK(QuasiMetricSpec::make(1.0, 1.0, 1.0, 8.0, 0.5).q == doctest::Approx(3.0));
  CHECK_THROWS_AS(QuasiMetricSpec::make(0.9, 1.0, 1.0, 2.0, 0.5), InvalidParameter);
  CHECK_THROWS_AS(QuasiMetricSpec::make(1.0, 0.0, 1.0, 2.0, 0.5), InvalidParameter);
  CHECK_THROWS_AS(QuasiMetricSpec::make(1.0, 1.0, 1.0, 1.0, 0.5), InvalidParameter);
  CHECK_THROWS_AS(QuasiMetricSpec::make(1.0, 1.0, 1.0, 2.0, 1.0), InvalidParameter);
}
