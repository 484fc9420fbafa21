#include <cmath>

#include "doctest.h"
#include "harnacklab/harness.hpp"

using namespace hlab;
using namespace hlab::harness;
using pde::Grid;
using pde::GridFunction;

namespace {
const grushin::Rect kWide{{-1.5, -1.5}, {1.5, 1.5}};
}

TEST_CASE("S-norm of f = 1 on the unit box") {
  // diam = 2 sqrt 2, ||x1||_{L2([-1,1]^2)} = 2/sqrt 3
  Grid g = Grid::make(kWide, 301, 301);
  auto s = compute_S(grushin::RegionDescriptor::box({0, 0}, 1.0), GridFunction(g, 1.0));
  const double want = 2.0 * std::sqrt(2.0) * 2.0 / std::sqrt(3.0);
  CHECK(want == doctest::Approx(3.2660).epsilon(1e-4));
  CHECK(s.diameter == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  // node quadrature on an open box: error O(h)
  CHECK(s.value == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("S-norm is monotone in the region") {
  Grid g = Grid::make(kWide, 121, 121);
  auto f = GridFunction::sample(g, [](const Point2& p) { return std::cos(p.x1) + p.x2; });
  for (auto kind : {grushin::RegionKind::Box, grushin::RegionKind::BTilde}) {
    double small = compute_S(ball(kind, {0.2, 0.1}, 0.4), f).value;
    double large = compute_S(ball(kind, {0.2, 0.1}, 0.8), f).value;
    CHECK(small <= large + 1e-12);
  }
}

TEST_CASE("node statistics") {
  Grid g = Grid::make(kWide, 31, 31);
  auto u = GridFunction::sample(g, [](const Point2& p) { return p.x1; });
  auto st = node_stats(u, grushin::RegionDescriptor::box({0, 0}, 1.0));
  // h = 0.1, open box: x1 in {-0.9, ..., 0.9}
  CHECK(st.inf == doctest::Approx(-0.9));
  CHECK(st.sup == doctest::Approx(0.9));
  CHECK(st.count == 19 * 19);
  CHECK(st.measure == doctest::Approx(19 * 19 * 0.01));
  CHECK_THROWS_AS(node_stats(u, grushin::RegionDescriptor::box({1.2, 0}, 1.0)), InvalidParameter);
  CHECK_THROWS_AS(node_stats(u, grushin::RegionDescriptor::box({0.05, 0.05}, 0.01)), DegenerateInput);
}

TEST_CASE("Harnack quotient trivial cases") {
  Grid g = Grid::make(kWide, 31, 31);
  GridFunction zero_f(g, 0.0);
  CHECK(harnack_quotient(GridFunction(g, 5.0), zero_f, {0, 0}, 0.3, 2.0) == 1.0);
  CHECK_THROWS_AS(harnack_quotient(GridFunction(g, 0.0), zero_f, {0, 0}, 0.3, 2.0), DegenerateInput);
}

TEST_CASE("Harnack quotient is invariant under joint scaling") {
  Grid g = Grid::make(kWide, 41, 41);
  auto u = GridFunction::sample(g, [](const Point2& p) { return 2.0 + std::sin(p.x1 + p.x2); });
  auto f = GridFunction::sample(g, [](const Point2& p) { return 0.3 * p.x2; });
  double q = harnack_quotient(u, f, {0.2, 0}, 0.3, 2.0);
  for (double lam : {0.1, 7.0}) CHECK(harnack_quotient(lam * u, lam * f, {0.2, 0}, 0.3, 2.0) == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("double ball on a constant solution") {
  Grid g = Grid::make(kWide, 41, 41);
  auto r = check_double_ball(GridFunction(g, 1.0), GridFunction(g, 0.0), {0.2, 0}, 0.3, DBParams{});
  CHECK(r.status == CheckStatus::Pass);
  CHECK(r.value("inf_ratio") == doctest::Approx(1.0));
  CHECK(r.margin("inf_ratio_minus_gamma") == doctest::Approx(0.9));
  auto vac = check_double_ball(GridFunction(g, 0.0), GridFunction(g, 0.0), {0.2, 0}, 0.3, DBParams{});
  CHECK(vac.vacuous());
}

TEST_CASE("critical density: vacuous below the level, failing when the floor is missed") {
  Grid g = Grid::make(kWide, 61, 61);
  GridFunction f(g, 0.0);
  CHECK(check_critical_density(GridFunction(g, 0.5), f, {0, 0}, 0.2, CDParams{}).vacuous());
  // u >= 1 on most of the ball but 0 near the center
  auto u = GridFunction::sample(g, [](const Point2& p) { return std::hypot(p.x1, p.x2) < 0.05 ? 0.0 : 2.0; });
  auto r = check_critical_density(u, f, {0, 0}, 0.2, CDParams{});
  CHECK(r.status == CheckStatus::Fail);
  CHECK(check_critical_density(GridFunction(g, 2.0), f, {0, 0}, 0.2, CDParams{}).status == CheckStatus::Pass);
}

TEST_CASE("critical density level is a quantile") {
  Grid g = Grid::make(kWide, 61, 61);
  auto u = GridFunction::sample(g, [](const Point2& p) { return 1.0 + p.x1; });
  double t = critical_density_level(u, {0, 0}, 0.4, 0.3);
  auto st = node_stats(u, ball(grushin::RegionKind::BTilde, {0, 0}, 0.4));
  CHECK(t > st.inf);
  CHECK(t < st.sup);
  CHECK_THROWS_AS(critical_density_level(u, {0, 0}, 0.4, 1.0), InvalidParameter);
}

TEST_CASE("power decay on a flat function") {
  Grid g = Grid::make(kWide, 41, 41);
  GridFunction f(g, 0.0);
  auto seq = decay_sequence(GridFunction(g, 0.5), {0, 0}, 0.3, 2.0, 4);
  CHECK(seq == std::vector<double>{0, 0, 0, 0});
  CHECK(check_power_decay(GridFunction(g, 0.5), f, {0, 0}, 0.3, PDParams{}).status == CheckStatus::Pass);
  // inf above 1: hypothesis fails
  CHECK(check_power_decay(GridFunction(g, 3.0), f, {0, 0}, 0.3, PDParams{}).vacuous());
  // a spike above M covering the whole half ball violates k = 1
  auto spike = GridFunction::sample(g, [](const Point2& p) { return std::hypot(p.x1, p.x2) < 0.02 ? 1.0 : 10.0; });
  auto bad = check_power_decay(spike, f, {0, 0}, 0.3, PDParams{});
  CHECK(bad.status == CheckStatus::Fail);
}

TEST_CASE("level scaling matches explicit division") {
  Grid g = Grid::make(kWide, 41, 41);
  auto u = GridFunction::sample(g, [](const Point2& p) { return 3.0 + std::sin(3 * p.x1) * std::cos(2 * p.x2); });
  auto f = GridFunction::sample(g, [](const Point2& p) { return 0.2 * p.x1; });
  auto a = check_critical_density(u, f, {0.1, 0}, 0.2, CDParams{}, grushin::RegionKind::BTilde, 2.5);
  auto b = check_critical_density((1 / 2.5) * u, (1 / 2.5) * f, {0.1, 0}, 0.2, CDParams{});
  CHECK(a.status == b.status);
}

TEST_CASE("FNV-1a digest reference values") {
  CHECK(digest_hex("") == "cbf29ce484222325");
  CHECK(digest_hex("a") == "af63dc4c8601ec8c");
  CHECK(digest_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("status names") {
  CHECK(to_string(CheckStatus::Pass) == "pass");
  CHECK(to_string(CheckStatus::Fail) == "fail");
  CHECK(to_string(CheckStatus::Vacuous) == "vacuous");
}

TEST_CASE("settle uses the tolerance") {
  CheckReport r;
  r.margins = {{"a", 1.0}, {"b", -1e-13}};
  r.tolerance = 1e-12;
  r.settle();
  CHECK(r.passed());
  r.margins.emplace_back("c", -1e-3);
  r.settle();
  CHECK_FALSE(r.passed());
  CHECK_THROWS_AS(r.margin("missing"), InvalidParameter);
}

TEST_CASE("problem families") {
  Grid g = Grid::make({{-1, -1}, {1, 1}}, 33, 33);
  auto pos = make_problem(ProblemFamily::Positive, g, 3, 0.1);
  auto sup = make_problem(ProblemFamily::Supersolution, g, 3, 5.0);
  auto hom = make_problem(ProblemFamily::Homogeneous, g, 3, 5.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(pos.boundary.values[k] >= 0.5 - 1e-15);
    CHECK(std::abs(pos.f.values[k]) <= 0.1 + 1e-15);
    CHECK(sup.f.values[k] >= 0.0);
    CHECK(sup.boundary.values[k] >= 0.0);
    CHECK(hom.f.values[k] == 0.0);
  }
  pos.coeffs.validate();
  auto again = make_problem(ProblemFamily::Positive, g, 3, 0.1);
  CHECK(again.f.values == pos.f.values);
}

TEST_CASE("one ensemble run at a small grid") {
  EnsembleConfig cfg;
  cfg.n = 33;
  cfg.runs = 2;
  auto res = run_ensemble(cfg);
  CHECK(res.runs.size() == 2);
  CHECK(res.kept == 2);
  CHECK(res.all_pass);
  CHECK(std::isfinite(res.max_quotient));
  auto res2 = run_ensemble(cfg);
  CHECK(res2.runs[1].db.digest == res.runs[1].db.digest);
  CHECK(res2.max_quotient == res.max_quotient);
}
