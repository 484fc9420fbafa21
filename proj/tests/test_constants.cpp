#include <cmath>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "harnacklab/constants.hpp"

using namespace hlab;
using namespace hlab::engine;

namespace {
auto unit_space() { return quasimetric::QuasiMetricSpec::make(1.0, 1.0, 1.0, 2.0, 0.5); }
}  // namespace

TEST_CASE("worked case gamma = c = 1/2, K = alpha = beta = 1") {
  ConstantLedger l;
  derive_m0_sigma_m1_theta(l, DBCDInput{0.5, 0.5, 0.5, 2.0, 0.1}, 1.0);
  CHECK(l.M0 == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(l.sigma_exp == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l.M1 == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(l.theta == doctest::Approx(9.0));  // K(1 + 4 eta K)
  CHECK(beta1_of(l, 1.0, 1.0, 1.0) == doctest::Approx(16.0).epsilon(1e-14));
  choose_M(l, 1.0, 1.0, 1.0);
  // M = 8: q = 1/8, beta1 q^2 = 1/4 is not < 1/4; M = 16 is the first admissible
  CHECK(l.M == doctest::Approx(16.0));
  CHECK(l.q_pd == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("T_k recursion by hand") {
  auto T = tk_sequence(16.0, 1.0 / 16.0, 3);
  REQUIRE(T.size() == 3);
  CHECK(T[0] == 0.75);
  CHECK(T[1] == doctest::Approx(0.75 - 1.0 / 256.0).epsilon(1e-15));
  CHECK(T[2] == doctest::Approx(0.75 - 1.0 / 256.0 - 1.0 / 4096.0).epsilon(1e-15));
  CHECK_THROWS_AS(tk_sequence(1000.0, 0.5, 5), ConstantInconsistency);
  CHECK_THROWS_AS(tk_sequence(1.0, 1.5, 5), InvalidParameter);
}

TEST_CASE("T_k stays in (1/2, 3/4] for 10^4 terms") {
  ConstantLedger l = derive_all(DBCDInput{0.3, 0.4, 0.2, 3.0, 0.05}, quasimetric::QuasiMetricSpec::make(1.5, 0.8, 2.0, 3.0, 0.5),
                                PowerDecayInput{DecayHypothesis::RingCondition, -1.0, 10000});
  REQUIRE(l.T.size() == 10000);
  for (double t : l.T) {
    CHECK(t > 0.5);
    CHECK(t <= 0.75);
  }
  CHECK(std::pow(0.3, l.sigma_exp) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(l.M0 * 0.3 * 0.4 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.eps_P == doctest::Approx(0.2 * 0.4).epsilon(1e-12));
}

TEST_CASE("covering factor and absorption exponent") {
  CHECK(default_c_nu(0.5, 2.0) == doctest::Approx(0.9375));
  CHECK(absorption_exponent(0.5, 3.0) == 2);
  CHECK(absorption_exponent(0.5, 1.5) == 1);
  // 0.9375^k < 1/2 first at k = 11
  CHECK(absorption_exponent(0.9375, 2.0) == 11);
  CHECK_THROWS_AS(absorption_exponent(1.0, 2.0), InvalidParameter);
}

TEST_CASE("eta_P depends on the hypothesis") {
  DBCDInput in{0.5, 0.5, 0.5, 2.0, 0.1};
  auto ring = derive_power_decay(in, unit_space(), PowerDecayInput{DecayHypothesis::RingCondition, -1.0, 8});
  auto small = derive_power_decay(in, unit_space(), PowerDecayInput{DecayHypothesis::SmallDensity, -1.0, 8});
  // max{K(3 eta K + 1), theta} = max{7, 9}
  CHECK(ring.eta_P == doctest::Approx(10.0));
  CHECK(small.eta_P == doctest::Approx(18.0));
  CHECK_THROWS_AS(derive_power_decay(in, unit_space(), PowerDecayInput{DecayHypothesis::None, -1.0, 8}),
                  HypothesisViolation);
  DBCDInput dense{0.5, 0.5, 0.5, 2.0, 0.3};
  CHECK_THROWS_AS(derive_power_decay(dense, unit_space(), PowerDecayInput{DecayHypothesis::SmallDensity, -1.0, 8}),
                  HypothesisViolation);
}

TEST_CASE("Harnack constants for a small hand case") {
  const double M = 4.0;
  PDConstants pd{std::log(M), 0.5, 0.5, 2.0};
  auto h = derive_harnack(pd, unit_space());
  CHECK(h.eta == doctest::Approx(10.0));
  CHECK(h.c1 == doctest::Approx(1.0 / 128.0));
  CHECK(h.delta_exp == doctest::Approx(2.0));
  double beta_star = 4.0 / (1.0 - std::pow(1.0 + 1.0 / M, -0.5));
  CHECK(h.log_beta_star == doctest::Approx(std::log(beta_star)).epsilon(1e-12));
  CHECK(h.k0 == 1);
  double c_case2 = M * std::pow(beta_star, 2.0) * std::pow(128.0, 2.0);
  double want = std::max(M * M, c_case2) / 0.5;
  CHECK(h.log_C == doctest::Approx(std::log(want)).epsilon(1e-12));
}

TEST_CASE("overflowing constants are carried in the log domain") {
  auto sp = quasimetric::QuasiMetricSpec::make(2.0, 0.5, 1.0, 4.0, 0.5);
  ConstantLedger l = derive_all(DBCDInput{0.1, 0.1, 0.5, 2.0, 0.01}, sp, PowerDecayInput{DecayHypothesis::SmallDensity, -1.0, 64});
  CHECK(std::isfinite(l.log_C_harnack));
  CHECK(l.log_C_harnack > 709.0);
  CHECK(std::isinf(l.C_harnack));
  auto j = nlohmann::json::parse(ledger_json(l));
  CHECK(j["schema"] == "harnacklab.ledger/1");
  bool saw_null = false;
  for (const auto& e : j["constants"]) {
    CHECK(e.contains("formula"));
    if (e["name"] == "C_harnack") saw_null = e["value"].is_null();
  }
  CHECK(saw_null);
}

TEST_CASE("critical density gives the double ball property below 1/C_D^2") {
  CDConstants cd{0.2, 0.3, 0.4, 2.0};
  auto db = cd_implies_db(0.2, 2.0, cd);
  CHECK(db.gamma == doctest::Approx(0.3));
  CHECK(db.eps == doctest::Approx(0.4));
  CHECK(db.eta == doctest::Approx(4.0));
  CHECK_THROWS_AS(cd_implies_db(0.25, 2.0, cd), HypothesisViolation);
  auto in = normalize(DBConstants{0.1, 0.5, 3.0}, CDConstants{0.1, 0.2, 0.3, 6.0});
  CHECK(in.eps == doctest::Approx(0.3));
  CHECK(in.eta == doctest::Approx(6.0));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(DBCDInput({1.0, 0.5, 0.5, 2.0, 0.1}).validate(), InvalidParameter);
  CHECK_THROWS_AS(DBCDInput({0.5, 0.5, 0.5, 1.0, 0.1}).validate(), InvalidParameter);
  CHECK_THROWS_AS(derive_harnack(PDConstants{0.0, 0.5, 0.5, 2.0}, unit_space()), InvalidParameter);
}

TEST_CASE("absorption and Harnack examples") {
  CHECK(absorption_exponent(0.5, 4.0) == 3);
  auto sp = unit_space();
  auto h = derive_harnack(PDConstants{std::log(2.0), 0.5, 0.5, 5.0}, sp);
  CHECK(h.delta_exp == doctest::Approx(1.0));
  CHECK(h.eta == doctest::Approx(22.0));
}
