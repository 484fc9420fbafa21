#include "harnacklab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace hlab::engine {

namespace {

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

void add(ConstantLedger& l, std::string name, double value, std::string formula, std::string anchor) {
  l.entries.push_back({std::move(name), value, std::move(formula), std::move(anchor)});
}

double safe_exp(double log_v) { return log_v > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(log_v); }

// log(1 - (1 + 1/M)^(-a)) with M = exp(log_M), a > 0, without losing 1/M to underflow.
double log_one_minus_pow(double log_M, double a) {
  if (log_M < 700.0) {
    double x = a * std::log1p(std::exp(-log_M));
    if (x > 1e-300) return std::log(-std::expm1(-x));
  }
  return std::log(a) - log_M;
}

}  // namespace

void DBCDInput::validate() const {
  if (!in_open_unit(gamma)) throw InvalidParameter("gamma must lie in (0,1)");
  if (!in_open_unit(c)) throw InvalidParameter("c must lie in (0,1)");
  if (!in_open_unit(eps)) throw InvalidParameter("eps must lie in (0,1)");
  if (!(eta > 1.0) || !std::isfinite(eta)) throw InvalidParameter("eta must be > 1");
  if (!in_open_unit(nu)) throw InvalidParameter("nu must lie in (0,1)");
}

DBCDInput normalize(const DBConstants& db, const CDConstants& cd) {
  DBCDInput in;
  in.gamma = db.gamma;
  in.c = cd.c;
  in.nu = cd.nu;
  in.eps = std::min(db.eps, cd.eps);
  in.eta = std::max(db.eta, cd.eta);
  in.validate();
  return in;
}

DBConstants cd_implies_db(double nu, double C_D, const CDConstants& cd) {
  if (!(C_D > 1.0)) throw InvalidParameter("doubling constant must be > 1");
  if (!in_open_unit(nu)) throw InvalidParameter("nu must lie in (0,1)");
  if (!(nu < 1.0 / (C_D * C_D))) throw HypothesisViolation("critical density fraction must satisfy nu < 1/C_D^2");
  if (!in_open_unit(cd.c) || !in_open_unit(cd.eps) || !(cd.eta > 1.0))
    throw InvalidParameter("critical density constants out of range");
  return {cd.c, cd.eps, 2.0 * cd.eta};
}

void derive_m0_sigma_m1_theta(ConstantLedger& l, const DBCDInput& in, double K) {
  in.validate();
  if (!(K >= 1.0)) throw InvalidParameter("quasi-triangle constant K must be >= 1");
  l.M0 = 1.0 / (in.gamma * in.c);
  l.sigma_exp = -std::log(2.0) / std::log(in.gamma);
  l.M1 = std::pow(4.0 * K, 1.0 / l.sigma_exp) * l.M0;
  l.theta = K * (1.0 + 4.0 * in.eta * K);
  add(l, "M0", l.M0, "1/(gamma c)", "Proposition (alpha-scaling)");
  add(l, "sigma", l.sigma_exp, "-ln 2 / ln gamma", "Lemma (radius rho)");
  add(l, "M1", l.M1, "(4K)^(1/sigma) M0", "Lemma (radius rho)");
  add(l, "theta", l.theta, "K (1 + 4 eta K)", "Lemma (radius rho)");
}

double beta1_of(const ConstantLedger& l, double K, double alpha_h, double beta_h) {
  const double s = l.sigma_exp;
  return std::pow(2.0 * K, alpha_h - 1.0) * beta_h * std::pow(l.M1, s * alpha_h) *
         std::pow(1.0 + std::pow(l.M1, s), 1.0 - alpha_h);
}

void choose_M(ConstantLedger& l, double K, double alpha_h, double beta_h) {
  if (!(l.M0 > 1.0)) throw ConstantInconsistency("choose_M needs M0 from derive_m0_sigma_m1_theta");
  l.beta1 = beta1_of(l, K, alpha_h, beta_h);
  const double e = l.sigma_exp * alpha_h;
  double M = l.M0;
  for (int j = 1; j < 4096; ++j) {
    M *= 2.0;
    const double q = std::pow(M, -e);
    if (l.beta1 * q * q < 0.25 && l.beta1 * q * q * q / (1.0 - q) < 0.25) {
      l.M = M;
      l.q_pd = q;
      add(l, "beta1", l.beta1, "(2K)^(alpha-1) beta M1^(sigma alpha) (1 + M1^sigma)^(1-alpha)", "Theorem (power decay)");
      add(l, "M", l.M, "smallest M0 2^j, j >= 1, with beta1 q^2 < 1/4 and beta1 q^3/(1-q) < 1/4",
          "Theorem (power decay)");
      add(l, "q", l.q_pd, "M^(-sigma alpha)", "Theorem (power decay)");
      return;
    }
  }
  throw ConstantInconsistency("no admissible M below M0 2^4096");
}

std::vector<double> tk_sequence(double beta1, double q_pd, int k_max) {
  if (k_max < 1) throw InvalidParameter("k_max must be >= 1");
  if (!in_open_unit(q_pd) || !(beta1 > 0.0)) throw InvalidParameter("tk_sequence needs beta1 > 0 and q in (0,1)");
  std::vector<double> T{0.75};
  double qk = q_pd * q_pd * q_pd;  // q^(k+2) at k = 1
  for (int k = 1; k < k_max; ++k) {
    double next = T.back() - beta1 * qk;
    if (!(next > 0.5)) throw ConstantInconsistency("T_" + std::to_string(k + 1) + " <= 1/2: M too small");
    T.push_back(next);
    qk *= q_pd;
  }
  return T;
}

double default_c_nu(double nu, double C_D) { return 1.0 - nu / (2.0 * C_D * C_D); }

int absorption_exponent(double c_nu, double C_D) {
  if (!in_open_unit(c_nu)) throw InvalidParameter("c(nu) must lie in (0,1)");
  if (!(C_D > 1.0)) throw InvalidParameter("doubling constant must be > 1");
  // c^k C_D < 1  <=>  k > ln C_D / ln(1/c); verify in exact arithmetic.
  int k = std::max(1, static_cast<int>(std::floor(std::log(C_D) / -std::log(c_nu))));
  while (k > 1 && std::pow(c_nu, k - 1) * C_D < 1.0) --k;
  while (!(std::pow(c_nu, k) * C_D < 1.0)) ++k;
  return k;
}

ConstantLedger derive_power_decay(const DBCDInput& in, const quasimetric::QuasiMetricSpec& space,
                                  const PowerDecayInput& pd) {
  if (pd.hypothesis == DecayHypothesis::None)
    throw HypothesisViolation("power decay needs either the ring condition or the small density hypothesis");
  if (pd.hypothesis == DecayHypothesis::SmallDensity && !(in.nu < 1.0 / (space.C_D * space.C_D)))
    throw HypothesisViolation("small density hypothesis needs nu < 1/C_D^2");
  ConstantLedger l;
  derive_m0_sigma_m1_theta(l, in, space.K);
  choose_M(l, space.K, space.alpha_h, space.beta_h);
  l.T = tk_sequence(l.beta1, l.q_pd, pd.k_max);
  add(l, "T_2", l.T.size() > 1 ? l.T[1] : l.T[0], "3/4 - beta1 q^3", "Theorem (power decay)");
  add(l, "T_inf", 0.75 - l.beta1 * std::pow(l.q_pd, 3) / (1.0 - l.q_pd), "3/4 - beta1 q^3/(1-q)",
      "Theorem (power decay)");

  const double K = space.K;
  const double base = std::max(K * (3.0 * in.eta * K + 1.0), l.theta);
  if (pd.hypothesis == DecayHypothesis::RingCondition) {
    l.eta_P = base + 1.0;
    add(l, "eta_P", l.eta_P, "max{K(3 eta K + 1), theta} + 1", "Theorem (power decay), ring condition");
  } else {
    l.eta_P = 2.0 * base;
    add(l, "eta_P", l.eta_P, "2 max{K(3 eta K + 1), theta}", "Theorem (power decay), small density");
  }
  l.eps_P = in.eps * in.c;
  add(l, "eps_P", l.eps_P, "eps c", "Theorem (power decay)");

  const double c_nu = pd.c_nu < 0.0 ? default_c_nu(in.nu, space.C_D) : pd.c_nu;
  l.k_absorb = absorption_exponent(c_nu, space.C_D);
  l.gamma_PD = c_nu;
  l.log_M_PD = (l.k_absorb + 2) * std::log(l.M);
  l.M_PD = safe_exp(l.log_M_PD);
  add(l, "c_nu", c_nu, pd.c_nu < 0.0 ? "1 - nu/(2 C_D^2)" : "supplied", "covering lemma contraction");
  add(l, "k_absorb", l.k_absorb, "smallest k >= 1 with c(nu)^k C_D < 1", "Theorem (power decay)");
  add(l, "gamma_PD", l.gamma_PD, "c(nu)", "Theorem (power decay)");
  add(l, "ln_M_PD", l.log_M_PD, "(k_absorb + 2) ln M", "Theorem (power decay)");
  add(l, "M_PD", l.M_PD, "M^(k_absorb + 2)", "Theorem (power decay)");
  return l;
}

HarnackConstants derive_harnack(const PDConstants& pd, const quasimetric::QuasiMetricSpec& space) {
  if (!in_open_unit(pd.gamma)) throw InvalidParameter("power decay gamma must lie in (0,1)");
  if (!in_open_unit(pd.eps_P)) throw InvalidParameter("eps_P must lie in (0,1)");
  if (!(pd.eta_P > 1.0)) throw InvalidParameter("eta_P must be > 1");
  if (!(pd.log_M > 0.0)) throw InvalidParameter("power decay M must be > 1");
  const double K = space.K;
  const double a = space.alpha_h;
  const double q = std::log2(space.C_D);
  const double lg = std::log(pd.gamma);

  HarnackConstants h;
  h.eta = 2.0 * K * (2.0 * K * pd.eta_P + 1.0);
  const double log_c1_bound = (lg + std::log1p(-pd.gamma) - std::log(space.C_D)) / q - std::log(4.0 * K * pd.eta_P);
  const double log_c1 = log_c1_bound - std::log(2.0);
  h.c1 = std::exp(log_c1);
  h.delta_exp = q * pd.log_M / -lg;
  h.log_beta_star = std::log(4.0) + (1.0 - a) * std::log(2.0 * K) + std::log(space.beta_h) -
                    log_one_minus_pow(pd.log_M, a / h.delta_exp);

  // k0 > (q / ln gamma) ln(c1 (2^(1/(1-alpha)) - 1)); at alpha = 1 the bound is -inf.
  h.k0 = 1;
  if (a < 1.0) {
    const double e = 1.0 / (1.0 - a);
    const double log_term = log_c1 + (e < 1000.0 ? std::log(std::expm1(e * std::log(2.0))) : e * std::log(2.0));
    const double bound = q / lg * log_term;
    if (std::isfinite(bound)) h.k0 = std::max(1, static_cast<int>(std::ceil(bound)) + 1);
  }
  const double case1 = (h.k0 + 1) * pd.log_M;
  const double case2 = pd.log_M + h.delta_exp / a * h.log_beta_star - h.delta_exp * log_c1;
  h.log_C = -std::log(pd.eps_P) + std::max(case1, case2);
  return h;
}

void derive_harnack(ConstantLedger& l, const quasimetric::QuasiMetricSpec& space) {
  if (!(l.log_M_PD > 0.0)) throw ConstantInconsistency("derive_harnack needs the power decay constants");
  HarnackConstants h = derive_harnack(PDConstants{l.log_M_PD, l.gamma_PD, l.eps_P, l.eta_P}, space);
  l.eta_harnack = h.eta;
  l.c1 = h.c1;
  l.delta_exp = h.delta_exp;
  l.log_beta_star = h.log_beta_star;
  l.beta_star = safe_exp(h.log_beta_star);
  l.k0 = h.k0;
  l.log_C_harnack = h.log_C;
  l.C_harnack = safe_exp(h.log_C);
  add(l, "eta_harnack", l.eta_harnack, "2K(2K eta_P + 1)", "Theorem (Harnack inequality)");
  add(l, "c1", l.c1, "half of gamma^(1/q) (1-gamma)^(1/q) / (C_D^(1/q) 4 K eta_P)", "Lemma (Harnack)");
  add(l, "delta", l.delta_exp, "q ln M / ln(1/gamma)", "Proposition (Harnack, u and f small)");
  add(l, "ln_beta_star", l.log_beta_star, "ln of twice 2(2K)^(1-alpha) beta (1 - (1+1/M)^(-alpha/delta))^(-1)",
      "Proposition (Harnack, u and f small)");
  add(l, "beta_star", l.beta_star, "exp(ln_beta_star)", "Proposition (Harnack, u and f small)");
  add(l, "k0", l.k0, "ceil((q / ln gamma) ln(c1 (2^(1/(1-alpha)) - 1))) + 1, at least 1",
      "Proposition (Harnack, u and f small)");
  add(l, "ln_C_harnack", l.log_C_harnack,
      "-ln eps_P + max{(k0+1) ln M, ln M + (delta/alpha) ln beta_star - delta ln c1}",
      "Proposition (Harnack, u and f small)");
  add(l, "C_harnack", l.C_harnack, "exp(ln_C_harnack)", "Theorem (Harnack inequality)");
}

ConstantLedger derive_all(const DBCDInput& in, const quasimetric::QuasiMetricSpec& space, const PowerDecayInput& pd) {
  ConstantLedger l = derive_power_decay(in, space, pd);
  derive_harnack(l, space);
  return l;
}

std::string ledger_json(const ConstantLedger& l, int indent) {
  nlohmann::ordered_json j;
  j["schema"] = "harnacklab.ledger/1";
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : l.entries) {
    nlohmann::ordered_json o;
    o["name"] = e.name;
    if (std::isfinite(e.value))
      o["value"] = e.value;
    else
      o["value"] = nullptr;
    o["formula"] = e.formula;
    o["source"] = e.anchor;
    arr.push_back(std::move(o));
  }
  j["constants"] = std::move(arr);
  j["T"] = l.T;
  return j.dump(indent);
}

}  // namespace hlab::engine
