#pragma once

// Constant calculus for the abstract Harnack machinery: from the double ball
// and critical density constants and the geometry of the space, derive every
// structural constant used by the power decay and Harnack arguments.
//
// Wherever the derivation only asks for a strict inequality (M > ..., c1 < ...,
// beta* > ..., k0 > ...) a canonical representative is chosen: the smallest
// admissible power-of-two multiple, half or twice the bound, ceiling plus one.

#include <iosfwd>
#include <string>
#include <vector>

#include "harnacklab/quasimetric.hpp"

namespace hlab::engine {

struct DBCDInput {
  double gamma = 0.5;  // double ball decay
  double c = 0.5;      // critical density floor
  double eps = 0.5;    // smallness threshold
  double eta = 2.0;    // enlargement
  double nu = 0.1;     // critical density fraction

  void validate() const;
};

struct DBConstants {
  double gamma = 0.0;
  double eps = 0.0;
  double eta = 0.0;
};

struct CDConstants {
  double nu = 0.0;
  double c = 0.0;
  double eps = 0.0;
  double eta = 0.0;
};

/// One shared (eps, eta) pair: eps = min(eps_DB, eps_CD), eta = max(eta_DB, eta_CD).
DBCDInput normalize(const DBConstants& db, const CDConstants& cd);

/// Critical density with 0 < nu < 1/C_D^2 yields the double ball property
/// DB(c, eps_CD, 2 eta_CD).
DBConstants cd_implies_db(double nu, double C_D, const CDConstants& cd);

struct LedgerEntry {
  std::string name;
  double value = 0.0;
  std::string formula;
  std::string anchor;  // which result of the theory the constant comes from
};

struct ConstantLedger {
  double M0 = 0.0;
  double sigma_exp = 0.0;
  double M1 = 0.0;
  double theta = 0.0;
  double beta1 = 0.0;
  double M = 0.0;  // power decay level base before absorption
  double q_pd = 0.0;
  std::vector<double> T;  // T_1 .. T_kmax
  double eta_P = 0.0;
  double eps_P = 0.0;
  double gamma_PD = 0.0;
  // The absorbed constants overflow double precision for realistic inputs,
  // so they are carried as natural logarithms; the plain fields hold exp() of
  // them and may be +inf.
  double M_PD = 0.0;  // level base after the k-absorption step
  double log_M_PD = 0.0;
  int k_absorb = 0;
  double eta_harnack = 0.0;
  double c1 = 0.0;
  double delta_exp = 0.0;
  double beta_star = 0.0;
  double log_beta_star = 0.0;
  int k0 = 0;
  double C_harnack = 0.0;
  double log_C_harnack = 0.0;

  std::vector<LedgerEntry> entries;
};

/// M0 = 1/(gamma c), sigma = -ln 2 / ln gamma, M1 = (4K)^(1/sigma) M0, theta = K(1 + 4 eta K).
void derive_m0_sigma_m1_theta(ConstantLedger& ledger, const DBCDInput& in, double K);

/// beta1 = (2K)^(alpha-1) beta M1^(sigma alpha) (1 + M1^sigma)^(1-alpha).
double beta1_of(const ConstantLedger& ledger, double K, double alpha_h, double beta_h);

/// Smallest M = M0 2^j (j >= 1) with beta1 q^2 < 1/4 and beta1 q^3 / (1 - q) < 1/4,
/// q = M^(-sigma alpha). Records M, q_pd and beta1.
void choose_M(ConstantLedger& ledger, double K, double alpha_h, double beta_h);

/// T_1 = 3/4, T_(k+1) = T_k - beta1 q^(k+2). Throws ConstantInconsistency if
/// some T_k <= 1/2.
std::vector<double> tk_sequence(double beta1, double q_pd, int k_max);

enum class DecayHypothesis { None, RingCondition, SmallDensity };

struct PowerDecayInput {
  DecayHypothesis hypothesis = DecayHypothesis::None;
  double c_nu = -1.0;  // covering contraction factor; < 0 selects the default
  int k_max = 64;
};

/// Power decay constants PD(M, gamma, eps_P, eta_P). M is carried by its
/// natural logarithm.
struct PDConstants {
  double log_M = 0.0;
  double gamma = 0.5;
  double eps_P = 0.5;
  double eta_P = 2.0;
};

struct HarnackConstants {
  double eta = 0.0;
  double c1 = 0.0;
  double delta_exp = 0.0;
  double log_beta_star = 0.0;
  int k0 = 0;
  double log_C = 0.0;
};

/// Default covering contraction factor 1 - nu / (2 C_D^2).
double default_c_nu(double nu, double C_D);

/// Smallest positive k with c^k C_D < 1.
int absorption_exponent(double c_nu, double C_D);

/// Runs derive_m0_sigma_m1_theta, choose_M and tk_sequence, then fixes
/// eta_P, eps_P = eps c and the absorbed (M_PD, gamma_PD).
ConstantLedger derive_power_decay(const DBCDInput& in, const quasimetric::QuasiMetricSpec& space,
                                  const PowerDecayInput& pd);

/// eta = 2K(2K eta_P + 1), c1, delta, beta*, k0 and C_harnack from the power
/// decay constants.
HarnackConstants derive_harnack(const PDConstants& pd, const quasimetric::QuasiMetricSpec& space);

/// Fills the Harnack fields of a ledger produced by derive_power_decay.
void derive_harnack(ConstantLedger& ledger, const quasimetric::QuasiMetricSpec& space);

/// Everything at once.
ConstantLedger derive_all(const DBCDInput& in, const quasimetric::QuasiMetricSpec& space, const PowerDecayInput& pd);

/// Ledger as JSON text: {"schema": ..., "constants": [{name, value, formula, anchor}, ...]}.
std::string ledger_json(const ConstantLedger& ledger, int indent = 2);

}  // namespace hlab::engine
