#pragma once

// Checks of the double ball, critical density, power decay and Harnack
// statements on discrete solutions, plus the seeded ensembles that feed them.
// inf / sup / measure over a region are taken over the grid nodes inside it;
// each node carries the cell area h1 h2.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "harnacklab/grushin_geometry.hpp"
#include "harnacklab/pde_solver.hpp"

namespace hlab::harness {

using grushin::RegionDescriptor;
using grushin::RegionKind;
using pde::GridFunction;

/// Ball of the given family around `center`.
RegionDescriptor ball(RegionKind kind, const Point2& center, double radius);

struct NodeStats {
  double inf = 0.0;
  double sup = 0.0;
  double measure = 0.0;
  std::size_t count = 0;
};

/// Throws InvalidParameter when the region leaves the grid window and
/// DegenerateInput when it contains no node.
NodeStats node_stats(const GridFunction& u, const RegionDescriptor& region);

struct SNorm {
  RegionDescriptor region;
  double diameter = 0.0;
  double l2 = 0.0;  // ||x1 f||_{L^2(region)}
  double value = 0.0;
};

/// diam(region) ||x1 f||_{L^2(region)}.
SNorm compute_S(const RegionDescriptor& region, const GridFunction& f);

enum class CheckStatus { Pass, Fail, Vacuous };

std::string_view to_string(CheckStatus s);

struct CheckReport {
  std::string kind;
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string digest;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<std::pair<std::string, double>> measured;
  std::vector<std::pair<std::string, double>> margins;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;  // wall time; never serialized

  /// Not failed: either passed or vacuous.
  bool passed() const { return status != CheckStatus::Fail; }
  bool vacuous() const { return status == CheckStatus::Vacuous; }
  double margin(const std::string& key) const;
  double value(const std::string& key) const;

  /// Pass iff every margin >= -tolerance.
  void settle();
};

struct DBParams {
  double gamma = 0.1;
  double eps = 0.5;
  double eta = 3.0;
};

struct CDParams {
  double nu = 0.3;
  double c = 0.05;
  double eps = 0.5;
  double eta = 6.0;
};

struct PDParams {
  double M = 2.0;
  double gamma = 0.5;
  double eps_P = 0.25;
  double eta_P = 4.0;
  int k_max = 8;
};

/// Normalizes by m = inf over B(y, r/2); vacuous when m <= 0 or
/// S(B(y, eta r), f/m) >= eps. Otherwise checks inf over B(y, r) of u/m >= gamma.
CheckReport check_double_ball(const GridFunction& u, const GridFunction& f, const Point2& y, double r,
                              const DBParams& p, RegionKind kind = RegionKind::BTilde);

/// Vacuous when the node measure fraction of {u >= 1} in B(y, R) is below nu.
/// Otherwise passes when inf over B(y, R/2) of u >= c or S(B(y, eta R), f) >= eps.
/// A `level` t != 1 checks (u/t, f/t) without forming the quotients.
CheckReport check_critical_density(const GridFunction& u, const GridFunction& f, const Point2& y, double R,
                                   const CDParams& p, RegionKind kind = RegionKind::BTilde, double level = 1.0);

/// Level t such that {u >= t} covers at least a nu fraction of the nodes in
/// B(y, R); dividing (u, f) by t makes the density hypothesis hold.
double critical_density_level(const GridFunction& u, const Point2& y, double R, double nu,
                              RegionKind kind = RegionKind::BTilde);

/// Vacuous unless inf over B(x0, R) of u <= 1 and S(B(x0, eta_P R), f) < eps_P.
/// Otherwise checks mu({u > M^k} in B(x0, R/2)) / mu(B(x0, R/2)) <= gamma^k for
/// k = 1..k_max and records the first violated k (0 when none). `level` as
/// for check_critical_density.
CheckReport check_power_decay(const GridFunction& u, const GridFunction& f, const Point2& x0, double R,
                              const PDParams& p, RegionKind kind = RegionKind::BTilde, double level = 1.0);

/// The measured sequence of check_power_decay, index k-1 for level M^k.
std::vector<double> decay_sequence(const GridFunction& u, const Point2& x0, double R, double M, int k_max,
                                   RegionKind kind = RegionKind::BTilde, double level = 1.0);

/// sup_{B(x0,r)} u / (inf_{B(x0,r)} u + S(B(x0, eta r), f)). Throws
/// DegenerateInput when the denominator vanishes.
double harnack_quotient(const GridFunction& u, const GridFunction& f, const Point2& x0, double r, double eta,
                        RegionKind kind = RegionKind::BTilde);

/// The relaxed ABP inequality as a report (full window as the region).
CheckReport check_abp(const GridFunction& u, const GridFunction& f, double C);

// ---------------------------------------------------------------------------
// Seeded problem ensembles.

/// Coefficients, right-hand side and Dirichlet data of one seeded run. All
/// three are functions of position, so refining the grid refines the same
/// continuous problem.
struct Problem {
  pde::CoefficientField coeffs;
  GridFunction f;
  GridFunction boundary;
};

enum class ProblemFamily {
  Positive,       // boundary data in [0.5, 1.5], |f| <= amplitude
  Supersolution,  // boundary data >= 0, f >= 0 a bump of height amplitude
  Homogeneous,    // boundary data >= 0 with zeros, f = 0
};

Problem make_problem(ProblemFamily family, const pde::Grid& grid, std::uint64_t seed, double amplitude,
                     int patches = 8);

struct EnsembleConfig {
  grushin::Rect window{{-2.0, -2.0}, {2.0, 2.0}};
  int n = 65;
  std::uint64_t seed = 0;
  int runs = 20;
  int patches = 8;
  double f_amplitude = 0.1;
  RegionKind kind = RegionKind::BTilde;
  Point2 x0{0.5, 0.0};
  double r = 0.25;     // Harnack ball radius
  double eta = 4.0;    // Harnack enlargement
  double r_db = 0.4;   // double ball radius
  double R_cd = 0.2;   // critical density radius
  double R_pd = 0.25;  // power decay radius
  DBParams db;
  CDParams cd;
  PDParams pd;
};

struct RunRecord {
  std::uint64_t seed = 0;
  bool discarded = false;  // min(u) < -1e-8: outside the nonnegative family
  double min_u = 0.0;
  double residual = 0.0;
  double quotient = 0.0;
  CheckReport db;
  CheckReport cd;
  CheckReport pd;
};

struct EnsembleResult {
  std::vector<RunRecord> runs;
  double max_quotient = 0.0;
  int kept = 0;
  int db_nonvacuous = 0;
  int cd_nonvacuous = 0;
  int pd_nonvacuous = 0;
  bool all_pass = true;
};

/// Run k uses seed cfg.seed * 1000 + k.
EnsembleResult run_ensemble(const EnsembleConfig& cfg);

/// The checks of one run (DB, CD after quantile normalization, PD after
/// normalization by the infimum) plus the Harnack quotient.
RunRecord evaluate_run(const EnsembleConfig& cfg, const GridFunction& u, const GridFunction& f, std::uint64_t seed);

struct AbpStudy {
  double fitted_C = 0.0;
  std::vector<double> calibration_ratios;
  std::vector<pde::AbpReport> supersolution;  // test seeds
  std::vector<double> homogeneous_sup_negative;
  double min_margin = 0.0;
  double max_homogeneous_negative = 0.0;
};

struct AbpConfig {
  grushin::Rect window{{-1.0, -1.0}, {1.0, 1.0}};
  int n = 65;
  std::uint64_t seed = 0;
  int calibration_runs = 5;
  int test_runs = 10;
  int homogeneous_runs = 10;
  double amplitude = 100.0;
  double safety = 2.0;  // fitted C = safety * max calibration ratio
};

/// Fits C on calibration seeds (disjoint from the test seeds), then evaluates
/// the margin on test supersolution runs and sup u^- on f = 0 runs.
AbpStudy run_abp_study(const AbpConfig& cfg);

struct ClosureResult {
  std::vector<double> lambdas;
  int comparisons = 0;
  int flag_mismatches = 0;
  double max_quotient_defect = 0.0;  // relative deviation of the quotient identity
  double max_margin_defect = 0.0;    // relative deviation of scale-free margins
};

/// (u, f) -> (lambda u, lambda f) and (tau - lambda u, -lambda f) with
/// tau = lambda sup u, on `runs` runs of the ensemble.
ClosureResult family_closure(const EnsembleConfig& cfg, const std::vector<double>& lambdas, int runs);

/// FNV-1a digest of a byte string, as 16 hex digits.
std::string digest_hex(const std::string& bytes);

}  // namespace hlab::harness
