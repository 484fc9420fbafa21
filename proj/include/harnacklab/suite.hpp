#pragma once

// End-to-end verification suite: geometry, constant ledger, barriers, solver
// and the PDE checks, aggregated into one report.

#include <cstdint>
#include <string>
#include <vector>

#include "harnacklab/config.hpp"
#include "harnacklab/harness.hpp"

namespace hlab::suite {

using harness::CheckReport;

struct SuiteConfig {
  std::vector<std::string> sections{"geometry", "engine", "barriers", "solver", "pde"};
  std::uint64_t seed = 0;

  // geometry
  std::size_t regions = 100;
  std::size_t rays = 512;
  double structure_bound = 16.0;
  double h_inner_bound = 4.0;

  // barriers
  double lambda = 1.0;
  double Lambda = 1.5;
  int barrier_fields = 20;
  std::size_t barrier_samples = 10000;

  // solver
  grushin::Rect solver_window{{-1.0, -1.0}, {1.0, 1.0}};
  int n_coarse = 65;
  int n_fine = 129;

  // pde checks
  harness::EnsembleConfig ensemble;
  harness::AbpConfig abp;
  std::vector<double> closure_lambdas{0.1, 1.0, 7.0};
  int closure_runs = 5;
  double stability_bound = 0.2;

  /// Keys: sections, seed, grid (n1xn2, sets the coarse PDE grid; the fine
  /// grid is 2n-1), window, regions, rays, lambda, Lambda, barrier_fields,
  /// barrier_samples, runs, f_amplitude, closure_runs. Unknown keys are errors.
  static SuiteConfig from(const config::KeyValues& kv);

  bool wants(const std::string& section) const;
};

struct SuiteResult {
  std::vector<CheckReport> checks;
  bool solver_invoked = false;

  int count(harness::CheckStatus s) const;
  /// Every non-vacuous check passed.
  bool ok() const;
};

std::vector<CheckReport> geometry_checks(const SuiteConfig& cfg);
std::vector<CheckReport> engine_checks(const SuiteConfig& cfg);
std::vector<CheckReport> barrier_checks(const SuiteConfig& cfg);
std::vector<CheckReport> solver_checks(const SuiteConfig& cfg);
std::vector<CheckReport> pde_checks(const SuiteConfig& cfg);

SuiteResult run_suite(const SuiteConfig& cfg);

/// Report JSON: {"schema": "harnacklab.suite/1", "config": {...}, "checks": [...], "summary": {...}}.
/// Contains no timing data, so equal configs give byte-identical output.
std::string suite_json(const SuiteConfig& cfg, const SuiteResult& result, int indent = 2);

/// One check report as JSON ({"schema": "harnacklab.check/1", ...} when standalone).
std::string check_json(const CheckReport& report, int indent = 2);

}  // namespace hlab::suite
