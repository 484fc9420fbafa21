// Acceptance run: one PASS/FAIL line per criterion, built from the default suite.
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "harnacklab/suite.hpp"

using namespace hlab;
using harness::CheckReport;

namespace {

struct Criterion {
  int id;
  const char* title;
  std::vector<std::string> checks;
  double time_limit;  // seconds, <= 0 for none
  std::vector<std::pair<std::string, std::string>> shown;  // (check, measured key)
};

}  // namespace

int main() {
  suite::SuiteConfig cfg;
  auto t0 = std::chrono::steady_clock::now();
  auto result = suite::run_suite(cfg);
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::map<std::string, const CheckReport*> by_name;
  for (const auto& r : result.checks) by_name[r.name] = &r;

  const std::vector<Criterion> criteria{
      {1, "geometry closed forms", {"dtilde_closed_form", "box_measure_and_doubling"}, 5.0,
       {{"dtilde_closed_form", "dtilde_origin"},
        {"box_measure_and_doubling", "box_area"},
        {"box_measure_and_doubling", "doubling"}}},
      {2, "structure constants", {"structure_btilde_box", "structure_g_box", "structure_h_box"}, 30.0,
       {{"structure_btilde_box", "C"}, {"structure_g_box", "C"}, {"structure_h_box", "C"}, {"structure_h_box", "inner_C"}}},
      {3, "constant ledger", {"ledger_identities", "worked_case"}, 1.0,
       {{"ledger_identities", "T_count"}, {"ledger_identities", "T_min"}, {"worked_case", "M"}, {"worked_case", "beta1"}}},
      {4, "barrier subsolution",
       {"barrier_subsolution_case_I", "barrier_subsolution_case_II", "barrier_subsolution_case_III",
        "barrier_subsolution_case_IV", "barrier_inadmissible_exponent"},
       30.0,
       {{"barrier_subsolution_case_I", "min_L_phi_scaled"},
        {"barrier_subsolution_case_II", "min_L_phi_scaled"},
        {"barrier_subsolution_case_III", "min_L_phi_scaled"},
        {"barrier_subsolution_case_IV", "min_L_phi_scaled"},
        {"barrier_inadmissible_exponent", "min_L_phi"}}},
      {5, "barrier boundary values", {"barrier_boundary_values"}, 0.0,
       {{"barrier_boundary_values", "max_inner_defect"},
        {"barrier_boundary_values", "max_outer_defect"},
        {"barrier_boundary_values", "case_I_M1_alpha_-6"}}},
      {6, "solver convergence", {"solver_quadratic_exact", "solver_convergence_mixed"}, 60.0,
       {{"solver_convergence_mixed", "ratio"}, {"solver_quadratic_exact", "error_random"}}},
      {7, "ABP relaxation", {"abp_relaxation"}, 0.0,
       {{"abp_relaxation", "min_margin"}, {"abp_relaxation", "max_homogeneous_negative"}}},
      {8, "Harnack ensemble", {"harnack_ensemble", "ensemble_double_ball", "ensemble_critical_density"}, 300.0,
       {{"harnack_ensemble", "max_quotient_coarse"},
        {"harnack_ensemble", "max_quotient_fine"},
        {"harnack_ensemble", "relative_change"},
        {"ensemble_double_ball", "non_vacuous"},
        {"ensemble_critical_density", "non_vacuous"}}},
      {9, "family closure", {"family_closure"}, 0.0,
       {{"family_closure", "flag_mismatches"}, {"family_closure", "quotient_defect"}}},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    bool ok = true;
    double seconds = 0.0;
    std::string notes;
    for (const auto& name : c.checks) {
      auto it = by_name.find(name);
      if (it == by_name.end()) {
        ok = false;
        notes += " missing:" + name;
        continue;
      }
      const CheckReport& r = *it->second;
      seconds += r.seconds;
      if (r.status != harness::CheckStatus::Pass) {
        ok = false;
        notes += " " + name + "=" + std::string(harness::to_string(r.status));
        if (!r.detail.empty()) notes += "(" + r.detail + ")";
      }
    }
    if (c.time_limit > 0.0 && seconds >= c.time_limit) {
      ok = false;
      notes += " over time limit";
    }
    std::string shown;
    for (const auto& [check, key] : c.shown) {
      auto it = by_name.find(check);
      if (it == by_name.end()) continue;
      char buf[128];
      std::snprintf(buf, sizeof buf, " %s.%s=%.6g", check.c_str(), key.c_str(), it->second->value(key));
      shown += buf;
    }
    std::printf("%s criterion %d (%s):%s  [%.2f s%s]%s\n", ok ? "PASS" : "FAIL", c.id, c.title, shown.c_str(), seconds,
                c.time_limit > 0.0 ? (" < " + std::to_string(static_cast<int>(c.time_limit)) + " s").c_str() : "",
                notes.c_str());
    if (!ok) ++failed;
  }
  std::printf("suite: %zu checks, %d failed, %d vacuous, total %.2f s\n", result.checks.size(),
              result.count(harness::CheckStatus::Fail), result.count(harness::CheckStatus::Vacuous), total);
  return failed == 0 ? 0 : 1;
}
