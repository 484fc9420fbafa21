#include "harnacklab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "harnacklab/barriers.hpp"
#include "harnacklab/constants.hpp"
#include "harnacklab/quasimetric.hpp"

namespace hlab::suite {

using harness::CheckStatus;
using json = nlohmann::ordered_json;

namespace {

CheckReport make(std::string kind, std::string name, double tolerance) {
  CheckReport r;
  r.kind = std::move(kind);
  r.name = std::move(name);
  r.tolerance = tolerance;
  return r;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::string params_digest(const std::string& name, std::initializer_list<double> params) {
  std::ostringstream s;
  s.precision(17);
  s << name;
  for (double p : params) s << '|' << p;
  return harness::digest_hex(s.str());
}

// A check that did not run to completion because a library call threw.
CheckReport errored(std::string kind, std::string name, const std::exception& e) {
  CheckReport r = make(std::move(kind), std::move(name), 0.0);
  r.status = CheckStatus::Fail;
  r.detail = std::string("error: ") + e.what();
  return r;
}

template <typename Fn>
void guarded(std::vector<CheckReport>& out, const std::string& kind, const std::string& name, Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    out.push_back(fn());
  } catch (const Error& e) {
    out.push_back(errored(kind, name, e));
  }
  out.back().seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json pairs_json(const std::vector<std::pair<std::string, double>>& v) {
  json o = json::object();
  for (const auto& [k, x] : v) o[k] = number(x);
  return o;
}

json report_object(const CheckReport& r) {
  json o;
  o["name"] = r.name;
  o["kind"] = r.kind;
  o["status"] = std::string(harness::to_string(r.status));
  o["digest"] = r.digest;
  o["constants"] = pairs_json(r.constants);
  o["measured"] = pairs_json(r.measured);
  o["margins"] = pairs_json(r.margins);
  o["tolerance"] = r.tolerance;
  o["detail"] = r.detail;
  return o;
}

struct BarrierCaseSetup {
  const char* name;
  Point2 y;
};

constexpr BarrierCaseSetup kBarrierCases[] = {
    {"I", {0.3, 0.5}}, {"II", {4.0, -0.5}}, {"III", {1.5, 0.25}}, {"IV", {2.5, 0.0}}};

}  // namespace

SuiteConfig SuiteConfig::from(const config::KeyValues& kv) {
  kv.require_known({"sections", "seed", "grid", "window", "regions", "rays", "lambda", "Lambda", "barrier_fields",
                    "barrier_samples", "runs", "f_amplitude", "closure_runs"});
  SuiteConfig c;
  c.sections = kv.get_list("sections", c.sections);
  for (const auto& s : c.sections) {
    if (s != "geometry" && s != "engine" && s != "barriers" && s != "solver" && s != "pde")
      throw ConfigError("unknown suite section '" + s + "'");
  }
  c.seed = kv.get_u64("seed", c.seed);
  c.ensemble.seed = c.seed;
  c.abp.seed = c.seed;
  if (kv.has("grid")) {
    auto [n1, n2] = config::parse_grid(kv.get_string("grid", ""));
    if (n1 != n2) throw ConfigError("suite grids are square; got " + std::to_string(n1) + "x" + std::to_string(n2));
    c.ensemble.n = n1;
    c.abp.n = n1;
  }
  if (kv.has("window")) c.ensemble.window = config::parse_window(kv.get_string("window", ""));
  c.regions = static_cast<std::size_t>(kv.get_int("regions", static_cast<long long>(c.regions)));
  c.rays = static_cast<std::size_t>(kv.get_int("rays", static_cast<long long>(c.rays)));
  c.lambda = kv.get_double("lambda", c.lambda);
  c.Lambda = kv.get_double("Lambda", c.Lambda);
  c.barrier_fields = static_cast<int>(kv.get_int("barrier_fields", c.barrier_fields));
  c.barrier_samples = static_cast<std::size_t>(kv.get_int("barrier_samples", static_cast<long long>(c.barrier_samples)));
  c.ensemble.runs = static_cast<int>(kv.get_int("runs", c.ensemble.runs));
  c.ensemble.f_amplitude = kv.get_double("f_amplitude", c.ensemble.f_amplitude);
  c.closure_runs = static_cast<int>(kv.get_int("closure_runs", c.closure_runs));
  if (c.regions < 1 || c.rays < 16 || c.barrier_fields < 1 || c.barrier_samples < 1 || c.ensemble.runs < 1 ||
      c.closure_runs < 1)
    throw ConfigError("counts must be positive (rays >= 16)");
  if (!(c.lambda > 0.0) || !(c.Lambda >= c.lambda)) throw ConfigError("need 0 < lambda <= Lambda");
  if (!(c.ensemble.f_amplitude >= 0.0 && c.ensemble.f_amplitude <= 1.0))
    throw ConfigError("f_amplitude must lie in [0, 1]");
  return c;
}

bool SuiteConfig::wants(const std::string& section) const {
  return std::find(sections.begin(), sections.end(), section) != sections.end();
}

int SuiteResult::count(CheckStatus s) const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [&](const CheckReport& r) { return r.status == s; }));
}

bool SuiteResult::ok() const { return count(CheckStatus::Fail) == 0; }

std::vector<CheckReport> geometry_checks(const SuiteConfig& cfg) {
  using namespace grushin;
  std::vector<CheckReport> out;

  guarded(out, "geometry", "dtilde_closed_form", [&] {
    CheckReport r = make("geometry", "dtilde_closed_form", 0.0);
    r.digest = params_digest(r.name, {});
    double a = dtilde({0, 0}, {0, 1});
    double b = dtilde({1, 0}, {1, 1});
    r.measured = {{"dtilde_origin", a}, {"dtilde_shifted", b}};
    r.margins = {{"origin", 1e-3 - rel_err(a, 2.0)}, {"shifted", 1e-3 - rel_err(b, std::sqrt(6.0) - std::sqrt(2.0))}};
    r.settle();
    return r;
  });

  guarded(out, "geometry", "box_measure_and_doubling", [&] {
    CheckReport r = make("geometry", "box_measure_and_doubling", 0.0);
    r.digest = params_digest(r.name, {});
    auto measure = [](const Point2& c, double rad) { return region_measure(RegionDescriptor::box(c, rad)).area; };
    std::vector<quasimetric::Ball<Point2>> balls{{{0, 0}, 1.0}, {{0, 0}, 0.25}};
    auto dbl = quasimetric::doubling_constant(measure, std::span<const quasimetric::Ball<Point2>>(balls));
    auto rev = quasimetric::reverse_doubling(measure, std::span<const quasimetric::Ball<Point2>>(balls));
    double area = measure({0, 0}, 1.0);
    r.measured = {{"box_area", area}, {"doubling", dbl.value}, {"q", dbl.q}, {"reverse_doubling", rev.value}};
    r.margins = {{"area", 1e-3 - rel_err(area, 4.0)},
                 {"doubling", 1e-3 - rel_err(dbl.value, 8.0)},
                 {"reverse", 1e-3 - rel_err(rev.value, 0.125)}};
    r.settle();
    return r;
  });

  guarded(out, "geometry", "quasi_triangle_dtilde", [&] {
    CheckReport r = make("geometry", "quasi_triangle_dtilde", 0.0);
    r.digest = params_digest(r.name, {double(cfg.seed)});
    Halton2 seq(cfg.seed);
    std::vector<quasimetric::Triple<Point2>> triples;
    for (int k = 0; k < 4000; ++k)
      triples.push_back({seq.next_in({-2, -2}, {2, 2}), seq.next_in({-2, -2}, {2, 2}), seq.next_in({-2, -2}, {2, 2})});
    auto est = quasimetric::estimate_quasi_triangle_K(
        [](const Point2& a, const Point2& b) { return dtilde(a, b); },
        std::span<const quasimetric::Triple<Point2>>(triples));
    r.constants = {{"K_max", 2.0}};
    r.measured = {{"K_estimate", est.value}, {"triples", double(est.used)}};
    r.margins = {{"K", 2.0 - est.value}};
    r.detail = "sampled lower bound of the quasi-triangle constant";
    r.settle();
    return r;
  });

  auto regions = sample_regions(cfg.seed, cfg.regions);
  const std::pair<StructureKind, const char*> kinds[] = {
      {StructureKind::BTildeVsBox, "structure_btilde_box"},
      {StructureKind::GVsBox, "structure_g_box"},
      {StructureKind::HVsBox, "structure_h_box"}};
  for (const auto& [kind, name] : kinds) {
    guarded(out, "geometry", name, [&, kind = kind, name = name] {
      CheckReport r = make("geometry", name, 0.0);
      r.digest = params_digest(r.name, {double(cfg.seed), double(cfg.regions), double(cfg.rays)});
      auto rep = structure_constant(kind, regions, cfg.rays);
      r.constants = {{"C_bound", cfg.structure_bound}};
      r.measured = {{"C", rep.constant},
                    {"outer_C", rep.outer_constant},
                    {"inner_C", rep.inner_constant},
                    {"regions", double(rep.regions)},
                    {"star_shaped", rep.star_shaped ? 1.0 : 0.0}};
      r.margins = {{"C", cfg.structure_bound - rep.constant}};
      if (kind == StructureKind::HVsBox) r.margins.emplace_back("inner_C", cfg.h_inner_bound - rep.inner_constant);
      r.settle();
      return r;
    });
  }
  return out;
}

std::vector<CheckReport> engine_checks(const SuiteConfig& /*cfg*/) {
  using namespace engine;
  std::vector<CheckReport> out;

  guarded(out, "engine", "ledger_identities", [&] {
    CheckReport r = make("engine", "ledger_identities", 0.0);
    r.digest = params_digest(r.name, {});
    DBCDInput in{0.3, 0.4, 0.2, 3.0, 0.05};
    auto sp = quasimetric::QuasiMetricSpec::make(1.5, 0.8, 2.0, 3.0, 0.5);
    PowerDecayInput pd{DecayHypothesis::RingCondition, -1.0, 10000};
    ConstantLedger l = derive_all(in, sp, pd);
    double tmin = *std::min_element(l.T.begin(), l.T.end());
    double tmax = *std::max_element(l.T.begin(), l.T.end());
    double eta = 2.0 * sp.K * (2.0 * sp.K * l.eta_P + 1.0);
    r.measured = {{"gamma_pow_sigma", std::pow(in.gamma, l.sigma_exp)},
                  {"M0_gamma_c", l.M0 * in.gamma * in.c},
                  {"eps_P", l.eps_P},
                  {"eta_harnack", l.eta_harnack},
                  {"T1", l.T.front()},
                  {"T_min", tmin},
                  {"T_count", double(l.T.size())},
                  {"ln_C_harnack", l.log_C_harnack}};
    r.margins = {{"gamma_pow_sigma", 1e-12 - std::abs(std::pow(in.gamma, l.sigma_exp) - 0.5)},
                 {"M0_gamma_c", 1e-12 - std::abs(l.M0 * in.gamma * in.c - 1.0)},
                 {"eps_P", 1e-12 - std::abs(l.eps_P - in.eps * in.c)},
                 {"eta_harnack", 1e-12 * eta - std::abs(l.eta_harnack - eta)},
                 {"T1", 1e-12 - std::abs(l.T.front() - 0.75)},
                 {"T_lower", tmin - 0.5},
                 {"T_upper", 0.75 - tmax},
                 {"C_harnack_above_one", std::isfinite(l.log_C_harnack) && l.log_C_harnack > 0.0 ? 1.0 : -1.0}};
    r.settle();
    return r;
  });

  guarded(out, "engine", "worked_case", [&] {
    CheckReport r = make("engine", "worked_case", 0.0);
    r.digest = params_digest(r.name, {});
    ConstantLedger l;
    DBCDInput in{0.5, 0.5, 0.5, 2.0, 0.1};
    derive_m0_sigma_m1_theta(l, in, 1.0);
    choose_M(l, 1.0, 1.0, 1.0);
    auto T = tk_sequence(l.beta1, l.q_pd, 2);
    r.measured = {{"M0", l.M0}, {"sigma", l.sigma_exp}, {"M1", l.M1}, {"beta1", l.beta1}, {"M", l.M}, {"T2", T[1]}};
    r.margins = {{"M0", 1e-12 - std::abs(l.M0 - 4.0)},
                 {"sigma", 1e-12 - std::abs(l.sigma_exp - 1.0)},
                 {"M1", 1e-12 - std::abs(l.M1 - 16.0)},
                 {"beta1", 1e-12 - std::abs(l.beta1 - 16.0)},
                 {"M", 1e-12 - std::abs(l.M - 16.0)},
                 {"T2", 1e-12 - std::abs(T[1] - (0.75 - 1.0 / 256.0))}};
    r.settle();
    return r;
  });

  guarded(out, "engine", "harnack_constant_monotone_in_gamma", [&] {
    CheckReport r = make("engine", "harnack_constant_monotone_in_gamma", 0.0);
    r.digest = params_digest(r.name, {});
    auto sp = quasimetric::QuasiMetricSpec::make(2.0, 0.5, 1.0, 4.0, 0.5);
    PowerDecayInput pd{DecayHypothesis::SmallDensity, -1.0, 64};
    const double gammas[] = {0.9, 0.7, 0.5, 0.3, 0.1};
    const double cs[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    double worst = std::numeric_limits<double>::infinity();
    for (double c : cs) {
      ConstantLedger prev;
      bool first = true;
      for (double g : gammas) {
        ConstantLedger l = derive_all(DBCDInput{g, c, 0.5, 2.0, 0.01}, sp, pd);
        if (!first) {
          worst = std::min({worst, l.M0 - prev.M0, l.M1 - prev.M1, l.log_C_harnack - prev.log_C_harnack});
        }
        prev = l;
        first = false;
      }
    }
    r.margins = {{"monotone", worst}};
    r.detail = "M0, M1, ln C_harnack non-decreasing as gamma decreases on a 5x5 (gamma, c) grid";
    r.settle();
    return r;
  });

  guarded(out, "engine", "cd_implies_db_threshold", [&] {
    CheckReport r = make("engine", "cd_implies_db_threshold", 0.0);
    r.digest = params_digest(r.name, {});
    CDConstants cd{0.2, 0.3, 0.4, 2.0};
    DBConstants db = cd_implies_db(0.2, 2.0, cd);
    bool rejected = false;
    try {
      cd_implies_db(0.3, 2.0, cd);
    } catch (const HypothesisViolation&) {
      rejected = true;
    }
    r.measured = {{"gamma_db", db.gamma}, {"eta_db", db.eta}};
    r.margins = {{"gamma_is_c", 1e-15 - std::abs(db.gamma - cd.c)},
                 {"eta_doubled", 1e-15 - std::abs(db.eta - 2.0 * cd.eta)},
                 {"threshold_rejects", rejected ? 1.0 : -1.0}};
    r.settle();
    return r;
  });
  return out;
}

std::vector<CheckReport> barrier_checks(const SuiteConfig& cfg) {
  using namespace barriers;
  std::vector<CheckReport> out;
  const double alpha = barrier_alpha(cfg.lambda, cfg.Lambda);
  const double r0 = 1.0;

  for (const auto& bc : kBarrierCases) {
    std::string name = std::string("barrier_subsolution_case_") + bc.name;
    guarded(out, "barrier", name, [&] {
      CheckReport r = make("barrier", name, 0.0);
      r.digest = params_digest(name, {cfg.lambda, cfg.Lambda, double(cfg.barrier_fields), double(cfg.barrier_samples),
                                      double(cfg.seed)});
      BarrierSpec spec = db_barrier_constants(bc.y, r0, alpha);
      auto samples = ring_samples(bc.y, r0, 3.0 * r0, cfg.barrier_samples, cfg.seed);
      double worst = std::numeric_limits<double>::infinity();
      for (int k = 0; k < cfg.barrier_fields; ++k) {
        Coeffs a = random_admissible_coeffs(cfg.seed * 1000 + static_cast<std::uint64_t>(k), cfg.lambda, cfg.Lambda);
        auto rep = verify_subsolution(spec, a, samples);
        worst = std::min(worst, rep.min_value / rep.scale);
      }
      r.constants = {{"alpha", alpha}, {"lambda", cfg.lambda}, {"Lambda", cfg.Lambda}};
      r.measured = {{"min_L_phi_scaled", worst}, {"M1", spec.M1}, {"M2", spec.M2}, {"M3", spec.M3}};
      r.margins = {{"subsolution", worst + 1e-8}};
      r.settle();
      return r;
    });
  }

  guarded(out, "barrier", "barrier_inadmissible_exponent", [&] {
    CheckReport r = make("barrier", "barrier_inadmissible_exponent", 0.0);
    r.digest = params_digest(r.name, {double(cfg.seed)});
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& bc : kBarrierCases) {
      BarrierSpec spec = ring_normalization(bc.y, r0, 2.0);
      auto samples = ring_samples(bc.y, r0, 3.0 * r0, 2000, cfg.seed);
      worst = std::min(worst, verify_subsolution(spec, Coeffs{}, samples).min_value);
    }
    r.measured = {{"min_L_phi", worst}};
    r.margins = {{"negative_found", worst < 0.0 ? 1.0 : -1.0}};
    r.detail = "alpha = +2 must fail to be a subsolution";
    r.settle();
    return r;
  });

  guarded(out, "barrier", "barrier_boundary_values", [&] {
    CheckReport r = make("barrier", "barrier_boundary_values", 0.0);
    r.digest = params_digest(r.name, {cfg.lambda, cfg.Lambda});
    double worst_inner = 0.0;
    double worst_outer = 0.0;
    for (const auto& bc : kBarrierCases) {
      BarrierSpec spec = db_barrier_constants(bc.y, r0, alpha);
      for (const auto& p : h_boundary_samples(bc.y, r0, 512))
        worst_inner = std::max(worst_inner, std::abs(db_barrier_eval(spec, p) - 1.0));
      for (const auto& p : h_boundary_samples(bc.y, 3.0 * r0, 512))
        worst_outer = std::max(worst_outer, std::abs(db_barrier_eval(spec, p)));
    }
    BarrierSpec six = db_barrier_constants({0.0, 0.0}, 1.0, -6.0);
    r.measured = {{"max_inner_defect", worst_inner}, {"max_outer_defect", worst_outer}, {"case_I_M1_alpha_-6", six.M1}};
    r.margins = {{"inner", 1e-10 - worst_inner},
                 {"outer", 1e-10 - worst_outer},
                 {"case_I_M1", 1e-15 - std::abs(six.M1 - 1.0 / 728.0)}};
    r.settle();
    return r;
  });
  return out;
}

std::vector<CheckReport> solver_checks(const SuiteConfig& cfg) {
  using namespace pde;
  std::vector<CheckReport> out;
  const Grid coarse = Grid::make(cfg.solver_window, cfg.n_coarse, cfg.n_coarse);

  guarded(out, "solver", "solver_quadratic_exact", [&] {
    CheckReport r = make("solver", "solver_quadratic_exact", 0.0);
    r.digest = params_digest(r.name, {double(cfg.n_coarse), double(cfg.seed)});
    double e_id = solve_manufactured(manufactured_case("x2sq"), CoefficientField::constant(coarse, Coeffs{})).max_error;
    double e_rand =
        solve_manufactured(manufactured_case("x2sq"), CoefficientField::random_patches(coarse, cfg.seed)).max_error;
    r.measured = {{"error_identity", e_id}, {"error_random", e_rand}};
    r.margins = {{"identity", 1e-9 - e_id}, {"random", 1e-9 - e_rand}};
    r.settle();
    return r;
  });

  guarded(out, "solver", "solver_convergence_mixed", [&] {
    CheckReport r = make("solver", "solver_convergence_mixed", 0.0);
    r.digest = params_digest(r.name, {double(cfg.n_coarse), double(cfg.n_fine), double(cfg.seed)});
    auto rep = convergence_study(manufactured_case("mixed"), cfg.solver_window, cfg.n_coarse, cfg.n_fine,
                                 [&](const Grid& g) { return CoefficientField::random_patches(g, cfg.seed); });
    r.measured = {{"error_coarse", rep.error_coarse}, {"error_fine", rep.error_fine}, {"ratio", rep.ratio}};
    r.margins = {{"ratio_low", rep.ratio - 3.3}, {"ratio_high", 4.7 - rep.ratio}};
    r.settle();
    return r;
  });

  guarded(out, "solver", "solver_linearity_and_max_principle", [&] {
    CheckReport r = make("solver", "solver_linearity_and_max_principle", 0.0);
    r.digest = params_digest(r.name, {double(cfg.n_coarse), double(cfg.seed)});
    auto a = CoefficientField::random_patches(coarse, cfg.seed);
    auto p1 = harness::make_problem(harness::ProblemFamily::Positive, coarse, cfg.seed + 1, 1.0);
    auto p2 = harness::make_problem(harness::ProblemFamily::Supersolution, coarse, cfg.seed + 2, 1.0);
    auto u1 = solve_dirichlet(a, p1.f, p1.boundary).u;
    auto u2 = solve_dirichlet(a, p2.f, p2.boundary).u;
    auto u12 = solve_dirichlet(a, p1.f + p2.f, p1.boundary + p2.boundary).u;
    auto u7 = solve_dirichlet(a, 7.0 * p1.f, 7.0 * p1.boundary).u;
    double lin = 0.0;
    double scl = 0.0;
    double top = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      lin = std::max(lin, std::abs(u12.values[k] - u1.values[k] - u2.values[k]));
      scl = std::max(scl, std::abs(u7.values[k] - 7.0 * u1.values[k]));
      top = std::max(top, std::abs(u7.values[k]));
    }
    // a12 = 0 and f <= 0: the minimum is attained on the boundary.
    auto diag = CoefficientField::from_function(
        coarse, [&](const Point2& p) { return Coeffs{1.0 + 0.5 * std::sin(3.0 * p.x1), 0.0, 1.5 + 0.5 * std::cos(2.0 * p.x2)}; },
        0.5, 2.0);
    GridFunction fneg = -1.0 * p2.f;
    auto um = solve_dirichlet(diag, fneg, p1.boundary).u;
    double bmin = std::numeric_limits<double>::infinity();
    double imin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < coarse.n2; ++j) {
      for (int i = 0; i < coarse.n1; ++i) {
        double& m = coarse.is_boundary(i, j) ? bmin : imin;
        m = std::min(m, um(i, j));
      }
    }
    r.measured = {{"linearity_defect", lin}, {"scaling_defect", scl}, {"interior_min", imin}, {"boundary_min", bmin}};
    r.margins = {{"linearity", 1e-9 - lin}, {"scaling", 1e-9 * std::max(1.0, top) - scl}, {"max_principle", imin - bmin + 1e-12}};
    r.settle();
    return r;
  });
  return out;
}

std::vector<CheckReport> pde_checks(const SuiteConfig& cfg) {
  std::vector<CheckReport> out;

  guarded(out, "abp", "abp_relaxation", [&] {
    CheckReport r = make("abp", "abp_relaxation", 0.0);
    r.digest = params_digest(r.name, {double(cfg.abp.n), double(cfg.abp.seed), cfg.abp.amplitude});
    auto st = harness::run_abp_study(cfg.abp);
    double max_dip = 0.0;
    for (const auto& a : st.supersolution) max_dip = std::max(max_dip, a.sup_negative);
    r.constants = {{"fitted_C", st.fitted_C}, {"safety", cfg.abp.safety}};
    r.measured = {{"min_margin", st.min_margin},
                  {"max_supersolution_dip", max_dip},
                  {"max_homogeneous_negative", st.max_homogeneous_negative},
                  {"test_runs", double(st.supersolution.size())}};
    r.margins = {{"supersolution", st.min_margin}, {"homogeneous", 1e-8 - st.max_homogeneous_negative}};
    r.settle();
    return r;
  });

  harness::EnsembleResult coarse;
  bool have_coarse = false;
  guarded(out, "harnack", "harnack_ensemble", [&] {
    CheckReport r = make("harnack", "harnack_ensemble", 0.0);
    harness::EnsembleConfig fine_cfg = cfg.ensemble;
    fine_cfg.n = 2 * cfg.ensemble.n - 1;
    r.digest = params_digest(r.name, {double(cfg.ensemble.n), double(cfg.ensemble.seed), double(cfg.ensemble.runs),
                                      cfg.ensemble.f_amplitude});
    coarse = harness::run_ensemble(cfg.ensemble);
    have_coarse = true;
    auto fine = harness::run_ensemble(fine_cfg);
    bool finite = true;
    for (const auto* ens : {&coarse, &fine})
      for (const auto& run : ens->runs) finite = finite && (run.discarded || std::isfinite(run.quotient));
    const double change = std::abs(fine.max_quotient - coarse.max_quotient) / coarse.max_quotient;
    r.constants = {{"eta", cfg.ensemble.eta}, {"r", cfg.ensemble.r}, {"stability_bound", cfg.stability_bound}};
    r.measured = {{"max_quotient_coarse", coarse.max_quotient},
                  {"max_quotient_fine", fine.max_quotient},
                  {"relative_change", change},
                  {"kept_coarse", double(coarse.kept)},
                  {"kept_fine", double(fine.kept)},
                  {"n_coarse", double(cfg.ensemble.n)},
                  {"n_fine", double(fine_cfg.n)}};
    r.margins = {{"finite", finite ? 1.0 : -1.0}, {"stability", cfg.stability_bound - change}};
    r.settle();
    return r;
  });

  if (have_coarse) {
    struct Item {
      const char* kind;
      const char* name;
      int harness::EnsembleResult::*count;
      harness::CheckReport harness::RunRecord::*report;
    };
    const Item items[] = {{"double_ball", "ensemble_double_ball", &harness::EnsembleResult::db_nonvacuous, &harness::RunRecord::db},
                          {"critical_density", "ensemble_critical_density", &harness::EnsembleResult::cd_nonvacuous, &harness::RunRecord::cd},
                          {"power_decay", "ensemble_power_decay", &harness::EnsembleResult::pd_nonvacuous, &harness::RunRecord::pd}};
    for (const auto& it : items) {
      CheckReport r = make(it.kind, it.name, 0.0);
      r.digest = params_digest(r.name, {double(cfg.ensemble.n), double(cfg.ensemble.seed), double(cfg.ensemble.runs)});
      int failed = 0;
      for (const auto& run : coarse.runs)
        if (!run.discarded && !(run.*it.report).passed()) ++failed;
      const int nonvac = coarse.*it.count;
      r.measured = {{"non_vacuous", double(nonvac)}, {"failed", double(failed)}, {"kept", double(coarse.kept)}};
      r.margins = {{"no_failures", failed == 0 ? 1.0 : -1.0}, {"non_vacuous_at_least_10", double(nonvac - 10)}};
      r.settle();
      out.push_back(std::move(r));
    }
  }

  guarded(out, "closure", "family_closure", [&] {
    CheckReport r = make("closure", "family_closure", 0.0);
    r.digest = params_digest(r.name, {double(cfg.ensemble.n), double(cfg.ensemble.seed), double(cfg.closure_runs)});
    auto res = harness::family_closure(cfg.ensemble, cfg.closure_lambdas, cfg.closure_runs);
    r.measured = {{"comparisons", double(res.comparisons)},
                  {"flag_mismatches", double(res.flag_mismatches)},
                  {"quotient_defect", res.max_quotient_defect},
                  {"margin_defect", res.max_margin_defect}};
    r.margins = {{"flags", res.flag_mismatches == 0 ? 1.0 : -1.0}, {"quotient", 1e-12 - res.max_quotient_defect}};
    r.settle();
    return r;
  });
  return out;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  using Section = std::vector<CheckReport> (*)(const SuiteConfig&);
  const std::pair<const char*, Section> sections[] = {{"geometry", geometry_checks},
                                                      {"engine", engine_checks},
                                                      {"barriers", barrier_checks},
                                                      {"solver", solver_checks},
                                                      {"pde", pde_checks}};
  // sections own nothing in common; results are appended in a fixed order
  std::vector<std::future<std::vector<CheckReport>>> pending;
  SuiteResult res;
  for (const auto& [name, fn] : sections) {
    if (!cfg.wants(name)) continue;
    if (std::string(name) == "solver" || std::string(name) == "pde") res.solver_invoked = true;
    pending.push_back(std::async(std::launch::async, fn, std::cref(cfg)));
  }
  for (auto& f : pending)
    for (auto& r : f.get()) res.checks.push_back(std::move(r));
  return res;
}

std::string check_json(const CheckReport& report, int indent) {
  json o;
  o["schema"] = "harnacklab.check/1";
  json body = report_object(report);
  for (auto& [k, v] : body.items()) o[k] = v;
  return o.dump(indent);
}

std::string suite_json(const SuiteConfig& cfg, const SuiteResult& result, int indent) {
  json o;
  o["schema"] = "harnacklab.suite/1";
  json c;
  c["sections"] = cfg.sections;
  c["seed"] = cfg.seed;
  c["regions"] = cfg.regions;
  c["rays"] = cfg.rays;
  c["lambda"] = cfg.lambda;
  c["Lambda"] = cfg.Lambda;
  c["barrier_fields"] = cfg.barrier_fields;
  c["barrier_samples"] = cfg.barrier_samples;
  c["grid"] = std::to_string(cfg.ensemble.n) + "x" + std::to_string(cfg.ensemble.n);
  c["window"] = {cfg.ensemble.window.lo.x1, cfg.ensemble.window.hi.x1, cfg.ensemble.window.lo.x2,
                 cfg.ensemble.window.hi.x2};
  c["runs"] = cfg.ensemble.runs;
  c["f_amplitude"] = cfg.ensemble.f_amplitude;
  o["config"] = c;
  json arr = json::array();
  for (const auto& r : result.checks) arr.push_back(report_object(r));
  o["checks"] = arr;
  json s;
  s["total"] = result.checks.size();
  s["passed"] = result.count(CheckStatus::Pass);
  s["failed"] = result.count(CheckStatus::Fail);
  s["vacuous"] = result.count(CheckStatus::Vacuous);
  s["solver_invoked"] = result.solver_invoked;
  s["ok"] = result.ok();
  o["summary"] = s;
  return o.dump(indent);
}

}  // namespace hlab::suite
