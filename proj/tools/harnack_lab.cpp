#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "harnacklab/barriers.hpp"
#include "harnacklab/config.hpp"
#include "harnacklab/constants.hpp"
#include "harnacklab/grushin_geometry.hpp"
#include "harnacklab/harness.hpp"
#include "harnacklab/pde_solver.hpp"
#include "harnacklab/suite.hpp"

using namespace hlab;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kChecksFailed = 1, kUsage = 2, kRuntime = 3 };

struct Common {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string grid;
  std::string window;
};

// Config file first, then command-line overrides.
config::KeyValues load(const Common& c) {
  config::KeyValues kv = c.config_path.empty() ? config::KeyValues{} : config::KeyValues::load(c.config_path);
  if (c.seed) kv.set("seed", std::to_string(*c.seed));
  if (!c.grid.empty()) kv.set("grid", c.grid);
  if (!c.window.empty()) kv.set("window", c.window);
  return kv;
}

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(c.out_path);
  if (!out) throw Error("cannot write " + c.out_path);
  out << text << '\n';
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int run_geometry(const Common& c) {
  config::KeyValues kv = load(c);
  kv.require_known({"kind", "center", "radius", "outer_radius", "seed", "regions", "rays", "resolution", "csv",
                    "grid", "window"});
  auto kind = grushin::region_kind_from_string(kv.get_string("kind", "BTilde"));
  auto center_parts = kv.get_list("center", {"0", "0"});
  if (center_parts.size() != 2) throw ConfigError("center must be x1,x2");
  Point2 center{std::stod(center_parts[0]), std::stod(center_parts[1])};
  double radius = kv.get_double("radius", 1.0);
  grushin::RegionDescriptor region{kind, center, radius, kv.get_double("outer_radius", 3.0 * radius)};
  region.validate();
  auto m = grushin::region_measure(region, static_cast<int>(kv.get_int("resolution", 64)));
  auto d = grushin::region_diameter(region);

  json o;
  o["schema"] = "harnacklab.geometry/1";
  o["region"] = {{"kind", std::string(grushin::to_string(kind))},
                 {"center", {center.x1, center.x2}},
                 {"radius", radius},
                 {"outer_radius", region.outer_radius}};
  o["measure"] = {{"area", m.area}, {"error_bound", m.error_bound}, {"cells", m.cells}};
  o["diameter"] = d.diameter;

  auto regions = grushin::sample_regions(kv.get_u64("seed", 0), static_cast<std::size_t>(kv.get_int("regions", 100)));
  auto rays = static_cast<std::size_t>(kv.get_int("rays", 512));
  json arr = json::array();
  for (auto sk : {grushin::StructureKind::BTildeVsBox, grushin::StructureKind::GVsBox, grushin::StructureKind::HVsBox}) {
    auto rep = grushin::structure_constant(sk, regions, rays);
    arr.push_back({{"kind", std::string(grushin::to_string(sk))},
                   {"constant", rep.constant},
                   {"outer_constant", rep.outer_constant},
                   {"inner_constant", rep.inner_constant},
                   {"outer_witness", {rep.outer_witness.x1, rep.outer_witness.x2}},
                   {"inner_witness", {rep.inner_witness.x1, rep.inner_witness.x2}},
                   {"star_shaped", rep.star_shaped},
                   {"regions", rep.regions}});
  }
  o["structure"] = arr;
  if (kv.has("csv")) {
    std::ofstream csv(kv.get_string("csv", ""));
    if (!csv) throw Error("cannot write " + kv.get_string("csv", ""));
    grushin::write_region_csv(csv, region);
  }
  emit(c, o.dump(2));
  return kOk;
}

engine::DecayHypothesis hypothesis_from(const std::string& s) {
  if (s == "ring") return engine::DecayHypothesis::RingCondition;
  if (s == "small_density") return engine::DecayHypothesis::SmallDensity;
  if (s == "none") return engine::DecayHypothesis::None;
  throw ConfigError("hypothesis must be ring, small_density or none, got '" + s + "'");
}

int run_constants(const Common& c) {
  config::KeyValues kv = load(c);
  kv.require_known({"gamma", "c", "eps", "eta", "nu", "K", "alpha_h", "beta_h", "C_D", "delta_rd", "hypothesis",
                    "c_nu", "k_max", "seed", "grid", "window"});
  engine::DBCDInput in;
  in.gamma = kv.get_double("gamma", in.gamma);
  in.c = kv.get_double("c", in.c);
  in.eps = kv.get_double("eps", in.eps);
  in.eta = kv.get_double("eta", in.eta);
  in.nu = kv.get_double("nu", in.nu);
  auto space = quasimetric::QuasiMetricSpec::make(kv.get_double("K", 1.0), kv.get_double("alpha_h", 1.0),
                                                  kv.get_double("beta_h", 1.0), kv.get_double("C_D", 2.0),
                                                  kv.get_double("delta_rd", 0.5));
  engine::PowerDecayInput pd;
  pd.hypothesis = hypothesis_from(kv.get_string("hypothesis", "small_density"));
  pd.c_nu = kv.get_double("c_nu", pd.c_nu);
  pd.k_max = static_cast<int>(kv.get_int("k_max", pd.k_max));
  emit(c, engine::ledger_json(engine::derive_all(in, space, pd)));
  return kOk;
}

int run_solve(const Common& c, const std::string& csv_path) {
  config::KeyValues kv = load(c);
  kv.require_known({"n1", "n2", "grid", "window", "case", "coefficients", "seed", "patches"});
  auto sc = pde::SolverConfig::from(kv);
  auto field = sc.field();
  auto res = pde::solve_manufactured(pde::manufactured_case(sc.case_id), field);
  json o;
  o["schema"] = "harnacklab.solve/1";
  o["case"] = sc.case_id;
  o["coefficients"] = sc.coefficients;
  o["seed"] = sc.seed;
  o["grid"] = std::to_string(sc.grid.n1) + "x" + std::to_string(sc.grid.n2);
  o["window"] = {sc.grid.window.lo.x1, sc.grid.window.hi.x1, sc.grid.window.lo.x2, sc.grid.window.hi.x2};
  o["residual"] = res.solution.residual_norm;
  o["max_error"] = res.max_error;
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot write " + csv_path);
    pde::write_grid_csv(csv, res.solution.u);
    o["csv"] = csv_path;
  }
  emit(c, o.dump(2));
  return kOk;
}

json report_json(const harness::CheckReport& r) { return json::parse(suite::check_json(r, -1)); }

int run_verify(const Common& c, const std::string& csv_path) {
  config::KeyValues kv = load(c);
  kv.require_known({"seed", "grid", "window", "f_amplitude", "patches", "x0", "r", "eta"});
  harness::EnsembleConfig cfg;
  if (kv.has("grid")) {
    auto [n1, n2] = config::parse_grid(kv.get_string("grid", ""));
    if (n1 != n2) throw ConfigError("verify uses square grids");
    cfg.n = n1;
  }
  if (kv.has("window")) cfg.window = config::parse_window(kv.get_string("window", ""));
  cfg.seed = kv.get_u64("seed", 0);
  cfg.f_amplitude = kv.get_double("f_amplitude", cfg.f_amplitude);
  cfg.patches = static_cast<int>(kv.get_int("patches", cfg.patches));
  if (kv.has("x0")) {
    auto p = kv.get_list("x0", {});
    if (p.size() != 2) throw ConfigError("x0 must be x1,x2");
    cfg.x0 = {std::stod(p[0]), std::stod(p[1])};
  }
  cfg.r = kv.get_double("r", cfg.r);
  cfg.eta = kv.get_double("eta", cfg.eta);

  auto grid = pde::Grid::make(cfg.window, cfg.n, cfg.n);
  auto pr = harness::make_problem(harness::ProblemFamily::Positive, grid, cfg.seed, cfg.f_amplitude, cfg.patches);
  auto sol = pde::solve_dirichlet(pr.coeffs, pr.f, pr.boundary);
  auto rec = harness::evaluate_run(cfg, sol.u, pr.f, cfg.seed);
  json o;
  o["schema"] = "harnacklab.verify/1";
  o["seed"] = cfg.seed;
  o["grid"] = std::to_string(cfg.n) + "x" + std::to_string(cfg.n);
  o["residual"] = sol.residual_norm;
  o["min_u"] = rec.min_u;
  o["discarded"] = rec.discarded;
  if (!rec.discarded) {
    o["harnack_quotient"] = num(rec.quotient);
    o["checks"] = {report_json(rec.db), report_json(rec.cd), report_json(rec.pd)};
  }
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot write " + csv_path);
    pde::write_grid_csv(csv, sol.u);
  }
  emit(c, o.dump(2));
  bool ok = !rec.discarded && rec.db.passed() && rec.cd.passed() && rec.pd.passed();
  return ok ? kOk : kChecksFailed;
}

int run_suite(const Common& c) {
  auto cfg = suite::SuiteConfig::from(load(c));
  auto res = suite::run_suite(cfg);
  emit(c, suite::suite_json(cfg, res));
  for (const auto& r : res.checks)
    std::cerr << (r.status == harness::CheckStatus::Fail ? "FAIL " : r.vacuous() ? "VACUOUS " : "PASS ") << r.name
              << (r.detail.empty() ? "" : "  (" + r.detail + ")") << '\n';
  return res.ok() ? kOk : kChecksFailed;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out_path, "write the JSON report here instead of stdout");
  sub->add_option("--seed", c.seed, "seed for every sampled quantity");
  sub->add_option("--grid", c.grid, "grid size n1xn2");
  sub->add_option("--window", c.window, "x1min,x1max,x2min,x2max");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grushin-plane Harnack inequality laboratory"};
  app.require_subcommand(1);
  Common common;
  std::string csv_path;

  auto* geometry = app.add_subcommand("geometry", "region measure, diameter and structure constants");
  add_common(geometry, common);
  auto* constants = app.add_subcommand("constants", "derive the structural constant ledger");
  add_common(constants, common);
  auto* solve = app.add_subcommand("solve", "solve a manufactured Dirichlet problem");
  add_common(solve, common);
  solve->add_option("--csv", csv_path, "write the solution as CSV (i,j,x1,x2,value)");
  auto* verify = app.add_subcommand("verify", "solve one seeded problem and run the PDE checks on it");
  add_common(verify, common);
  verify->add_option("--csv", csv_path, "write the solution as CSV (i,j,x1,x2,value)");
  auto* suite_cmd = app.add_subcommand("suite", "run the full verification suite");
  add_common(suite_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*geometry) return run_geometry(common);
    if (*constants) return run_constants(common);
    if (*solve) return run_solve(common, csv_path);
    if (*verify) return run_verify(common, csv_path);
    if (*suite_cmd) return run_suite(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: malformed number\n";
    return kUsage;
  }
  return kUsage;
}
