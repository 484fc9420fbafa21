#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "harnacklab/barriers.hpp"
#include "harnacklab/config.hpp"
#include "harnacklab/constants.hpp"
#include "harnacklab/grushin_geometry.hpp"
#include "harnacklab/harness.hpp"
#include "harnacklab/pde_solver.hpp"
#include "harnacklab/suite.hpp"

namespace py = pybind11;
using namespace hlab;

namespace {

Point2 pt(const std::pair<double, double>& p) { return {p.first, p.second}; }
std::pair<double, double> tup(const Point2& p) { return {p.x1, p.x2}; }

py::array_t<double> as_array(const pde::GridFunction& u) {
  py::array_t<double> out({u.grid.n2, u.grid.n1});
  auto v = out.mutable_unchecked<2>();
  for (int j = 0; j < u.grid.n2; ++j)
    for (int i = 0; i < u.grid.n1; ++i) v(j, i) = u(i, j);
  return out;
}

py::dict report_dict(const harness::CheckReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["kind"] = r.kind;
  d["status"] = std::string(harness::to_string(r.status));
  d["measured"] = r.measured;
  d["margins"] = r.margins;
  d["detail"] = r.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grushin-plane geometry, constant ledger, barriers and finite-difference checks";

  auto base = py::register_exception<Error>(m, "HarnackLabError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
  py::register_exception<DegenerateInput>(m, "DegenerateInput", base.ptr());
  py::register_exception<HypothesisViolation>(m, "HypothesisViolation", base.ptr());
  py::register_exception<ConstantInconsistency>(m, "ConstantInconsistency", base.ptr());
  py::register_exception<StructureViolation>(m, "StructureViolation", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());

  // geometry
  m.def("dtilde", [](std::pair<double, double> x, std::pair<double, double> y) { return grushin::dtilde(pt(x), pt(y)); });
  m.def("rho", [](std::pair<double, double> x, std::pair<double, double> y) { return grushin::rho(pt(x), pt(y)); });
  m.def("sigma", [](std::pair<double, double> x, std::pair<double, double> y) { return grushin::sigma(pt(x), pt(y)); });
  m.def("dilate", [](double t, std::pair<double, double> p) { return tup(grushin::dilate(t, pt(p))); });
  m.def("box_area", [](std::pair<double, double> c, double r) { return grushin::box_area(pt(c), r); });
  m.def("box_gauge", [](std::pair<double, double> c, double r, std::pair<double, double> p) {
    return grushin::box_gauge(pt(c), r, pt(p));
  });
  m.def(
      "region_measure",
      [](const std::string& kind, std::pair<double, double> c, double r, int resolution) {
        grushin::RegionDescriptor reg{grushin::region_kind_from_string(kind), pt(c), r, 3.0 * r};
        reg.validate();
        auto res = grushin::region_measure(reg, resolution);
        return std::make_pair(res.area, res.error_bound);
      },
      py::arg("kind"), py::arg("center"), py::arg("radius"), py::arg("resolution") = 64);
  m.def(
      "structure_constant",
      [](const std::string& kind, std::uint64_t seed, std::size_t regions, std::size_t rays) {
        grushin::StructureKind sk;
        if (kind == "btilde") sk = grushin::StructureKind::BTildeVsBox;
        else if (kind == "g") sk = grushin::StructureKind::GVsBox;
        else if (kind == "h") sk = grushin::StructureKind::HVsBox;
        else throw InvalidParameter("structure kind must be btilde, g or h");
        auto rep = grushin::structure_constant(sk, grushin::sample_regions(seed, regions), rays);
        py::dict d;
        d["constant"] = rep.constant;
        d["outer_constant"] = rep.outer_constant;
        d["inner_constant"] = rep.inner_constant;
        d["star_shaped"] = rep.star_shaped;
        return d;
      },
      py::arg("kind"), py::arg("seed") = 0, py::arg("regions") = 100, py::arg("rays") = 512);

  // constants
  m.def(
      "ledger_json",
      [](double gamma, double c, double eps, double eta, double nu, double K, double alpha_h, double beta_h, double C_D,
         const std::string& hypothesis, int k_max) {
        engine::PowerDecayInput pd;
        if (hypothesis == "ring") pd.hypothesis = engine::DecayHypothesis::RingCondition;
        else if (hypothesis == "small_density") pd.hypothesis = engine::DecayHypothesis::SmallDensity;
        else throw InvalidParameter("hypothesis must be ring or small_density");
        pd.k_max = k_max;
        auto sp = quasimetric::QuasiMetricSpec::make(K, alpha_h, beta_h, C_D, 0.5);
        return engine::ledger_json(engine::derive_all(engine::DBCDInput{gamma, c, eps, eta, nu}, sp, pd));
      },
      py::arg("gamma") = 0.5, py::arg("c") = 0.5, py::arg("eps") = 0.5, py::arg("eta") = 2.0, py::arg("nu") = 0.1,
      py::arg("K") = 1.0, py::arg("alpha_h") = 1.0, py::arg("beta_h") = 1.0, py::arg("C_D") = 2.0,
      py::arg("hypothesis") = "small_density", py::arg("k_max") = 64);

  // barriers
  m.def("barrier_alpha", &barriers::barrier_alpha);
  m.def("barrier_constants", [](std::pair<double, double> y, double r, double alpha) {
    auto s = barriers::db_barrier_constants(pt(y), r, alpha);
    py::dict d;
    d["case"] = std::string(barriers::to_string(s.case_id));
    d["M1"] = s.M1;
    d["M2"] = s.M2;
    d["M3"] = s.M3;
    return d;
  });

  // solver
  m.def(
      "solve_manufactured",
      [](const std::string& case_id, int n, const std::string& coefficients, std::uint64_t seed) {
        auto g = pde::Grid::make({{-1.0, -1.0}, {1.0, 1.0}}, n, n);
        auto field = coefficients == "random" ? pde::CoefficientField::random_patches(g, seed)
                                              : pde::CoefficientField::constant(g, Coeffs{});
        pde::ManufacturedResult res;
        {
          py::gil_scoped_release nogil;
          res = pde::solve_manufactured(pde::manufactured_case(case_id), field);
        }
        py::dict d;
        d["u"] = as_array(res.solution.u);
        d["max_error"] = res.max_error;
        d["residual"] = res.solution.residual_norm;
        return d;
      },
      py::arg("case") = "mixed", py::arg("n") = 65, py::arg("coefficients") = "identity", py::arg("seed") = 0);

  m.def(
      "verify_run",
      [](std::uint64_t seed, int n) {
        harness::EnsembleConfig cfg;
        cfg.n = n;
        cfg.seed = seed;
        auto grid = pde::Grid::make(cfg.window, n, n);
        auto pr = harness::make_problem(harness::ProblemFamily::Positive, grid, seed, cfg.f_amplitude, cfg.patches);
        auto sol = pde::solve_dirichlet(pr.coeffs, pr.f, pr.boundary);
        auto rec = harness::evaluate_run(cfg, sol.u, pr.f, seed);
        py::dict d;
        d["discarded"] = rec.discarded;
        d["quotient"] = rec.quotient;
        d["checks"] = py::make_tuple(report_dict(rec.db), report_dict(rec.cd), report_dict(rec.pd));
        return d;
      },
      py::arg("seed") = 0, py::arg("n") = 65);

  m.def(
      "run_suite",
      [](const std::string& config_text) {
        auto cfg = suite::SuiteConfig::from(config::KeyValues::parse_text(config_text, "<python>"));
        suite::SuiteResult res;
        {
          py::gil_scoped_release nogil;
          res = suite::run_suite(cfg);
        }
        return suite::suite_json(cfg, res);
      },
      py::arg("config_text") = "");
}
