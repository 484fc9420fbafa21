#include "harnacklab/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace hlab::pde {

Grid Grid::make(const grushin::Rect& window, int n1, int n2) {
  if (n1 < 9 || n2 < 9) throw InvalidParameter("grid needs at least 9 nodes per direction");
  if (!(window.width() > 0.0) || !(window.height() > 0.0) || !is_finite(window.lo) || !is_finite(window.hi))
    throw InvalidParameter("grid window must be a finite rectangle with positive sides");
  return {window, n1, n2};
}

bool operator==(const Grid& a, const Grid& b) {
  return a.n1 == b.n1 && a.n2 == b.n2 && a.window.lo == b.window.lo && a.window.hi == b.window.hi;
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(const Point2&)>& fn) {
  GridFunction out(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) out(i, j) = fn(g.node(i, j));
  return out;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid)) throw InvalidParameter("grid functions live on different grids");
  GridFunction out = a;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += b.values[k];
  return out;
}

GridFunction operator*(double s, const GridFunction& a) {
  GridFunction out = a;
  for (auto& v : out.values) v *= s;
  return out;
}

void CoefficientField::validate() const {
  if (!(lambda > 0.0) || !(Lambda >= lambda)) throw InvalidParameter("ellipticity constants need 0 < lambda <= Lambda");
  if (a11.size() != grid.size() || a12.size() != grid.size() || a22.size() != grid.size())
    throw InvalidParameter("coefficient arrays do not match the grid");
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      if (!is_elliptic(at(i, j), lambda, Lambda)) {
        auto [lo, hi] = eigen_bounds(at(i, j));
        throw InvalidParameter("coefficients at node (" + std::to_string(i) + "," + std::to_string(j) +
                               ") have eigenvalues " + std::to_string(lo) + ", " + std::to_string(hi) +
                               " outside [lambda, Lambda]");
      }
    }
  }
}

CoefficientField CoefficientField::constant(const Grid& g, const Coeffs& a) {
  auto [lo, hi] = eigen_bounds(a);
  if (!(lo > 0.0)) throw InvalidParameter("constant coefficients are not elliptic");
  return from_function(g, [&](const Point2&) { return a; }, lo, hi);
}

CoefficientField CoefficientField::from_function(const Grid& g, const std::function<Coeffs(const Point2&)>& fn,
                                                 double lambda, double Lambda) {
  CoefficientField c;
  c.grid = g;
  c.lambda = lambda;
  c.Lambda = Lambda;
  c.a11.resize(g.size());
  c.a12.resize(g.size());
  c.a22.resize(g.size());
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      Coeffs a = fn(g.node(i, j));
      auto k = g.index(i, j);
      c.a11[k] = a.a11;
      c.a12[k] = a.a12;
      c.a22[k] = a.a22;
    }
  }
  return c;
}

CoefficientField CoefficientField::random_patches(const Grid& g, std::uint64_t seed, int patches) {
  if (patches < 1) throw InvalidParameter("need at least one coefficient patch");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> diag(1.0, 2.0);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  std::vector<Coeffs> cells(static_cast<std::size_t>(patches) * patches);
  for (auto& a : cells) {
    a.a11 = diag(rng);
    a.a22 = diag(rng);
    a.a12 = 0.4 * off(rng) * std::sqrt(a.a11 * a.a22);
  }
  const grushin::Rect w = g.window;
  auto patch = [&](double t) { return std::clamp(static_cast<int>(std::floor(t * patches + 1e-9)), 0, patches - 1); };
  return from_function(
      g,
      [&](const Point2& p) {
        int pi = patch((p.x1 - w.lo.x1) / w.width());
        int pj = patch((p.x2 - w.lo.x2) / w.height());
        return cells[static_cast<std::size_t>(pj) * patches + pi];
      },
      0.5, 3.0);
}

namespace {

void check_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw InvalidParameter(std::string(what) + " is not on the coefficient grid");
}

}  // namespace

GridFunction apply_operator(const GridFunction& u, const CoefficientField& a) {
  check_same_grid(u.grid, a.grid, "grid function");
  const Grid& g = u.grid;
  const double h1 = g.h1();
  const double h2 = g.h2();
  GridFunction out(g);
  for (int j = 1; j < g.n2 - 1; ++j) {
    for (int i = 1; i < g.n1 - 1; ++i) {
      const double x1 = g.node(i, j).x1;
      const Coeffs c = a.at(i, j);
      const double d11 = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) / (h1 * h1);
      const double d22 = (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) / (h2 * h2);
      const double d12 = (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) / (4.0 * h1 * h2);
      out(i, j) = c.a11 * d11 + c.a22 * x1 * x1 * d22 + 2.0 * c.a12 * x1 * d12;
    }
  }
  return out;
}

Solution solve_dirichlet(const CoefficientField& a, const GridFunction& f, const GridFunction& boundary,
                         double tolerance) {
  check_same_grid(f.grid, a.grid, "right-hand side");
  check_same_grid(boundary.grid, a.grid, "boundary data");
  a.validate();
  for (double v : f.values)
    if (!std::isfinite(v)) throw InvalidParameter("right-hand side is not finite");
  const Grid& g = a.grid;
  const double h1 = g.h1();
  const double h2 = g.h2();
  const auto n = static_cast<Eigen::Index>(g.size());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.size() * 9);
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const auto row = static_cast<Eigen::Index>(g.index(i, j));
      if (g.is_boundary(i, j)) {
        trips.emplace_back(row, row, 1.0);
        rhs[row] = boundary(i, j);
        continue;
      }
      const double x1 = g.node(i, j).x1;
      const Coeffs c = a.at(i, j);
      const double w1 = c.a11 / (h1 * h1);
      const double w2 = c.a22 * x1 * x1 / (h2 * h2);
      const double w12 = 2.0 * c.a12 * x1 / (4.0 * h1 * h2);
      auto put = [&](int di, int dj, double w) {
        if (w != 0.0) trips.emplace_back(row, static_cast<Eigen::Index>(g.index(i + di, j + dj)), w);
      };
      put(0, 0, -2.0 * w1 - 2.0 * w2);
      put(1, 0, w1);
      put(-1, 0, w1);
      put(0, 1, w2);
      put(0, -1, w2);
      put(1, 1, w12);
      put(-1, -1, w12);
      put(1, -1, -w12);
      put(-1, 1, -w12);
      rhs[row] = x1 * x1 * f(i, j);
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage());
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");

  const double bnorm = rhs.norm();
  auto residual = [&](const Eigen::VectorXd& v) {
    double r = (A * v - rhs).norm();
    return bnorm > 0.0 ? r / bnorm : r;
  };
  double res = residual(x);
  for (int it = 0; it < 3 && !(res <= tolerance); ++it) {
    x += lu.solve(rhs - A * x);
    res = residual(x);
  }
  if (!(res <= tolerance)) {
    throw SolverError("relative residual " + std::to_string(res) + " above tolerance after refinement (log|det| = " +
                      std::to_string(lu.logAbsDeterminant()) + ")");
  }
  Solution s;
  s.u = GridFunction(g);
  for (std::size_t k = 0; k < g.size(); ++k) s.u.values[k] = x[static_cast<Eigen::Index>(k)];
  s.residual_norm = res;
  return s;
}

ManufacturedCase manufactured_case(const std::string& id) {
  if (id == "const") return {id, [](const Point2&) { return 1.0; }, [](const Point2&, const Coeffs&) { return 0.0; }};
  if (id == "x2") return {id, [](const Point2& p) { return p.x2; }, [](const Point2&, const Coeffs&) { return 0.0; }};
  if (id == "x2sq")
    return {id, [](const Point2& p) { return p.x2 * p.x2; }, [](const Point2&, const Coeffs& a) { return 2.0 * a.a22; }};
  if (id == "x1quartic")
    return {id, [](const Point2& p) { return std::pow(p.x1, 4) / 12.0; },
            [](const Point2&, const Coeffs& a) { return a.a11; }};
  if (id == "mixed")
    return {id, [](const Point2& p) { return std::pow(p.x1, 4) / 12.0 + p.x2 * p.x2; },
            [](const Point2&, const Coeffs& a) { return a.a11 + 2.0 * a.a22; }};
  throw InvalidParameter("unknown manufactured case '" + id + "'");
}

std::vector<std::string> manufactured_ids() { return {"const", "x2", "x2sq", "x1quartic", "mixed"}; }

ManufacturedResult solve_manufactured(const ManufacturedCase& mc, const CoefficientField& a) {
  const Grid& g = a.grid;
  GridFunction exact = GridFunction::sample(g, mc.u);
  GridFunction f(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) f(i, j) = mc.f(g.node(i, j), a.at(i, j));
  ManufacturedResult r{solve_dirichlet(a, f, exact), 0.0};
  for (std::size_t k = 0; k < g.size(); ++k)
    r.max_error = std::max(r.max_error, std::abs(r.solution.u.values[k] - exact.values[k]));
  return r;
}

ConvergenceReport convergence_study(const ManufacturedCase& mc, const grushin::Rect& window, int n_coarse, int n_fine,
                                    const std::function<CoefficientField(const Grid&)>& make_field) {
  ConvergenceReport rep;
  rep.case_id = mc.id;
  rep.n_coarse = n_coarse;
  rep.n_fine = n_fine;
  rep.error_coarse = solve_manufactured(mc, make_field(Grid::make(window, n_coarse, n_coarse))).max_error;
  rep.error_fine = solve_manufactured(mc, make_field(Grid::make(window, n_fine, n_fine))).max_error;
  rep.ratio = rep.error_fine > 0.0 ? rep.error_coarse / rep.error_fine : grushin::kInf;
  return rep;
}

AbpReport check_abp(const GridFunction& u, const GridFunction& f, double C) {
  return check_abp(u, f, u.grid.window, C);
}

AbpReport check_abp(const GridFunction& u, const GridFunction& f, const grushin::Rect& region, double C) {
  if (!(u.grid == f.grid)) throw InvalidParameter("u and f live on different grids");
  const Grid& g = u.grid;
  const double tol = 1e-12 * (g.window.width() + g.window.height());
  if (region.lo.x1 < g.window.lo.x1 - tol || region.lo.x2 < g.window.lo.x2 - tol ||
      region.hi.x1 > g.window.hi.x1 + tol || region.hi.x2 > g.window.hi.x2 + tol || !(region.width() > 0.0) ||
      !(region.height() > 0.0))
    throw InvalidParameter("ABP region is not inside the grid window");
  const double h1 = g.h1();
  const double h2 = g.h2();
  AbpReport rep;
  rep.C = C;
  rep.diameter = std::hypot(region.width(), region.height());
  double integral = 0.0;
  bool any = false;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      Point2 p = g.node(i, j);
      if (p.x1 < region.lo.x1 - tol || p.x1 > region.hi.x1 + tol || p.x2 < region.lo.x2 - tol ||
          p.x2 > region.hi.x2 + tol)
        continue;
      any = true;
      rep.sup_negative = std::max(rep.sup_negative, -u(i, j));
      double w = h1 * h2;
      if (std::abs(p.x1 - region.lo.x1) <= tol || std::abs(p.x1 - region.hi.x1) <= tol) w *= 0.5;
      if (std::abs(p.x2 - region.lo.x2) <= tol || std::abs(p.x2 - region.hi.x2) <= tol) w *= 0.5;
      double v = p.x1 * std::max(f(i, j), 0.0);
      integral += w * v * v;
    }
  }
  if (!any) throw DegenerateInput("ABP region contains no grid nodes");
  rep.weighted_norm = std::sqrt(integral);
  rep.margin = C * rep.diameter * rep.weighted_norm - rep.sup_negative;
  return rep;
}

void write_grid_csv(std::ostream& out, const GridFunction& u) {
  out << "i,j,x1,x2,value\n";
  out.precision(17);
  for (int j = 0; j < u.grid.n2; ++j) {
    for (int i = 0; i < u.grid.n1; ++i) {
      Point2 p = u.grid.node(i, j);
      out << i << ',' << j << ',' << p.x1 << ',' << p.x2 << ',' << u(i, j) << '\n';
    }
  }
}

SolverConfig SolverConfig::from(const config::KeyValues& kv) {
  SolverConfig c;
  grushin::Rect window = c.grid.window;
  int n1 = c.grid.n1;
  int n2 = c.grid.n2;
  if (kv.has("window")) window = config::parse_window(kv.get_string("window", ""));
  if (kv.has("grid")) std::tie(n1, n2) = config::parse_grid(kv.get_string("grid", ""));
  n1 = static_cast<int>(kv.get_int("n1", n1));
  n2 = static_cast<int>(kv.get_int("n2", n2));
  try {
    c.grid = Grid::make(window, n1, n2);
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  c.case_id = kv.get_string("case", c.case_id);
  c.coefficients = kv.get_string("coefficients", c.coefficients);
  c.seed = kv.get_u64("seed", c.seed);
  c.patches = static_cast<int>(kv.get_int("patches", c.patches));
  if (c.coefficients != "identity" && c.coefficients != "random")
    throw ConfigError("coefficients must be 'identity' or 'random', got '" + c.coefficients + "'");
  return c;
}

CoefficientField SolverConfig::field() const {
  if (coefficients == "random") return CoefficientField::random_patches(grid, seed, patches);
  return CoefficientField::constant(grid, Coeffs{});
}

}  // namespace hlab::pde
