#pragma once

// Finite differences for L u = a11 u_x1x1 + a22 x1^2 u_x2x2 + 2 a12 x1 u_x1x2 = x1^2 f
// on rectangles with Dirichlet data.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "harnacklab/config.hpp"
#include "harnacklab/core.hpp"
#include "harnacklab/grushin_geometry.hpp"

namespace hlab::pde {

/// Uniform node grid on a closed rectangle. Node (i, j) sits at
/// (x1_min + i h1, x2_min + j h2); boundary nodes have i or j at an end.
struct Grid {
  grushin::Rect window{{-1.0, -1.0}, {1.0, 1.0}};
  int n1 = 65;
  int n2 = 65;

  static Grid make(const grushin::Rect& window, int n1, int n2);

  double h1() const { return window.width() / (n1 - 1); }
  double h2() const { return window.height() / (n2 - 1); }
  std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n1 + i; }
  Point2 node(int i, int j) const { return {window.lo.x1 + i * h1(), window.lo.x2 + j * h2()}; }
  bool is_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1; }
};

bool operator==(const Grid& a, const Grid& b);

struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator()(int i, int j) { return values[grid.index(i, j)]; }
  double operator()(int i, int j) const { return values[grid.index(i, j)]; }

  static GridFunction sample(const Grid& g, const std::function<double(const Point2&)>& fn);
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);

/// Node-sampled coefficients with the ellipticity bounds they were drawn for.
struct CoefficientField {
  Grid grid;
  std::vector<double> a11;
  std::vector<double> a12;
  std::vector<double> a22;
  double lambda = 1.0;
  double Lambda = 1.0;

  Coeffs at(int i, int j) const {
    auto k = grid.index(i, j);
    return {a11[k], a12[k], a22[k]};
  }

  /// Throws InvalidParameter at the first node whose matrix has eigenvalues
  /// outside [lambda, Lambda].
  void validate() const;

  static CoefficientField constant(const Grid& g, const Coeffs& a);
  static CoefficientField from_function(const Grid& g, const std::function<Coeffs(const Point2&)>& fn, double lambda,
                                        double Lambda);

  /// Piecewise constant on a patches x patches partition of the window, so
  /// the field is the same function of position on every grid. Per patch
  /// a11, a22 in [1, 2] and |a12| <= 0.4 sqrt(a11 a22); eigenvalues then lie
  /// in [0.6, 2.8] and the declared bounds are (0.5, 3).
  static CoefficientField random_patches(const Grid& g, std::uint64_t seed, int patches = 8);
};

/// L u at interior nodes (centered second differences, 4-point cross stencil);
/// zero at boundary nodes.
GridFunction apply_operator(const GridFunction& u, const CoefficientField& a);

struct Solution {
  GridFunction u;
  double residual_norm = 0.0;  // ||A u - b|| / ||b|| (absolute when b = 0)
};

/// Solves L u = x1^2 f at interior nodes, u = boundary at boundary nodes.
/// Throws SolverError when the factorization fails or the residual stays
/// above `tolerance`.
Solution solve_dirichlet(const CoefficientField& a, const GridFunction& f, const GridFunction& boundary,
                         double tolerance = 1e-10);

/// Closed-form pair with L u* = x1^2 f pointwise, for any coefficients.
struct ManufacturedCase {
  std::string id;
  std::function<double(const Point2&)> u;
  std::function<double(const Point2&, const Coeffs&)> f;
};

/// id in {const, x2, x2sq, x1quartic, mixed}; throws InvalidParameter otherwise.
ManufacturedCase manufactured_case(const std::string& id);
std::vector<std::string> manufactured_ids();

struct ManufacturedResult {
  Solution solution;
  double max_error = 0.0;
};

ManufacturedResult solve_manufactured(const ManufacturedCase& mc, const CoefficientField& a);

struct ConvergenceReport {
  std::string case_id;
  int n_coarse = 0;
  int n_fine = 0;
  double error_coarse = 0.0;
  double error_fine = 0.0;
  double ratio = 0.0;
};

/// Max-node errors on n_coarse^2 and n_fine^2 grids over `window`; the
/// coefficient field is built per grid by `make_field`.
ConvergenceReport convergence_study(const ManufacturedCase& mc, const grushin::Rect& window, int n_coarse, int n_fine,
                                    const std::function<CoefficientField(const Grid&)>& make_field);

struct AbpReport {
  double sup_negative = 0.0;    // sup of u^- over the region's nodes
  double weighted_norm = 0.0;   // (int (x1 f^+)^2)^(1/2), trapezoid rule
  double diameter = 0.0;
  double C = 0.0;
  double margin = 0.0;          // C diam norm - sup u^-
};

/// Relaxed ABP bound on a sub-rectangle of the grid (the full window by
/// default), integrating over the whole region instead of the contact set.
AbpReport check_abp(const GridFunction& u, const GridFunction& f, double C);
AbpReport check_abp(const GridFunction& u, const GridFunction& f, const grushin::Rect& region, double C);

/// CSV with header i,j,x1,x2,value.
void write_grid_csv(std::ostream& out, const GridFunction& u);

struct SolverConfig {
  Grid grid = Grid::make({{-1.0, -1.0}, {1.0, 1.0}}, 65, 65);
  std::string case_id = "mixed";
  std::string coefficients = "identity";  // identity | random
  std::uint64_t seed = 0;
  int patches = 8;

  static SolverConfig from(const config::KeyValues& kv);
  CoefficientField field() const;
};

}  // namespace hlab::pde
