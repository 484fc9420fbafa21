#pragma once

// Closed-form geometry of the Grushin plane generated by X = d/dx1 and
// Y = x1 d/dx2: the Hoelder quasi distance d~, the boxes, the kernels rho and
// sigma with their level functions g_r and h_r, the anisotropic dilations and
// the regions built from them.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "harnacklab/core.hpp"

namespace hlab::grushin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// d~(x,y) = |x1-y1| + sqrt(x1^2 + y1^2 + 4|x2-y2|) - sqrt(x1^2 + y1^2).
double dtilde(const Point2& x, const Point2& y);

/// rho(x,y) = ((x1^2 - y1^2)^2 + 4(x2-y2)^2)^(1/4).
double rho(const Point2& x, const Point2& y);

/// sigma(x,y) = ((x1^2 - y1^2)^2 + 2 y1^2 (x1-y1)^2 + 4(x2-y2)^2)^(1/4).
/// Not symmetric: y is the pole.
double sigma(const Point2& x, const Point2& y);

/// g_r(x,y). On the overlap x1*y1 = 0 with |y1| >= r the finite branch is used.
double level_g(double r, const Point2& x, const Point2& y);

/// h_r(x,y): sigma if |y1| < r, sigma^2/|y1| otherwise.
double level_h(double r, const Point2& x, const Point2& y);

/// delta_t(p) = (t p1, t^2 p2).
Point2 dilate(double t, const Point2& p);

/// Half-widths (r, r(r+|c1|)) of Box(c, r).
Point2 box_half_widths(const Point2& c, double r);

/// |Box(c, r)| = 4 r^2 (r + |c1|).
double box_area(const Point2& c, double r);

/// Least C >= 0 with p in the closure of Box(c, C r).
double box_gauge(const Point2& c, double r, const Point2& p);

enum class RegionKind { Box, BTilde, G, H, RingH };

std::string_view to_string(RegionKind kind);
RegionKind region_kind_from_string(std::string_view name);

/// Tagged region of the plane. For RingH the region is H(c, outer) minus the
/// closure of H(c, radius).
struct RegionDescriptor {
  RegionKind kind = RegionKind::Box;
  Point2 center;
  double radius = 1.0;
  double outer_radius = 0.0;

  static RegionDescriptor box(Point2 c, double r);
  static RegionDescriptor btilde(Point2 c, double r);
  static RegionDescriptor g(Point2 c, double r);
  static RegionDescriptor h(Point2 c, double r);
  static RegionDescriptor ring_h(Point2 c, double inner, double outer);

  void validate() const;
};

/// Exact closed-form membership.
bool contains(const RegionDescriptor& region, const Point2& p);

/// Rays traced from the region center. `first_exit[k]` is where ray k first
/// leaves the region and `last_exit[k]` where it leaves for the last time;
/// they coincide on every ray exactly when the region is star-shaped about
/// its center (up to the marching resolution).
struct BoundaryTrace {
  std::vector<Point2> first_exit;
  std::vector<Point2> last_exit;
  bool star_shaped = true;
  double max_gauge = 0.0;  // largest box gauge reached by a last exit
};

/// Traces `n_rays` rays from the center of a Box, BTilde, G or H region.
/// Directions are uniform in box-normalized coordinates. Throws
/// StructureViolation when a point with box gauge >= `gauge_cap` is still
/// inside the region.
BoundaryTrace trace_boundary(const RegionDescriptor& region, std::size_t n_rays = 512, double gauge_cap = 64.0);

/// Axis-aligned rectangle containing the region.
struct Rect {
  Point2 lo;
  Point2 hi;
  double width() const { return hi.x1 - lo.x1; }
  double height() const { return hi.x2 - lo.x2; }
};

Rect bounding_rect(const RegionDescriptor& region);

struct MeasureResult {
  double area = 0.0;
  double error_bound = 0.0;  // area of cells cut by the boundary
  std::size_t cells = 0;
};

/// Midpoint-rule Lebesgue measure on a uniform grid with `resolution` cells
/// per box-normalized radius in each direction (>= 64).
MeasureResult region_measure(const RegionDescriptor& region, int resolution = 64);

struct DiameterResult {
  double diameter = 0.0;
  std::size_t samples = 0;
  bool degenerate = false;  // fewer than two samples
};

/// Max pairwise Euclidean distance over boundary samples; a lower bound of
/// the true diameter.
DiameterResult diameter_of(std::span<const Point2> samples);
DiameterResult region_diameter(const RegionDescriptor& region, std::size_t n_samples = 512);

/// Boundary samples used by region_diameter: perimeter points for boxes
/// (corners included), outermost ray exits otherwise.
std::vector<Point2> boundary_samples(const RegionDescriptor& region, std::size_t n_samples = 512);

enum class StructureKind { BTildeVsBox, GVsBox, HVsBox, CCViaDtilde };

std::string_view to_string(StructureKind kind);

struct StructureConstantReport {
  RegionKind inner_kind = RegionKind::Box;
  RegionKind outer_kind = RegionKind::Box;
  StructureKind kind = StructureKind::BTildeVsBox;
  double constant = 1.0;        // least C certifying both inclusions on the samples
  double outer_constant = 1.0;  // sup of box gauges of region points
  double inner_constant = 1.0;  // 1 / inf of box gauges of boundary points
  Point2 outer_witness;
  Point2 inner_witness;
  Point2 outer_witness_center;
  Point2 inner_witness_center;
  double outer_witness_radius = 0.0;
  double inner_witness_radius = 0.0;
  std::size_t regions = 0;
  bool star_shaped = true;
  bool proxy = false;  // CC balls are exercised through d~ balls
};

struct CenterRadius {
  Point2 center;
  double radius = 1.0;
};

/// Least C in [1, c_max] such that Box(c, r/C) is inside S(c, r) and S(c, r)
/// is inside Box(c, C r) at every traced boundary sample of every tested
/// region. Throws StructureViolation when no C <= c_max works.
StructureConstantReport structure_constant(StructureKind kind, std::span<const CenterRadius> regions,
                                           std::size_t n_rays = 512, double c_max = 64.0);

/// True when both inclusions hold with the given C at the traced samples.
bool inclusions_hold(StructureKind kind, std::span<const CenterRadius> regions, double C, std::size_t n_rays = 512);

/// Seeded (center, radius) pairs whose Box(center, margin * radius) lies in
/// the window [lo, hi]^2.
std::vector<CenterRadius> sample_regions(std::uint64_t seed, std::size_t count, double window_lo = -4.0,
                                         double window_hi = 4.0, double r_min = 0.05, double r_max = 1.0,
                                         double margin = 4.0);

/// CSV dump "x1,x2,inside" over an n x n grid of the region's bounding rectangle.
void write_region_csv(std::ostream& out, const RegionDescriptor& region, int n = 128);

}  // namespace hlab::grushin
