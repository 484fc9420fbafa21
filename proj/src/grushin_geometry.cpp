#include "harnacklab/grushin_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace hlab::grushin {

namespace {

double rho4(const Point2& x, const Point2& y) {
  double a = x.x1 * x.x1 - y.x1 * y.x1;
  double b = x.x2 - y.x2;
  return a * a + 4.0 * b * b;
}

double sigma4(const Point2& x, const Point2& y) {
  double a = x.x1 * x.x1 - y.x1 * y.x1;
  double c = x.x1 - y.x1;
  double b = x.x2 - y.x2;
  return a * a + 2.0 * y.x1 * y.x1 * c * c + 4.0 * b * b;
}

void require_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParameter("radius must be a finite positive number");
}

}  // namespace

double dtilde(const Point2& x, const Point2& y) {
  double a = x.x1 * x.x1 + y.x1 * y.x1;
  double v = 4.0 * std::abs(x.x2 - y.x2);
  // sqrt(a + v) - sqrt(a), written without cancellation.
  double tail = v == 0.0 ? 0.0 : v / (std::sqrt(a + v) + std::sqrt(a));
  return std::abs(x.x1 - y.x1) + tail;
}

double rho(const Point2& x, const Point2& y) { return std::sqrt(std::sqrt(rho4(x, y))); }

double sigma(const Point2& x, const Point2& y) { return std::sqrt(std::sqrt(sigma4(x, y))); }

double level_g(double r, const Point2& x, const Point2& y) {
  require_radius(r);
  double ay = std::abs(y.x1);
  if (ay < r) return rho(x, y);
  if (x.x1 * y.x1 >= 0.0) return std::sqrt(rho4(x, y)) / ay;
  return kInf;
}

double level_h(double r, const Point2& x, const Point2& y) {
  require_radius(r);
  double ay = std::abs(y.x1);
  if (ay < r) return sigma(x, y);
  return std::sqrt(sigma4(x, y)) / ay;
}

Point2 dilate(double t, const Point2& p) {
  if (!(t > 0.0)) throw InvalidParameter("dilation factor must be > 0");
  return {t * p.x1, t * t * p.x2};
}

Point2 box_half_widths(const Point2& c, double r) { return {r, r * (r + std::abs(c.x1))}; }

double box_area(const Point2& c, double r) { return 4.0 * r * r * (r + std::abs(c.x1)); }

double box_gauge(const Point2& c, double r, const Point2& p) {
  double g1 = std::abs(p.x1 - c.x1) / r;
  double d2 = std::abs(p.x2 - c.x2);
  double a = std::abs(c.x1);
  // C r solves s^2 + a s - d2 = 0.
  double s = d2 == 0.0 ? 0.0 : 2.0 * d2 / (a + std::sqrt(a * a + 4.0 * d2));
  return std::max(g1, s / r);
}

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Box: return "Box";
    case RegionKind::BTilde: return "BTilde";
    case RegionKind::G: return "G";
    case RegionKind::H: return "H";
    case RegionKind::RingH: return "RingH";
  }
  return "?";
}

RegionKind region_kind_from_string(std::string_view name) {
  if (name == "Box" || name == "box") return RegionKind::Box;
  if (name == "BTilde" || name == "btilde" || name == "B" || name == "ball") return RegionKind::BTilde;
  if (name == "G" || name == "g") return RegionKind::G;
  if (name == "H" || name == "h") return RegionKind::H;
  if (name == "RingH" || name == "ring") return RegionKind::RingH;
  throw InvalidParameter("unknown region kind '" + std::string(name) + "'");
}

RegionDescriptor RegionDescriptor::box(Point2 c, double r) { return {RegionKind::Box, c, r, 0.0}; }
RegionDescriptor RegionDescriptor::btilde(Point2 c, double r) { return {RegionKind::BTilde, c, r, 0.0}; }
RegionDescriptor RegionDescriptor::g(Point2 c, double r) { return {RegionKind::G, c, r, 0.0}; }
RegionDescriptor RegionDescriptor::h(Point2 c, double r) { return {RegionKind::H, c, r, 0.0}; }
RegionDescriptor RegionDescriptor::ring_h(Point2 c, double inner, double outer) {
  return {RegionKind::RingH, c, inner, outer};
}

void RegionDescriptor::validate() const {
  if (!is_finite(center)) throw InvalidParameter("region center must be finite");
  require_radius(radius);
  if (kind == RegionKind::RingH && !(outer_radius > radius))
    throw InvalidParameter("ring outer radius must exceed the inner radius");
}

bool contains(const RegionDescriptor& region, const Point2& p) {
  const Point2& c = region.center;
  const double r = region.radius;
  switch (region.kind) {
    case RegionKind::Box: {
      Point2 hw = box_half_widths(c, r);
      return std::abs(p.x1 - c.x1) < hw.x1 && std::abs(p.x2 - c.x2) < hw.x2;
    }
    case RegionKind::BTilde: return dtilde(c, p) < r;
    case RegionKind::G: return level_g(r, p, c) < r;
    case RegionKind::H: return level_h(r, p, c) < r;
    case RegionKind::RingH:
      return level_h(region.outer_radius, p, c) < region.outer_radius && level_h(r, p, c) > r;
  }
  return false;
}

namespace {

// Bisection on [t_in, t_out] of a ray where t_in is inside and t_out outside.
double bisect_exit(const RegionDescriptor& region, const Point2& c, const Point2& v, double t_in, double t_out) {
  for (int it = 0; it < 64 && t_out - t_in > 1e-15 * t_out; ++it) {
    double tm = 0.5 * (t_in + t_out);
    if (contains(region, {c.x1 + tm * v.x1, c.x2 + tm * v.x2}))
      t_in = tm;
    else
      t_out = tm;
  }
  return 0.5 * (t_in + t_out);
}

}  // namespace

BoundaryTrace trace_boundary(const RegionDescriptor& region, std::size_t n_rays, double gauge_cap) {
  region.validate();
  if (region.kind == RegionKind::RingH) throw InvalidParameter("trace_boundary needs a ball-like region, not a ring");
  if (n_rays == 0) throw InvalidParameter("need at least one ray");
  const Point2 c = region.center;
  const double r = region.radius;
  const Point2 hw = box_half_widths(c, r);
  constexpr double dt = 1.0 / 64.0;

  BoundaryTrace out;
  out.first_exit.reserve(n_rays);
  out.last_exit.reserve(n_rays);
  for (std::size_t k = 0; k < n_rays; ++k) {
    double th = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n_rays);
    Point2 v{hw.x1 * std::cos(th), hw.x2 * std::sin(th)};
    auto at = [&](double t) { return Point2{c.x1 + t * v.x1, c.x2 + t * v.x2}; };

    double first_out = -1.0;
    double last_in = 0.0;
    double last_out_after = -1.0;
    double t = dt;
    // Fine march until well past the last inside point.
    while (true) {
      Point2 p = at(t);
      bool in = contains(region, p);
      if (in) {
        last_in = t;
        last_out_after = -1.0;
      } else {
        if (first_out < 0.0) first_out = t;
        if (last_out_after < 0.0) last_out_after = t;
      }
      if (!in && t > 2.0 * last_in + 2.0) {
        // Coarse geometric probe of far points along the ray.
        double tf = t;
        bool found = false;
        while (box_gauge(c, r, at(tf)) < gauge_cap) {
          tf *= 1.25;
          if (contains(region, at(tf))) {
            found = true;
            break;
          }
        }
        if (!found) break;
        t = tf;
        continue;
      }
      if (box_gauge(c, r, p) >= gauge_cap) {
        if (in) throw StructureViolation("region extends beyond box gauge cap along a traced ray");
        break;
      }
      t += dt;
    }
    if (first_out < 0.0) throw StructureViolation("ray never left the region");
    double t_first = bisect_exit(region, c, v, first_out - dt, first_out);
    double t_last = bisect_exit(region, c, v, last_in, last_out_after > 0.0 ? last_out_after : last_in + dt);
    Point2 pf = at(t_first);
    Point2 pl = at(t_last);
    out.first_exit.push_back(pf);
    out.last_exit.push_back(pl);
    if (std::abs(t_last - t_first) > 2.0 * dt) out.star_shaped = false;
    out.max_gauge = std::max(out.max_gauge, box_gauge(c, r, pl));
  }
  return out;
}

Rect bounding_rect(const RegionDescriptor& region) {
  region.validate();
  if (region.kind == RegionKind::Box) {
    Point2 hw = box_half_widths(region.center, region.radius);
    return {{region.center.x1 - hw.x1, region.center.x2 - hw.x2}, {region.center.x1 + hw.x1, region.center.x2 + hw.x2}};
  }
  RegionDescriptor outer = region;
  if (region.kind == RegionKind::RingH) {
    outer.kind = RegionKind::H;
    outer.radius = region.outer_radius;
    outer.outer_radius = 0.0;
  }
  BoundaryTrace tr = trace_boundary(outer, 256);
  Rect box{tr.last_exit.front(), tr.last_exit.front()};
  for (const auto& p : tr.last_exit) {
    box.lo.x1 = std::min(box.lo.x1, p.x1);
    box.lo.x2 = std::min(box.lo.x2, p.x2);
    box.hi.x1 = std::max(box.hi.x1, p.x1);
    box.hi.x2 = std::max(box.hi.x2, p.x2);
  }
  // Pad by 5% of the extent in each direction to cover the parts of the
  // boundary that fall between rays.
  double p1 = 0.05 * box.width() + 1e-12;
  double p2 = 0.05 * box.height() + 1e-12;
  box.lo.x1 -= p1;
  box.hi.x1 += p1;
  box.lo.x2 -= p2;
  box.hi.x2 += p2;
  return box;
}

MeasureResult region_measure(const RegionDescriptor& region, int resolution) {
  region.validate();
  if (resolution < 64) throw InvalidParameter("quadrature resolution must be >= 64 cells per radius");
  const double r = region.radius;
  Point2 hw = box_half_widths(region.center, r);
  const double h1 = hw.x1 / resolution;
  const double h2 = hw.x2 / resolution;
  Rect rect = bounding_rect(region);
  const auto n1 = static_cast<long>(std::ceil(rect.width() / h1 - 1e-9));
  const auto n2 = static_cast<long>(std::ceil(rect.height() / h2 - 1e-9));
  // Center the grid on the rectangle so that boxes are tiled exactly.
  const double x0 = 0.5 * (rect.lo.x1 + rect.hi.x1) - 0.5 * n1 * h1;
  const double y0 = 0.5 * (rect.lo.x2 + rect.hi.x2) - 0.5 * n2 * h2;

  std::vector<char> corner(static_cast<std::size_t>((n1 + 1) * (n2 + 1)));
  for (long j = 0; j <= n2; ++j)
    for (long i = 0; i <= n1; ++i)
      corner[static_cast<std::size_t>(j * (n1 + 1) + i)] = contains(region, {x0 + i * h1, y0 + j * h2});

  MeasureResult out;
  long inside = 0;
  long cut = 0;
  for (long j = 0; j < n2; ++j) {
    for (long i = 0; i < n1; ++i) {
      if (contains(region, {x0 + (i + 0.5) * h1, y0 + (j + 0.5) * h2})) ++inside;
      auto at = [&](long a, long b) { return corner[static_cast<std::size_t>(b * (n1 + 1) + a)]; };
      char c00 = at(i, j);
      if (at(i + 1, j) != c00 || at(i, j + 1) != c00 || at(i + 1, j + 1) != c00) ++cut;
    }
  }
  out.cells = static_cast<std::size_t>(n1 * n2);
  out.area = static_cast<double>(inside) * h1 * h2;
  out.error_bound = static_cast<double>(cut) * h1 * h2;
  return out;
}

DiameterResult diameter_of(std::span<const Point2> samples) {
  DiameterResult out;
  out.samples = samples.size();
  if (samples.size() < 2) {
    out.degenerate = true;
    return out;
  }
  double best = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      double d1 = samples[i].x1 - samples[j].x1;
      double d2 = samples[i].x2 - samples[j].x2;
      best = std::max(best, d1 * d1 + d2 * d2);
    }
  out.diameter = std::sqrt(best);
  return out;
}

std::vector<Point2> boundary_samples(const RegionDescriptor& region, std::size_t n_samples) {
  region.validate();
  if (n_samples == 0) return {};
  std::vector<Point2> pts;
  if (region.kind == RegionKind::Box) {
    if (n_samples < 4) {
      pts.push_back(region.center);
      return pts;
    }
    Point2 hw = box_half_widths(region.center, region.radius);
    const Point2 c = region.center;
    std::size_t per_side = n_samples / 4;
    for (std::size_t k = 0; k < per_side; ++k) {
      double s = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(per_side);
      pts.push_back({c.x1 + s * hw.x1, c.x2 - hw.x2});
      pts.push_back({c.x1 + hw.x1, c.x2 + s * hw.x2});
      pts.push_back({c.x1 - s * hw.x1, c.x2 + hw.x2});
      pts.push_back({c.x1 - hw.x1, c.x2 - s * hw.x2});
    }
    return pts;
  }
  if (n_samples == 1) {
    pts.push_back(region.center);
    return pts;
  }
  RegionDescriptor outer = region;
  if (region.kind == RegionKind::RingH) {
    outer.kind = RegionKind::H;
    outer.radius = region.outer_radius;
    outer.outer_radius = 0.0;
  }
  return trace_boundary(outer, n_samples).last_exit;
}

DiameterResult region_diameter(const RegionDescriptor& region, std::size_t n_samples) {
  auto pts = boundary_samples(region, n_samples);
  return diameter_of(pts);
}

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::BTildeVsBox: return "BTilde_vs_Box";
    case StructureKind::GVsBox: return "G_vs_Box";
    case StructureKind::HVsBox: return "H_vs_Box";
    case StructureKind::CCViaDtilde: return "CC_via_dtilde";
  }
  return "?";
}

namespace {

RegionKind region_for(StructureKind kind) {
  switch (kind) {
    case StructureKind::BTildeVsBox:
    case StructureKind::CCViaDtilde: return RegionKind::BTilde;
    case StructureKind::GVsBox: return RegionKind::G;
    case StructureKind::HVsBox: return RegionKind::H;
  }
  return RegionKind::BTilde;
}

}  // namespace

StructureConstantReport structure_constant(StructureKind kind, std::span<const CenterRadius> regions,
                                           std::size_t n_rays, double c_max) {
  if (regions.empty()) throw InvalidParameter("structure_constant needs at least one (center, radius)");
  StructureConstantReport rep;
  rep.kind = kind;
  rep.inner_kind = RegionKind::Box;
  rep.outer_kind = region_for(kind);
  rep.proxy = kind == StructureKind::CCViaDtilde;
  double sup_outer = 0.0;
  double inf_inner = kInf;
  for (const auto& cr : regions) {
    RegionDescriptor reg{region_for(kind), cr.center, cr.radius, 0.0};
    BoundaryTrace tr = trace_boundary(reg, n_rays, c_max);
    rep.star_shaped = rep.star_shaped && tr.star_shaped;
    for (const auto& p : tr.last_exit) {
      double g = box_gauge(cr.center, cr.radius, p);
      if (g > sup_outer) {
        sup_outer = g;
        rep.outer_witness = p;
        rep.outer_witness_center = cr.center;
        rep.outer_witness_radius = cr.radius;
      }
    }
    for (const auto& p : tr.first_exit) {
      double g = box_gauge(cr.center, cr.radius, p);
      if (g < inf_inner) {
        inf_inner = g;
        rep.inner_witness = p;
        rep.inner_witness_center = cr.center;
        rep.inner_witness_radius = cr.radius;
      }
    }
    ++rep.regions;
  }
  rep.outer_constant = std::max(1.0, sup_outer);
  rep.inner_constant = inf_inner > 0.0 ? std::max(1.0, 1.0 / inf_inner) : kInf;
  rep.constant = std::max(rep.outer_constant, rep.inner_constant);
  if (!(rep.constant <= c_max))
    throw StructureViolation("no structure constant C <= " + std::to_string(c_max) + " satisfies the inclusions");
  return rep;
}

bool inclusions_hold(StructureKind kind, std::span<const CenterRadius> regions, double C, std::size_t n_rays) {
  for (const auto& cr : regions) {
    RegionDescriptor reg{region_for(kind), cr.center, cr.radius, 0.0};
    BoundaryTrace tr = trace_boundary(reg, n_rays);
    for (const auto& p : tr.last_exit)
      if (box_gauge(cr.center, cr.radius, p) > C) return false;
    for (const auto& p : tr.first_exit)
      if (box_gauge(cr.center, cr.radius, p) < 1.0 / C) return false;
  }
  return true;
}

std::vector<CenterRadius> sample_regions(std::uint64_t seed, std::size_t count, double window_lo, double window_hi,
                                         double r_min, double r_max, double margin) {
  if (!(window_hi > window_lo)) throw InvalidParameter("empty window");
  if (!(r_max >= r_min && r_min > 0.0)) throw InvalidParameter("invalid radius range");
  Halton2 centers(seed);
  std::uint64_t radius_index = seed * 7919u + 1u;
  std::vector<CenterRadius> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw InvalidParameter("window too small for the requested radii");
    Point2 c = centers.next_in({window_lo, window_lo}, {window_hi, window_hi});
    double r = r_min + radical_inverse(radius_index++, 5) * (r_max - r_min);
    Point2 hw = box_half_widths(c, margin * r);
    if (c.x1 - hw.x1 < window_lo || c.x1 + hw.x1 > window_hi || c.x2 - hw.x2 < window_lo || c.x2 + hw.x2 > window_hi)
      continue;
    out.push_back({c, r});
  }
  return out;
}

void write_region_csv(std::ostream& out, const RegionDescriptor& region, int n) {
  if (n < 2) throw InvalidParameter("CSV grid needs at least 2 points per side");
  Rect rect = bounding_rect(region);
  out << "x1,x2,inside\n";
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Point2 p{rect.lo.x1 + rect.width() * i / (n - 1), rect.lo.x2 + rect.height() * j / (n - 1)};
      out << p.x1 << ',' << p.x2 << ',' << (contains(region, p) ? 1 : 0) << '\n';
    }
}

}  // namespace hlab::grushin
