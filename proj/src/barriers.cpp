#include "harnacklab/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "harnacklab/grushin_geometry.hpp"

namespace hlab::barriers {

std::string_view to_string(BarrierCase c) {
  switch (c) {
    case BarrierCase::I: return "I";
    case BarrierCase::II: return "II";
    case BarrierCase::III: return "III";
    case BarrierCase::IV: return "IV";
  }
  return "?";
}

BarrierCase classify(const Point2& y, double r) {
  if (!(r > 0.0)) throw InvalidParameter("barrier radius must be > 0");
  double a = std::abs(y.x1);
  if (a < r) return BarrierCase::I;
  if (a >= 3.0 * r) return BarrierCase::II;
  if (a < 2.0 * r) return BarrierCase::III;
  return BarrierCase::IV;
}

double barrier_alpha(double lambda, double Lambda) {
  if (!(lambda > 0.0) || !(Lambda >= lambda)) throw InvalidParameter("ellipticity constants need 0 < lambda <= Lambda");
  return 4.0 - 10.0 * Lambda / lambda;
}

SigmaDerivatives sigma_derivatives(const Point2& x, const Point2& y) {
  SigmaDerivatives d;
  d.sigma = grushin::sigma(x, y);
  if (!(d.sigma > 0.0)) throw SingularityError("sigma vanishes; derivatives undefined");
  const double s = d.sigma;
  const double s3 = s * s * s;
  const double s7 = s3 * s3 * s;
  const double A = x.x1 * x.x1 * x.x1 - y.x1 * y.x1 * y.x1;
  const double B = x.x2 - y.x2;
  d.d1 = A / s3;
  d.d2 = 2.0 * B / s3;
  d.d11 = -3.0 * A * A / s7 + 3.0 * x.x1 * x.x1 / s3;
  d.d12 = -6.0 * A * B / s7;
  d.d22 = -12.0 * B * B / s7 + 2.0 / s3;
  return d;
}

namespace {

double case_iv_m3(double alpha, double t) {
  double a = 0.5 * alpha;
  return (std::pow(2.0 * t, a) - std::pow(3.0, alpha)) / (std::pow(t, a) - std::pow(3.0, alpha));
}

}  // namespace

double gamma_floor(double alpha) {
  if (!(alpha < 0.0)) throw InvalidParameter("barrier exponent must be negative");
  const double a = 0.5 * alpha;
  double g1 = (std::pow(2.0, alpha) - std::pow(3.0, alpha)) / (1.0 - std::pow(3.0, alpha));
  double g2 = (std::pow(2.0, a) - std::pow(3.0, a)) / (1.0 - std::pow(3.0, a));
  double g4 = case_iv_m3(alpha, 3.0);
  constexpr int kSteps = 1000;
  for (int k = 0; k <= kSteps; ++k) g4 = std::min(g4, case_iv_m3(alpha, 2.0 + static_cast<double>(k) / kSteps));
  return std::min({g1, g2, g4});
}

BarrierSpec ring_normalization(const Point2& y, double r, double alpha) {
  if (!(r > 0.0)) throw InvalidParameter("barrier radius must be > 0");
  if (alpha == 0.0 || !std::isfinite(alpha)) throw InvalidParameter("barrier exponent must be finite and nonzero");
  BarrierSpec s;
  s.center = y;
  s.r = r;
  s.alpha = alpha;
  s.case_id = classify(y, r);
  const double ay = std::abs(y.x1);
  const double a = 0.5 * alpha;
  const double p3 = std::pow(3.0, alpha);
  switch (s.case_id) {
    case BarrierCase::I:
      s.M1 = p3 / (1.0 - p3);
      s.M2 = 1.0 / (std::pow(r, alpha) * (1.0 - p3));
      s.M3 = (std::pow(2.0, alpha) - p3) / (1.0 - p3);
      break;
    case BarrierCase::II: {
      const double q3 = std::pow(3.0, a);
      s.M1 = q3 / (1.0 - q3);
      s.M2 = 1.0 / (std::pow(r * ay, a) * (1.0 - q3));
      s.M3 = (std::pow(2.0, a) - q3) / (1.0 - q3);
      break;
    }
    case BarrierCase::III:
    case BarrierCase::IV: {
      const double t = ay / r;
      const double den = std::pow(t, a) - p3;
      s.M1 = p3 / den;
      // Phi must vanish where sigma = 3r, so the outer term is (3r)^alpha.
      s.M2 = 1.0 / (std::pow(r * ay, a) - std::pow(3.0 * r, alpha));
      s.M3 = s.case_id == BarrierCase::III ? (std::pow(2.0, alpha) - p3) / den : case_iv_m3(alpha, t);
      break;
    }
  }
  s.gamma_floor = alpha < 0.0 ? gamma_floor(alpha) : 0.0;
  return s;
}

BarrierSpec db_barrier_constants(const Point2& y, double r, double alpha) {
  if (!(alpha < 0.0)) throw InvalidParameter("barrier exponent must be negative");
  return ring_normalization(y, r, alpha);
}

double db_barrier_eval(const BarrierSpec& spec, const Point2& x) {
  double s = grushin::sigma(x, spec.center);
  if (!(s > 0.0)) throw SingularityError("barrier evaluated at its pole");
  return spec.M2 * std::pow(s, spec.alpha) - spec.M1;
}

double apply_L_sigma_power(const Coeffs& a, double alpha, const Point2& x, const Point2& y) {
  SigmaDerivatives d = sigma_derivatives(x, y);
  if (alpha == 0.0) return 0.0;
  const double p1 = alpha * std::pow(d.sigma, alpha - 1.0);
  const double p2 = alpha * (alpha - 1.0) * std::pow(d.sigma, alpha - 2.0);
  const double f11 = p2 * d.d1 * d.d1 + p1 * d.d11;
  const double f12 = p2 * d.d1 * d.d2 + p1 * d.d12;
  const double f22 = p2 * d.d2 * d.d2 + p1 * d.d22;
  return a.a11 * f11 + a.a22 * x.x1 * x.x1 * f22 + 2.0 * a.a12 * x.x1 * f12;
}

double apply_L_sigma_power_factored(const Coeffs& a, double alpha, const Point2& x, const Point2& y) {
  const double s = grushin::sigma(x, y);
  if (!(s > 0.0)) throw SingularityError("sigma vanishes");
  const double A = x.x1 * x.x1 * x.x1 - y.x1 * y.x1 * y.x1;
  const double B = x.x2 - y.x2;
  const double Q = a.a11 * A * A + 4.0 * a.a12 * x.x1 * A * B + 4.0 * a.a22 * x.x1 * x.x1 * B * B;
  const double s4 = s * s * s * s;
  return alpha * std::pow(s, alpha - 8.0) * ((alpha - 4.0) * Q + x.x1 * x.x1 * s4 * (3.0 * a.a11 + 2.0 * a.a22));
}

double apply_L_barrier(const BarrierSpec& spec, const Coeffs& a, const Point2& x) {
  return spec.M2 * apply_L_sigma_power(a, spec.alpha, x, spec.center);
}

SubsolutionReport verify_subsolution(const BarrierSpec& spec, const Coeffs& a, std::span<const Point2> samples) {
  if (samples.empty()) throw DegenerateInput("no ring samples supplied");
  SubsolutionReport rep;
  rep.min_value = grushin::kInf;
  rep.scale = std::abs(spec.M2) * std::pow(spec.r, spec.alpha - 2.0);
  for (const auto& p : samples) {
    double v = apply_L_barrier(spec, a, p);
    if (v < rep.min_value) {
      rep.min_value = v;
      rep.argmin = p;
    }
  }
  rep.samples = samples.size();
  return rep;
}

std::vector<Point2> ring_samples(const Point2& y, double inner, double outer, std::size_t n, std::uint64_t seed) {
  auto ring = grushin::RegionDescriptor::ring_h(y, inner, outer);
  ring.validate();
  grushin::Rect rect = grushin::bounding_rect(ring);
  Halton2 seq(seed);
  std::vector<Point2> pts;
  pts.reserve(n);
  std::size_t tries = 0;
  while (pts.size() < n) {
    if (++tries > 1000 * (n + 10)) throw DegenerateInput("ring too thin to sample");
    Point2 p = seq.next_in(rect.lo, rect.hi);
    if (grushin::contains(ring, p)) pts.push_back(p);
  }
  return pts;
}

std::vector<Point2> h_boundary_samples(const Point2& y, double radius, std::size_t n) {
  return grushin::trace_boundary(grushin::RegionDescriptor::h(y, radius), n).first_exit;
}

Coeffs random_admissible_coeffs(std::uint64_t seed, double lambda, double Lambda) {
  if (!(lambda > 0.0) || !(Lambda >= lambda)) throw InvalidParameter("ellipticity constants need 0 < lambda <= Lambda");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eig(lambda, Lambda);
  std::uniform_real_distribution<double> ang(0.0, std::numbers::pi);
  double e1 = eig(rng);
  double e2 = eig(rng);
  double th = ang(rng);
  double c = std::cos(th);
  double s = std::sin(th);
  return {e1 * c * c + e2 * s * s, (e1 - e2) * c * s, e1 * s * s + e2 * c * c};
}

}  // namespace hlab::barriers
