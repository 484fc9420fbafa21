#pragma once

// Sampling estimators for the structural constants of a quasi-metric measure
// space. Every estimator is a supremum over a finite sample, so the values
// returned are lower bounds of the true constants and are reported as
// estimates, never as certified values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "harnacklab/core.hpp"

namespace hlab::quasimetric {

struct QuasiMetricSpec {
  double K = 1.0;
  double alpha_h = 1.0;
  double beta_h = 1.0;
  double C_D = 2.0;
  double q = 1.0;  // log2(C_D)
  double delta_rd = 0.5;

  /// Builds a spec with q tied to C_D and validates every range.
  static QuasiMetricSpec make(double K, double alpha_h, double beta_h, double C_D, double delta_rd) {
    if (!(K >= 1.0)) throw InvalidParameter("quasi-triangle constant K must be >= 1");
    if (!(alpha_h > 0.0 && alpha_h <= 1.0)) throw InvalidParameter("Hoelder exponent must lie in (0,1]");
    if (!(beta_h > 0.0)) throw InvalidParameter("Hoelder coefficient must be > 0");
    if (!(C_D > 1.0)) throw InvalidParameter("doubling constant must be > 1");
    if (!(delta_rd > 0.0 && delta_rd < 1.0)) throw InvalidParameter("reverse-doubling constant must lie in (0,1)");
    return {K, alpha_h, beta_h, C_D, std::log2(C_D), delta_rd};
  }
};

struct RingModulus {
  double eps = 0.0;
  double omega = 0.0;
};

template <typename P>
struct Triple {
  P x;
  P y;
  P z;
};

template <typename P>
struct Ball {
  P center;
  double radius = 0.0;
};

struct Estimate {
  double value = 0.0;
  std::size_t used = 0;     // samples that contributed
  std::size_t skipped = 0;  // degenerate samples ignored
  std::size_t argmax = 0;   // index of the maximizing sample
};

/// max over triples of d(x,y) / (d(x,z) + d(z,y)).
///
/// Fully degenerate triples (all three distances zero) are skipped. A triple
/// with d(x,z) + d(z,y) = 0 but d(x,y) > 0 can only come from a distance that
/// is not zero exactly on the diagonal and raises MetricAxiomViolation.
template <typename P, typename Dist>
Estimate estimate_quasi_triangle_K(Dist&& d, std::span<const Triple<P>> samples) {
  if (samples.empty()) throw DegenerateInput("quasi-triangle estimate needs at least one triple");
  Estimate est;
  est.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& t = samples[i];
    double num = d(t.x, t.y);
    double den = d(t.x, t.z) + d(t.z, t.y);
    if (den == 0.0) {
      if (num > 0.0) throw MetricAxiomViolation("d(x,z) + d(z,y) = 0 while d(x,y) > 0");
      ++est.skipped;
      continue;
    }
    double ratio = num / den;
    if (ratio > est.value) {
      est.value = ratio;
      est.argmax = i;
    }
    ++est.used;
  }
  if (est.used == 0) throw DegenerateInput("every triple was degenerate; quasi-triangle ratio undefined");
  return est;
}

/// max over triples of |d(x,y) - d(x,z)| - beta d(y,z)^alpha (d(x,y) + d(x,z))^(1-alpha).
/// A value <= 0 means the sampled Hoelder inequality holds.
template <typename P, typename Dist>
Estimate holder_defect(Dist&& d, double alpha_h, double beta_h, std::span<const Triple<P>> samples) {
  if (!(alpha_h > 0.0 && alpha_h <= 1.0)) throw InvalidParameter("Hoelder exponent must lie in (0,1]");
  if (!(beta_h > 0.0)) throw InvalidParameter("Hoelder coefficient must be > 0");
  if (samples.empty()) throw DegenerateInput("Hoelder defect needs at least one triple");
  Estimate est;
  est.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& t = samples[i];
    double dxy = d(t.x, t.y);
    double dxz = d(t.x, t.z);
    double dyz = d(t.y, t.z);
    double bound = beta_h * std::pow(dyz, alpha_h) * std::pow(dxy + dxz, 1.0 - alpha_h);
    double defect = std::abs(dxy - dxz) - bound;
    if (defect > est.value) {
      est.value = defect;
      est.argmax = i;
    }
    ++est.used;
  }
  return est;
}

/// Smallest beta for which holder_defect(d, alpha_h, beta, samples) <= 0.
/// Triples whose right-hand side vanishes are skipped when the left side also
/// vanishes; otherwise no finite beta exists and +inf is returned.
template <typename P, typename Dist>
Estimate minimal_holder_beta(Dist&& d, double alpha_h, std::span<const Triple<P>> samples) {
  if (!(alpha_h > 0.0 && alpha_h <= 1.0)) throw InvalidParameter("Hoelder exponent must lie in (0,1]");
  Estimate est;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& t = samples[i];
    double dxy = d(t.x, t.y);
    double dxz = d(t.x, t.z);
    double lhs = std::abs(dxy - dxz);
    double rhs = std::pow(d(t.y, t.z), alpha_h) * std::pow(dxy + dxz, 1.0 - alpha_h);
    if (rhs == 0.0) {
      if (lhs > 0.0) {
        est.value = std::numeric_limits<double>::infinity();
        est.argmax = i;
        return est;
      }
      ++est.skipped;
      continue;
    }
    if (lhs / rhs > est.value) {
      est.value = lhs / rhs;
      est.argmax = i;
    }
    ++est.used;
  }
  return est;
}

struct DoublingEstimate {
  double value = 0.0;  // max ratio over the family
  double q = 0.0;      // log2(value)
  std::vector<double> ratios;
};

namespace detail {
inline void require_positive_measure(double m, const char* what) {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidMeasure(std::string(what) + " has non-positive or non-finite measure");
}
}  // namespace detail

/// max over the family of mu(B_2r(x)) / mu(B_r(x)), together with q = log2 of it.
template <typename P, typename Measure>
DoublingEstimate doubling_constant(Measure&& measure_of_ball, std::span<const Ball<P>> balls) {
  if (balls.empty()) throw DegenerateInput("doubling estimate needs at least one ball");
  DoublingEstimate out;
  out.ratios.reserve(balls.size());
  for (const auto& b : balls) {
    double small = measure_of_ball(b.center, b.radius);
    double big = measure_of_ball(b.center, 2.0 * b.radius);
    detail::require_positive_measure(small, "ball B_r");
    detail::require_positive_measure(big, "ball B_2r");
    out.ratios.push_back(big / small);
  }
  out.value = *std::max_element(out.ratios.begin(), out.ratios.end());
  out.q = std::log2(out.value);
  return out;
}

/// max over the family of mu(B_r(x)) / mu(B_2r(x)); reverse doubling holds when < 1.
template <typename P, typename Measure>
DoublingEstimate reverse_doubling(Measure&& measure_of_ball, std::span<const Ball<P>> balls) {
  if (balls.empty()) throw DegenerateInput("reverse-doubling estimate needs at least one ball");
  DoublingEstimate out;
  out.ratios.reserve(balls.size());
  for (const auto& b : balls) {
    double small = measure_of_ball(b.center, b.radius);
    double big = measure_of_ball(b.center, 2.0 * b.radius);
    detail::require_positive_measure(small, "ball B_r");
    detail::require_positive_measure(big, "ball B_2r");
    out.ratios.push_back(small / big);
  }
  out.value = *std::max_element(out.ratios.begin(), out.ratios.end());
  out.q = std::log2(out.value);
  return out;
}

/// omega = mu(B_r \ B_(1-eps)r) / mu(B_r).
///
/// `measure_of_shell(center, inner, outer)` returns the measure of
/// {p : inner <= d(center, p) < outer}; inner = 0 gives the ball itself.
/// Computing the shell directly (rather than a difference of two ball
/// measures) keeps omega exactly zero at eps = 0 and monotone in eps.
template <typename P, typename ShellMeasure>
RingModulus ring_modulus(ShellMeasure&& measure_of_shell, const Ball<P>& ball, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidParameter("ring width eps must lie in [0,1)");
  if (!(ball.radius > 0.0)) throw InvalidParameter("ball radius must be > 0");
  double whole = measure_of_shell(ball.center, 0.0, ball.radius);
  if (!(whole > 0.0)) throw InvalidMeasure("ball has zero measure");
  if (eps == 0.0) return {0.0, 0.0};
  double shell = measure_of_shell(ball.center, (1.0 - eps) * ball.radius, ball.radius);
  return {eps, shell / whole};
}

}  // namespace hlab::quasimetric
