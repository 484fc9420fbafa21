#pragma once

// Explicit ring barrier Phi = M2 sigma^alpha - M1 for the double ball
// argument on the sets H(y, r), and the machinery to check L Phi >= 0.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "harnacklab/core.hpp"

namespace hlab::barriers {

enum class BarrierCase { I, II, III, IV };

std::string_view to_string(BarrierCase c);

/// |y1| < r -> I; 3r <= |y1| -> II; r <= |y1| < 2r -> III; 2r <= |y1| < 3r -> IV.
/// These are exactly the branch conditions of h_r, h_2r and h_3r.
BarrierCase classify(const Point2& y, double r);

struct BarrierSpec {
  Point2 center;
  double r = 1.0;
  double alpha = -6.0;
  BarrierCase case_id = BarrierCase::I;
  double M1 = 0.0;
  double M2 = 0.0;
  double M3 = 0.0;  // value of Phi on the boundary of H(y, 2r)
  double gamma_floor = 0.0;
};

/// alpha = 4 - 10 Lambda / lambda, the largest exponent for which sigma^alpha
/// is a subsolution for every coefficient field with these ellipticity bounds.
double barrier_alpha(double lambda, double Lambda);

/// Closed-form first and second partial derivatives of sigma(., y) at x.
struct SigmaDerivatives {
  double sigma = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d12 = 0.0;
  double d22 = 0.0;
};

SigmaDerivatives sigma_derivatives(const Point2& x, const Point2& y);

/// Lower bound gamma of Phi on the ring H(y,2r) \ H(y,r): the minimum of the
/// case-wise lower bounds for M3 (Case IV minimized over |y1|/r in [2, 3]).
double gamma_floor(double alpha);

/// Barrier constants for center y and radius r; requires alpha < 0.
BarrierSpec db_barrier_constants(const Point2& y, double r, double alpha);

/// Same normalization (Phi = 1 on the inner boundary, 0 on the outer one)
/// for any alpha != 0. For alpha > 0 the constants are negative and Phi is
/// not a barrier; used to show the admissibility condition is active.
BarrierSpec ring_normalization(const Point2& y, double r, double alpha);

/// Phi(x) = M2 sigma(x, y)^alpha - M1.
double db_barrier_eval(const BarrierSpec& spec, const Point2& x);

/// L applied to sigma(., y)^alpha at x through the chain rule.
double apply_L_sigma_power(const Coeffs& a, double alpha, const Point2& x, const Point2& y);

/// Same quantity through the factored form
/// alpha sigma^(alpha-8) ((alpha-4) Q + x1^2 sigma^4 (3 a11 + 2 a22)),
/// Q = a11 (x1^3-y1^3)^2 + 4 a12 x1 (x1^3-y1^3)(x2-y2) + 4 a22 x1^2 (x2-y2)^2.
double apply_L_sigma_power_factored(const Coeffs& a, double alpha, const Point2& x, const Point2& y);

/// L Phi at x.
double apply_L_barrier(const BarrierSpec& spec, const Coeffs& a, const Point2& x);

struct SubsolutionReport {
  double min_value = 0.0;
  Point2 argmin;
  double scale = 0.0;  // |M2| r^(alpha-2)
  std::size_t samples = 0;
};

/// Minimum of L Phi over the samples. Throws SingularityError at sigma = 0.
SubsolutionReport verify_subsolution(const BarrierSpec& spec, const Coeffs& a, std::span<const Point2> samples);

/// Deterministic samples of the ring H(y, inner) ... H(y, outer), i.e. points
/// with h_inner > inner and h_outer < outer.
std::vector<Point2> ring_samples(const Point2& y, double inner, double outer, std::size_t n, std::uint64_t seed);

/// Points on the boundary of H(y, radius), one per traced ray.
std::vector<Point2> h_boundary_samples(const Point2& y, double radius, std::size_t n);

/// Random constant coefficients with eigenvalues in [lambda, Lambda].
Coeffs random_admissible_coeffs(std::uint64_t seed, double lambda, double Lambda);

}  // namespace hlab::barriers
