#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace hlab {

/// A point (x1, x2) of the Grushin plane.
struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline bool is_finite(const Point2& p) { return std::isfinite(p.x1) && std::isfinite(p.x2); }

// Error taxonomy. Every failure a caller can act on has its own type so the
// CLI and the Python layer can map them to distinct exit codes / exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class MetricAxiomViolation : public Error {
 public:
  using Error::Error;
};

class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class ConstantInconsistency : public Error {
 public:
  using Error::Error;
};

class StructureViolation : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Coefficients (a11, a12, a22) of L = a11 X^2 + a22 Y^2 + 2 a12 YX at one point.
struct Coeffs {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;
};

/// Eigenvalues (smallest, largest) of the symmetric matrix [[a11, a12], [a12, a22]].
inline std::pair<double, double> eigen_bounds(const Coeffs& a) {
  double mean = 0.5 * (a.a11 + a.a22);
  double half_gap = std::hypot(0.5 * (a.a11 - a.a22), a.a12);
  return {mean - half_gap, mean + half_gap};
}

/// lambda |xi|^2 <= a11 xi1^2 + 2 a12 xi1 xi2 + a22 xi2^2 <= Lambda |xi|^2 for all xi.
inline bool is_elliptic(const Coeffs& a, double lambda, double Lambda, double tol = 1e-12) {
  auto [lo, hi] = eigen_bounds(a);
  return lo >= lambda - tol && hi <= Lambda + tol;
}

/// Van der Corput radical inverse of `index` in `base`.
inline double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

/// Deterministic 2-D Halton sequence (bases 2 and 3). `seed` offsets the
/// starting index so different seeds give disjoint, reproducible streams.
class Halton2 {
 public:
  explicit Halton2(std::uint64_t seed = 0) : index_(seed * 7919u + 1u) {}

  /// Next point of the unit square.
  Point2 next() {
    Point2 p{radical_inverse(index_, 2), radical_inverse(index_, 3)};
    ++index_;
    return p;
  }

  /// Next point of [lo.x1, hi.x1] x [lo.x2, hi.x2].
  Point2 next_in(const Point2& lo, const Point2& hi) {
    Point2 u = next();
    return {lo.x1 + u.x1 * (hi.x1 - lo.x1), lo.x2 + u.x2 * (hi.x2 - lo.x2)};
  }

 private:
  std::uint64_t index_;
};

}  // namespace hlab
