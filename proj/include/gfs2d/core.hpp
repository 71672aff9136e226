#pragma once

// Shared domain types for weighted double trigonometric systems on the
// torus T^2 = [0,2pi)^2: Lebesgue exponent pairs, frequency indices,
// exclusion patterns and uniform grids.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfs2d {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

/// Reduce an angle to [0, 2pi).
inline double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

/// Reduce an angular difference to (-pi, pi].
inline double wrap_delta(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

/// Distance on the circle, always in [0, pi].
inline double torus_dist(double a, double b) { return std::fabs(wrap_delta(a - b)); }

struct UnsupportedExponent : std::runtime_error {
  explicit UnsupportedExponent(const std::string& what) : std::runtime_error(what) {}
};

struct PatternMismatch : std::runtime_error {
  explicit PatternMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// p' with 1/p + 1/p' = 1. Only p > 1 is supported: at p = 1 the dual
/// conditions become essential-supremum statements the integral engine
/// cannot evaluate.
inline double conjugate_exponent(double p) {
  if (!(std::isfinite(p)) || p <= 1.0)
    throw UnsupportedExponent("exponent must be finite and > 1, got " + std::to_string(p));
  return p / (p - 1.0);
}

/// The pair (p, p'), immutable after construction.
class LebesgueExponent {
 public:
  explicit LebesgueExponent(double p) : p_(p), p_conj_(conjugate_exponent(p)) {}

  double p() const { return p_; }
  double conj() const { return p_conj_; }

 private:
  double p_;
  double p_conj_;
};

struct FreqIndex {
  int k = 0;
  int m = 0;

  friend bool operator==(const FreqIndex& a, const FreqIndex& b) {
    return a.k == b.k && a.m == b.m;
  }
  friend bool operator!=(const FreqIndex& a, const FreqIndex& b) { return !(a == b); }
  friend bool operator<(const FreqIndex& a, const FreqIndex& b) {
    return a.k != b.k ? a.k < b.k : a.m < b.m;
  }
};

/// Which subset Omega^c = Z^2 \ Omega is excluded from the system.
///   Point(nu,mu) : Omega^c = {(nu,mu)}
///   ColumnZ      : Omega^c = {0} x Z
///   ColumnZ0     : Omega^c = {0} x (Z \ {0})
class ExclusionPattern {
 public:
  enum class Kind { Point, ColumnZ, ColumnZ0 };

  static ExclusionPattern point(int nu, int mu) { return ExclusionPattern(Kind::Point, nu, mu); }
  static ExclusionPattern column_z() { return ExclusionPattern(Kind::ColumnZ, 0, 0); }
  static ExclusionPattern column_z0() { return ExclusionPattern(Kind::ColumnZ0, 0, 0); }

  Kind kind() const { return kind_; }
  int nu() const { return nu_; }
  int mu() const { return mu_; }

  std::string name() const {
    switch (kind_) {
      case Kind::Point:
        return "point(" + std::to_string(nu_) + "," + std::to_string(mu_) + ")";
      case Kind::ColumnZ:
        return "column";
      case Kind::ColumnZ0:
        return "column0";
    }
    return "?";
  }

  friend bool operator==(const ExclusionPattern& a, const ExclusionPattern& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Point || (a.nu_ == b.nu_ && a.mu_ == b.mu_));
  }

 private:
  ExclusionPattern(Kind kind, int nu, int mu) : kind_(kind), nu_(nu), mu_(mu) {}
  Kind kind_;
  int nu_;
  int mu_;
};

/// True iff idx lies in Omega (i.e. not in the excluded set).
inline bool omega_contains(const ExclusionPattern& pattern, const FreqIndex& idx) {
  switch (pattern.kind()) {
    case ExclusionPattern::Kind::Point:
      return !(idx.k == pattern.nu() && idx.m == pattern.mu());
    case ExclusionPattern::Kind::ColumnZ:
      return idx.k != 0;
    case ExclusionPattern::Kind::ColumnZ0:
      return idx.k != 0 || idx.m == 0;
  }
  return true;
}

/// A point pattern together with the modulation phase that maps it to the
/// canonical Point(0,0) case; verdicts are invariant under this shift.
struct ModulatedPattern {
  ExclusionPattern canonical = ExclusionPattern::point(0, 0);
  int phase_nu = 0;
  int phase_mu = 0;
};

inline ModulatedPattern modulate_pattern(const ExclusionPattern& pattern) {
  if (pattern.kind() != ExclusionPattern::Kind::Point)
    throw PatternMismatch("modulate_pattern requires a point pattern, got " + pattern.name());
  return ModulatedPattern{ExclusionPattern::point(0, 0), pattern.nu(), pattern.mu()};
}

/// Uniform tensor grid on [0,2pi)^2 with nodes exactly 2*pi*j/n.
class TorusGrid {
 public:
  TorusGrid(int n_x, int n_y) : n_x_(n_x), n_y_(n_y) {
    if (n_x < 1 || n_y < 1) throw std::invalid_argument("TorusGrid sizes must be positive");
  }

  static TorusGrid square(int n) { return TorusGrid(n, n); }

  int n_x() const { return n_x_; }
  int n_y() const { return n_y_; }
  double x(int i) const { return kTwoPi * i / n_x_; }
  double y(int j) const { return kTwoPi * j / n_y_; }
  double dx() const { return kTwoPi / n_x_; }
  double dy() const { return kTwoPi / n_y_; }

 private:
  int n_x_;
  int n_y_;
};

/// Square window of Omega-indices with max(|k|,|m|) <= radius, enumerated
/// ring by ring and lexicographically inside each ring. The order is part
/// of the report format.
inline std::vector<FreqIndex> enumerate_window(const ExclusionPattern& pattern, int radius) {
  std::vector<FreqIndex> out;
  for (int r = 0; r <= radius; ++r) {
    std::vector<FreqIndex> ring;
    for (int k = -r; k <= r; ++k)
      for (int m = -r; m <= r; ++m) {
        if (std::max(std::abs(k), std::abs(m)) != r) continue;
        FreqIndex idx{k, m};
        if (omega_contains(pattern, idx)) ring.push_back(idx);
      }
    // ring loop above is already lexicographic in (k, m)
    out.insert(out.end(), ring.begin(), ring.end());
  }
  return out;
}

}  // namespace gfs2d
