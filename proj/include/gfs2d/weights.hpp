#pragma once

// Weight functions M(x,y) on the torus and the phase functions P(y) used
// by the column-pattern minimality certificates.
//
// Built-in families:
//   sum  : M = |sin((x-x0)/2)|^a + |sin((y-y0)/2)|^a   (vanishes at one point)
//   xonly: M = |sin((x-x0)/2)|^a                        (vanishes on a line)
//   const: M = c
// plus nonnegative tabulated weights with bilinear interpolation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gfs2d/core.hpp"

namespace gfs2d {

struct NoLineSingularity : std::runtime_error {
  explicit NoLineSingularity(const std::string& what) : std::runtime_error(what) {}
};

/// Analytic description of the zero set of a weight. Tabulated weights
/// always carry Kind::Empty; verdicts that need the metadata degrade to
/// unknown instead of guessing.
struct SingularSet {
  enum class Kind { Empty, Point, LineX };
  Kind kind = Kind::Empty;
  double x0 = 0.0;
  double y0 = 0.0;
};

class Weight {
 public:
  enum class Kind { ExampleSum, ExampleX, Constant, Tabulated };

  static Weight example_sum(double x0, double y0, double alpha) {
    Weight w(Kind::ExampleSum);
    w.x0_ = wrap_angle(x0);
    w.y0_ = wrap_angle(y0);
    w.alpha_ = alpha;
    w.singular_ = {SingularSet::Kind::Point, w.x0_, w.y0_};
    return w;
  }

  static Weight example_x(double x0, double alpha) {
    Weight w(Kind::ExampleX);
    w.x0_ = wrap_angle(x0);
    w.alpha_ = alpha;
    w.singular_ = {SingularSet::Kind::LineX, w.x0_, 0.0};
    return w;
  }

  static Weight constant(double c) {
    Weight w(Kind::Constant);
    w.const_value_ = std::fabs(c);
    return w;
  }

  /// Row-major table of nonnegative values on a uniform grid; complex or
  /// signed inputs are reduced to their modulus on ingestion.
  static Weight tabulated(int n_x, int n_y, std::vector<double> values) {
    if (n_x < 2 || n_y < 2 || values.size() != static_cast<size_t>(n_x) * n_y)
      throw std::invalid_argument("tabulated weight: bad table shape");
    Weight w(Kind::Tabulated);
    w.tab_nx_ = n_x;
    w.tab_ny_ = n_y;
    for (double& v : values) v = std::fabs(v);
    w.table_ = std::move(values);
    return w;
  }

  /// CSV format: first line "n_x,n_y", then n_x rows of n_y values.
  static Weight from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open weight CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty weight CSV: " + path);
    int nx = 0, ny = 0;
    {
      std::istringstream hs(line);
      char comma = 0;
      if (!(hs >> nx >> comma >> ny) || comma != ',' || nx < 2 || ny < 2)
        throw std::runtime_error("weight CSV header must be 'n_x,n_y': " + path);
    }
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(nx) * ny);
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) {
        if (cell.empty()) continue;
        vals.push_back(std::stod(cell));
      }
    }
    if (vals.size() != static_cast<size_t>(nx) * ny)
      throw std::runtime_error("weight CSV: expected " + std::to_string(nx * ny) + " values, got " +
                               std::to_string(vals.size()));
    return tabulated(nx, ny, std::move(vals));
  }

  Kind kind() const { return kind_; }
  const SingularSet& singular_set() const { return singular_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double alpha() const { return alpha_; }
  double constant_value() const { return const_value_; }

  double min_table_value() const {
    if (kind_ != Kind::Tabulated) return 0.0;
    return *std::min_element(table_.begin(), table_.end());
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::ExampleSum:
        os << "sum(x0=" << x0_ << ",y0=" << y0_ << ",alpha=" << alpha_ << ")";
        break;
      case Kind::ExampleX:
        os << "xonly(x0=" << x0_ << ",alpha=" << alpha_ << ")";
        break;
      case Kind::Constant:
        os << "const(" << const_value_ << ")";
        break;
      case Kind::Tabulated:
        os << "tabulated(" << tab_nx_ << "x" << tab_ny_ << ")";
        break;
    }
    return os.str();
  }

  double operator()(double x, double y) const { return eval(x, y); }

  double eval(double x, double y) const {
    switch (kind_) {
      case Kind::ExampleSum:
        return std::pow(std::fabs(std::sin(0.5 * (x - x0_))), alpha_) +
               std::pow(std::fabs(std::sin(0.5 * (y - y0_))), alpha_);
      case Kind::ExampleX:
        return std::pow(std::fabs(std::sin(0.5 * (x - x0_))), alpha_);
      case Kind::Constant:
        return const_value_;
      case Kind::Tabulated:
        return interpolate(x, y);
    }
    return 0.0;
  }

 private:
  explicit Weight(Kind kind) : kind_(kind) {}

  double interpolate(double x, double y) const {
    const double fx = wrap_angle(x) / kTwoPi * tab_nx_;
    const double fy = wrap_angle(y) / kTwoPi * tab_ny_;
    const int i0 = static_cast<int>(std::floor(fx)) % tab_nx_;
    const int j0 = static_cast<int>(std::floor(fy)) % tab_ny_;
    const int i1 = (i0 + 1) % tab_nx_;
    const int j1 = (j0 + 1) % tab_ny_;
    const double tx = fx - std::floor(fx);
    const double ty = fy - std::floor(fy);
    const double v00 = table_[static_cast<size_t>(i0) * tab_ny_ + j0];
    const double v01 = table_[static_cast<size_t>(i0) * tab_ny_ + j1];
    const double v10 = table_[static_cast<size_t>(i1) * tab_ny_ + j0];
    const double v11 = table_[static_cast<size_t>(i1) * tab_ny_ + j1];
    return (1 - tx) * ((1 - ty) * v00 + ty * v01) + tx * ((1 - ty) * v10 + ty * v11);
  }

  Kind kind_;
  SingularSet singular_;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double alpha_ = 1.0;
  double const_value_ = 1.0;
  int tab_nx_ = 0;
  int tab_ny_ = 0;
  std::vector<double> table_;
};

/// eval_weight is the free-function form of Weight::eval.
inline double eval_weight(const Weight& w, double x, double y) { return w.eval(x, y); }

struct UpsilonCheck {
  bool in_upsilon = false;
  bool in_upsilon0 = false;
  double ess_lo = 0.0;
  double ess_hi = 0.0;
  Complex mean{0.0, 0.0};
};

/// Phase function P(y) on the circle. The upsilon flags record membership
/// in the class of essentially invertible bounded functions (upsilon) and
/// its zero-mean subclass (upsilon0).
class PhaseFunction {
 public:
  enum class Kind { ConstantUnimodular, FirstHarmonic, Tabulated };

  static PhaseFunction constant_unimodular(double x0) {
    PhaseFunction p(Kind::ConstantUnimodular);
    p.x0_ = wrap_angle(x0);
    p.upsilon_ = true;
    p.upsilon0_ = false;
    return p;
  }

  static PhaseFunction first_harmonic() {
    PhaseFunction p(Kind::FirstHarmonic);
    p.upsilon_ = true;
    p.upsilon0_ = true;
    return p;
  }

  static PhaseFunction tabulated(std::vector<Complex> values, double tol = 1e-9);

  Kind kind() const { return kind_; }
  double x0() const { return x0_; }
  bool upsilon() const { return upsilon_; }
  bool upsilon0() const { return upsilon0_; }

  std::string describe() const {
    switch (kind_) {
      case Kind::ConstantUnimodular: {
        std::ostringstream os;
        os << "const-phase(x0=" << x0_ << ")";
        return os.str();
      }
      case Kind::FirstHarmonic:
        return "first-harmonic";
      case Kind::Tabulated:
        return "tabulated-phase(" + std::to_string(values_.size()) + ")";
    }
    return "?";
  }

  Complex operator()(double y) const { return eval(y); }

  Complex eval(double y) const {
    switch (kind_) {
      case Kind::ConstantUnimodular:
        return std::polar(1.0, x0_);
      case Kind::FirstHarmonic:
        return std::polar(1.0, y);
      case Kind::Tabulated: {
        const double fy = wrap_angle(y) / kTwoPi * values_.size();
        const size_t j0 = static_cast<size_t>(std::floor(fy)) % values_.size();
        const size_t j1 = (j0 + 1) % values_.size();
        const double t = fy - std::floor(fy);
        return (1.0 - t) * values_[j0] + t * values_[j1];
      }
    }
    return Complex(0, 0);
  }

  /// P^k with negative powers taken as conj(P)^|k| (exact inverse for
  /// unimodular P).
  Complex power(double y, int k) const {
    if (k == 0) return Complex(1.0, 0.0);
    if (kind_ == Kind::ConstantUnimodular) return std::polar(1.0, k * x0_);
    if (kind_ == Kind::FirstHarmonic) return std::polar(1.0, k * y);
    Complex base = eval(y);
    if (k < 0) base = std::conj(base);
    Complex acc(1.0, 0.0);
    for (int i = 0; i < std::abs(k); ++i) acc *= base;
    return acc;
  }

 private:
  explicit PhaseFunction(Kind kind) : kind_(kind) {}

  Kind kind_;
  double x0_ = 0.0;
  bool upsilon_ = false;
  bool upsilon0_ = false;
  std::vector<Complex> values_;
};

/// Essential bounds of |P| by dense sampling plus the mean of P; upsilon0
/// additionally requires |mean| <= tol.
inline UpsilonCheck check_upsilon(const PhaseFunction& P, double tol = 1e-9, int n = 4096) {
  UpsilonCheck r;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  Complex sum(0, 0);
  for (int j = 0; j < n; ++j) {
    const double y = kTwoPi * j / n;
    const Complex v = P.eval(y);
    const double a = std::abs(v);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    sum += v;
  }
  r.ess_lo = lo;
  r.ess_hi = hi;
  r.mean = sum / static_cast<double>(n);
  r.in_upsilon = std::isfinite(hi) && lo > 0.0;
  r.in_upsilon0 = r.in_upsilon && std::abs(r.mean) <= tol;
  return r;
}

inline PhaseFunction PhaseFunction::tabulated(std::vector<Complex> values, double tol) {
  if (values.size() < 2) throw std::invalid_argument("tabulated phase needs >= 2 samples");
  PhaseFunction p(Kind::Tabulated);
  p.values_ = std::move(values);
  const UpsilonCheck chk = check_upsilon(p, tol, static_cast<int>(p.values_.size()) * 4);
  p.upsilon_ = chk.in_upsilon;
  p.upsilon0_ = chk.in_upsilon0;
  return p;
}

/// For a line-singular weight, the phase tracing the zero set: P(y) =
/// e^{i x_min(y)}. Only the line family carries the needed metadata; for
/// it the argmin per slice is the constant x0.
inline PhaseFunction suggest_phase(const Weight& w) {
  if (w.singular_set().kind != SingularSet::Kind::LineX)
    throw NoLineSingularity("suggest_phase: weight " + w.describe() +
                            " has no line singularity metadata");
  return PhaseFunction::constant_unimodular(w.x0());
}

}  // namespace gfs2d
