#pragma once

// Closed-form biorthogonal systems for the weighted trigonometric system
// and their numerical verification.
//
// Inner products against dual elements are improper near the weight's
// zero set: they are evaluated over nested exclusion windows (slabs of
// shrinking width around the singular abscissa) and extrapolated per
// entry from the ladder of partial integrals, exactly like the
// classifier's integrals.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gfs2d/classifier.hpp"
#include "gfs2d/core.hpp"
#include "gfs2d/quadrature.hpp"
#include "gfs2d/weights.hpp"

namespace gfs2d {

struct WitnessMismatch : std::runtime_error {
  explicit WitnessMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NotMinimal : std::runtime_error {
  explicit NotMinimal(const std::string& what) : std::runtime_error(what) {}
};

/// Lazily evaluable dual family. The element at (k,m) is
///   (2pi)^-2 * numerator(k,m;x,y) / conj(M(x,y))
/// with the numerator depending on the form.
class DualSystem {
 public:
  enum class Form { Plain, PointForm, ColumnForm, Column0Form };

  static DualSystem plain(ExclusionPattern pattern, Weight w) {
    DualSystem d(std::move(pattern), std::move(w), Form::Plain);
    return d;
  }
  static DualSystem point_form(ExclusionPattern pattern, Weight w, double x0, double y0) {
    if (pattern.kind() != ExclusionPattern::Kind::Point)
      throw WitnessMismatch("point-form duals require a point pattern");
    DualSystem d(std::move(pattern), std::move(w), Form::PointForm);
    d.x0_ = wrap_angle(x0);
    d.y0_ = wrap_angle(y0);
    return d;
  }
  static DualSystem column_form(ExclusionPattern pattern, Weight w, PhaseFunction P) {
    DualSystem d(std::move(pattern), std::move(w), Form::ColumnForm);
    d.P_ = std::move(P);
    return d;
  }
  static DualSystem column0_form(ExclusionPattern pattern, Weight w, PhaseFunction P,
                                 PhaseFunction Q) {
    DualSystem d(std::move(pattern), std::move(w), Form::Column0Form);
    d.P_ = std::move(P);
    d.Q_ = std::move(Q);
    return d;
  }

  Form form() const { return form_; }
  const ExclusionPattern& pattern() const { return pattern_; }
  const Weight& weight() const { return weight_; }
  const std::optional<PhaseFunction>& phase() const { return P_; }
  const std::optional<PhaseFunction>& phase_q() const { return Q_; }
  double witness_x0() const { return x0_; }
  double witness_y0() const { return y0_; }

  std::string form_name() const {
    switch (form_) {
      case Form::Plain: return "plain";
      case Form::PointForm: return "point";
      case Form::ColumnForm: return "column";
      case Form::Column0Form: return "column0";
    }
    return "?";
  }

  /// Numerator of the closed form; defined for every (k,m), not just
  /// Omega (the recurrence identity runs over all of Z^2).
  ///
  /// For a modulated point pattern the correction term is the excluded
  /// harmonic e^{i nu x} e^{i mu y} scaled by the witness phase; at
  /// (nu,mu) = (0,0) this is the plain constant e^{ikx0} e^{imy0}.
  Complex numerator(int k, int m, double x, double y) const {
    const Complex e = std::polar(1.0, k * x + m * y);
    switch (form_) {
      case Form::Plain:
        return e;
      case Form::PointForm: {
        const int nu = pattern_.nu(), mu = pattern_.mu();
        return e - std::polar(1.0, (k - nu) * x0_ + (m - mu) * y0_ + nu * x + mu * y);
      }
      case Form::ColumnForm:
        return e - P_->power(y, k) * std::polar(1.0, m * y);
      case Form::Column0Form:
        if (k == 0 && m == 0) return Complex(1.0, 0.0) - Q_->eval(y);
        return e - P_->power(y, k) * std::polar(1.0, m * y);
    }
    return Complex(0, 0);
  }

  /// Unchecked evaluation of the closed form.
  Complex eval_formula(int k, int m, double x, double y) const {
    const Complex denom = std::conj(Complex(weight_.eval(x, y), 0.0));
    return numerator(k, m, x, y) / denom / (kTwoPi * kTwoPi);
  }

  /// Element evaluation; indices must lie in Omega.
  Complex eval(int k, int m, double x, double y) const {
    if (!omega_contains(pattern_, FreqIndex{k, m}))
      throw PatternMismatch("dual element index (" + std::to_string(k) + "," + std::to_string(m) +
                            ") is excluded by pattern " + pattern_.name());
    return eval_formula(k, m, x, y);
  }

 private:
  DualSystem(ExclusionPattern pattern, Weight w, Form form)
      : pattern_(std::move(pattern)), weight_(std::move(w)), form_(form) {}

  ExclusionPattern pattern_;
  Weight weight_;
  Form form_;
  double x0_ = 0.0;
  double y0_ = 0.0;
  std::optional<PhaseFunction> P_;
  std::optional<PhaseFunction> Q_;
};

/// Construct the dual family certified by a verdict. The witness kind must
/// match the pattern; no witness selects the plain form, which is only
/// valid when the |M|^-p' integral is finite.
inline DualSystem build_dual(const ExclusionPattern& pattern, const Weight& w,
                             const LebesgueExponent& exp,
                             const std::optional<MinimalityWitness>& witness,
                             const QuadratureConfig& cfg,
                             const std::optional<Verdict>& precomputed = std::nullopt) {
  Verdict verdict;
  if (precomputed) {
    verdict = *precomputed;
  } else {
    switch (pattern.kind()) {
      case ExclusionPattern::Kind::Point:
        verdict = classify_point_case(w, exp, pattern.nu(), pattern.mu(), cfg);
        break;
      case ExclusionPattern::Kind::ColumnZ:
        verdict = classify_column_case(w, exp, cfg,
                                       witness && witness->P ? witness->P : std::nullopt);
        break;
      case ExclusionPattern::Kind::ColumnZ0:
        verdict = classify_column0_case(w, exp, cfg,
                                        witness && witness->P ? witness->P : std::nullopt,
                                        witness && witness->Q ? witness->Q : std::nullopt);
        break;
    }
  }
  if (verdict.minimal != Tristate::Yes)
    throw NotMinimal("system (" + w.describe() + ", p=" + std::to_string(exp.p()) + ", " +
                     pattern.name() + ") is not certified minimal (minimal=" +
                     to_string(verdict.minimal) + ")");

  if (!witness) {
    const bool pe_ok = [&] {
      for (const auto& e : verdict.evidence)
        if ((e.name == "c0_integral" || e.name == "pe_integral") && e.integral)
          return e.integral->convergent();
      return false;
    }();
    if (!pe_ok)
      throw WitnessMismatch(
          "plain duals need a finite |M|^-p' integral; supply a minimality witness instead");
    return DualSystem::plain(pattern, w);
  }

  switch (witness->kind) {
    case MinimalityWitness::Kind::Point:
      if (pattern.kind() != ExclusionPattern::Kind::Point)
        throw WitnessMismatch("point witness requires the point pattern");
      return DualSystem::point_form(pattern, w, witness->x0, witness->y0);
    case MinimalityWitness::Kind::Phase:
      if (pattern.kind() != ExclusionPattern::Kind::ColumnZ)
        throw WitnessMismatch("phase witness requires the full-column pattern");
      return DualSystem::column_form(pattern, w, *witness->P);
    case MinimalityWitness::Kind::PhasePair:
      if (pattern.kind() != ExclusionPattern::Kind::ColumnZ0)
        throw WitnessMismatch("phase-pair witness requires the punctured-column pattern");
      return DualSystem::column0_form(pattern, w, *witness->P, *witness->Q);
  }
  throw WitnessMismatch("unrecognised witness kind");
}

/// p'-norm membership diagnostics for a few dual elements.
struct MembershipDiagnostic {
  FreqIndex index;
  ImproperVerdict norm_power;  // integral of |element|^p'
};

inline std::vector<MembershipDiagnostic> dual_membership_diagnostics(
    const DualSystem& dual, const LebesgueExponent& exp, const std::vector<FreqIndex>& elems,
    const QuadratureConfig& cfg) {
  std::vector<MembershipDiagnostic> out;
  const double pc = exp.conj();
  for (const FreqIndex& idx : elems) {
    auto f = [&](double x, double y) {
      return std::pow(std::abs(dual.eval_formula(idx.k, idx.m, x, y)), pc);
    };
    Singularity2D sing = Singularity2D::none();
    const SingularSet& s = dual.weight().singular_set();
    if (s.kind == SingularSet::Kind::LineX) sing = Singularity2D::line_x(s.x0);
    if (s.kind == SingularSet::Kind::Point) sing = Singularity2D::point(s.x0, s.y0);
    out.push_back({idx, classify_improper_2d(f, sing, cfg)});
  }
  return out;
}

struct BiorthogonalityReport {
  std::vector<FreqIndex> window;   // shared row/column index set, ring order
  std::vector<Complex> entries;    // row-major: entries[r * window.size() + c]
  std::vector<double> deviations;  // |entry - delta|
  std::vector<char> stabilized;
  double max_dev = 0.0;
  int unstabilized_count = 0;

  const Complex& at(size_t row, size_t col) const { return entries[row * window.size() + col]; }
};

namespace detail {

struct XNodeLevels {
  // absolute x positions and weights, one vector per exclusion level
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> w;
};

inline XNodeLevels x_levels_for_weight(const Weight& w, const QuadratureConfig& cfg) {
  XNodeLevels out;
  const SingularSet& s = w.singular_set();
  if (s.kind == SingularSet::Kind::Empty) {
    std::vector<double> xs(cfg.n_2d), ws(cfg.n_2d, kTwoPi / cfg.n_2d);
    for (int i = 0; i < cfg.n_2d; ++i) xs[i] = kTwoPi * i / cfg.n_2d;
    out.x.push_back(std::move(xs));
    out.w.push_back(std::move(ws));
    return out;
  }
  // finer grids also deepen the exclusion ladder so refinement genuinely
  // reduces the extrapolation tail
  QuadratureConfig deep = cfg;
  if (cfg.n_2d > 1024)
    deep.j_max += static_cast<int>(std::lround(std::log2(static_cast<double>(cfg.n_2d) / 1024.0)));
  const auto levels = exclusion_levels_1d(s.x0, deep);
  for (const auto& lv : levels) {
    std::vector<double> xs(lv.t.size()), ws(lv.w);
    for (size_t i = 0; i < lv.t.size(); ++i) xs[i] = wrap_angle(lv.t[i]);
    out.x.push_back(std::move(xs));
    out.w.push_back(std::move(ws));
  }
  return out;
}

/// Tail-extrapolate a ladder of complex level increments.
inline std::pair<Complex, bool> stabilize_complex(const std::vector<Complex>& inc, double tol) {
  Complex sum(0, 0);
  for (const Complex& d : inc) sum += d;
  const size_t L = inc.size();
  if (L <= 1) return {sum, true};
  const double scale = 1.0 + std::abs(sum);
  const Complex last = inc[L - 1];
  if (std::abs(last) <= tol * scale) return {sum, true};
  const Complex prev = inc[L - 2];
  if (std::abs(prev) <= 1e-300) return {sum, false};
  const Complex r = last / prev;
  if (std::abs(r) <= 0.9) return {sum + last * r / (1.0 - r), true};
  return {sum, false};
}

}  // namespace detail

/// Gram matrix of the weighted system against a dual family over a finite
/// window: entry(row, col) = <M e_{k,m}, dual_{j,l}>. All entries come
/// from the same exclusion-refined quadrature ladder.
inline BiorthogonalityReport verify_biorthogonality(const DualSystem& dual,
                                                    const std::vector<FreqIndex>& window,
                                                    const QuadratureConfig& cfg) {
  BiorthogonalityReport rep;
  rep.window = window;
  const size_t W = window.size();
  rep.entries.assign(W * W, Complex(0, 0));
  rep.deviations.assign(W * W, 0.0);
  rep.stabilized.assign(W * W, 1);
  if (W == 0) return rep;
  for (const auto& idx : window)
    if (!omega_contains(dual.pattern(), idx))
      throw PatternMismatch("window index (" + std::to_string(idx.k) + "," +
                            std::to_string(idx.m) + ") is excluded by pattern " +
                            dual.pattern().name());

  int Bk = 0, Bm = 0;
  for (const auto& idx : window) {
    Bk = std::max(Bk, std::abs(idx.k));
    Bm = std::max(Bm, std::abs(idx.m));
  }
  const bool point_form = dual.form() == DualSystem::Form::PointForm;
  const int pat_nu = point_form ? dual.pattern().nu() : 0;
  const int pat_mu = point_form ? dual.pattern().mu() : 0;
  const int A = 2 * Bk + std::abs(pat_nu);  // x-frequency range needed
  const int B = 2 * Bm + std::abs(pat_mu);  // y-frequency range needed

  const Weight& w = dual.weight();
  const int ny = cfg.n_2d;
  const double dy = kTwoPi / ny;

  // distinct column k-indices that need a phase transform
  std::vector<int> phase_ks;
  if (dual.form() == DualSystem::Form::ColumnForm ||
      dual.form() == DualSystem::Form::Column0Form) {
    for (const auto& idx : window)
      if (!(dual.form() == DualSystem::Form::Column0Form && idx.k == 0 && idx.m == 0))
        if (std::find(phase_ks.begin(), phase_ks.end(), idx.k) == phase_ks.end())
          phase_ks.push_back(idx.k);
    std::sort(phase_ks.begin(), phase_ks.end());
  }
  const bool need_q = dual.form() == DualSystem::Form::Column0Form;

  // y tables: e^{i b y_r} and conj(P^k(y_r)), conj(Q(y_r))
  std::vector<std::vector<Complex>> Eb(2 * B + 1, std::vector<Complex>(ny));
  for (int b = -B; b <= B; ++b)
    for (int r = 0; r < ny; ++r) Eb[b + B][r] = std::polar(1.0, b * (kTwoPi * r / ny));
  std::vector<std::vector<Complex>> conjPk(phase_ks.size(), std::vector<Complex>(ny));
  for (size_t pi = 0; pi < phase_ks.size(); ++pi)
    for (int r = 0; r < ny; ++r)
      conjPk[pi][r] = std::conj(dual.phase()->power(kTwoPi * r / ny, phase_ks[pi]));
  std::vector<Complex> conjQ;
  if (need_q) {
    conjQ.resize(ny);
    for (int r = 0; r < ny; ++r) conjQ[r] = std::conj(dual.phase_q()->eval(kTwoPi * r / ny));
  }

  const detail::XNodeLevels levels = detail::x_levels_for_weight(w, cfg);
  const size_t L = levels.x.size();

  const int nA = 2 * A + 1, nB = 2 * B + 1;
  // per-level transforms: X1[a][b], XP[phase_k][a][b] (a restricted to row ks), XQ[a][b]
  std::vector<int> row_ks;
  for (const auto& idx : window)
    if (std::find(row_ks.begin(), row_ks.end(), idx.k) == row_ks.end()) row_ks.push_back(idx.k);
  std::sort(row_ks.begin(), row_ks.end());
  auto row_k_pos = [&](int k) {
    return static_cast<size_t>(std::lower_bound(row_ks.begin(), row_ks.end(), k) - row_ks.begin());
  };

  std::vector<std::vector<Complex>> X1(L), XQ(L);
  std::vector<std::vector<Complex>> XP(L);  // [level][ (pi * row_ks + kpos) * nB + b ]
  detail::parallel_for(static_cast<int>(L), [&](int li) {
    std::vector<Complex> x1(static_cast<size_t>(nA) * nB, Complex(0, 0));
    std::vector<Complex> xp(phase_ks.size() * row_ks.size() * nB, Complex(0, 0));
    std::vector<Complex> xq(need_q ? row_ks.size() * nB : 0, Complex(0, 0));
    std::vector<Complex> Sy(nB), Ty(nB), row(ny), rc(ny);
    for (size_t qi = 0; qi < levels.x[li].size(); ++qi) {
      const double x = levels.x[li][qi];
      const double wx = levels.w[li][qi];
      for (int r = 0; r < ny; ++r) {
        const double Mv = w.eval(x, kTwoPi * r / ny);
        row[r] = Complex(Mv, 0.0) / std::conj(Complex(Mv, 0.0));
      }
      for (int b = 0; b < nB; ++b) {
        Complex s(0, 0);
        const auto& e = Eb[b];
        for (int r = 0; r < ny; ++r) s += row[r] * e[r];
        Sy[b] = s * dy;
      }
      // x-phase powers e^{iax}
      std::vector<Complex> ph(nA);
      const Complex ex = std::polar(1.0, x);
      ph[A] = Complex(1, 0);
      for (int a = 1; a <= A; ++a) {
        ph[A + a] = ph[A + a - 1] * ex;
        ph[A - a] = std::conj(ph[A + a]);
      }
      for (int a = 0; a < nA; ++a) {
        const Complex f = wx * ph[a];
        for (int b = 0; b < nB; ++b) x1[static_cast<size_t>(a) * nB + b] += f * Sy[b];
      }
      for (size_t pi = 0; pi < phase_ks.size(); ++pi) {
        for (int r = 0; r < ny; ++r) rc[r] = row[r] * conjPk[pi][r];
        for (int b = 0; b < nB; ++b) {
          Complex s(0, 0);
          const auto& e = Eb[b];
          for (int r = 0; r < ny; ++r) s += rc[r] * e[r];
          Ty[b] = s * dy;
        }
        for (size_t kpos = 0; kpos < row_ks.size(); ++kpos) {
          const Complex f = wx * ph[A + row_ks[kpos]];
          for (int b = 0; b < nB; ++b)
            xp[(pi * row_ks.size() + kpos) * nB + b] += f * Ty[b];
        }
      }
      if (need_q) {
        for (int r = 0; r < ny; ++r) rc[r] = row[r] * conjQ[r];
        for (int b = 0; b < nB; ++b) {
          Complex s(0, 0);
          const auto& e = Eb[b];
          for (int r = 0; r < ny; ++r) s += rc[r] * e[r];
          Ty[b] = s * dy;
        }
        for (size_t kpos = 0; kpos < row_ks.size(); ++kpos) {
          const Complex f = wx * ph[A + row_ks[kpos]];
          for (int b = 0; b < nB; ++b) xq[kpos * nB + b] += f * Ty[b];
        }
      }
    }
    X1[li] = std::move(x1);
    XP[li] = std::move(xp);
    XQ[li] = std::move(xq);
  });

  auto phase_k_pos = [&](int k) {
    return static_cast<size_t>(std::lower_bound(phase_ks.begin(), phase_ks.end(), k) -
                               phase_ks.begin());
  };

  const double norm = 1.0 / (kTwoPi * kTwoPi);
  std::vector<Complex> inc(L);
  for (size_t rI = 0; rI < W; ++rI) {
    const int k = window[rI].k, m = window[rI].m;
    for (size_t cI = 0; cI < W; ++cI) {
      const int j = window[cI].k, l = window[cI].m;
      for (size_t li = 0; li < L; ++li) {
        const Complex direct = X1[li][static_cast<size_t>(k - j + A) * nB + (m - l + B)];
        Complex corr(0, 0);
        switch (dual.form()) {
          case DualSystem::Form::Plain:
            break;
          case DualSystem::Form::PointForm:
            corr = std::polar(1.0, -(j - pat_nu) * dual.witness_x0() -
                                       (l - pat_mu) * dual.witness_y0()) *
                   X1[li][static_cast<size_t>(k - pat_nu + A) * nB + (m - pat_mu + B)];
            break;
          case DualSystem::Form::ColumnForm:
            corr = XP[li][(phase_k_pos(j) * row_ks.size() + row_k_pos(k)) * nB + (m - l + B)];
            break;
          case DualSystem::Form::Column0Form:
            if (j == 0 && l == 0)
              corr = XQ[li][row_k_pos(k) * nB + (m + B)];
            else
              corr = XP[li][(phase_k_pos(j) * row_ks.size() + row_k_pos(k)) * nB + (m - l + B)];
            break;
        }
        inc[li] = norm * (direct - corr);
      }
      const auto [value, ok] = detail::stabilize_complex(inc, cfg.tol);
      const size_t e = rI * W + cI;
      rep.entries[e] = value;
      rep.stabilized[e] = ok ? 1 : 0;
      if (!ok) ++rep.unstabilized_count;
      const double target = (window[rI] == window[cI]) ? 1.0 : 0.0;
      rep.deviations[e] = std::abs(value - target);
      rep.max_dev = std::max(rep.max_dev, rep.deviations[e]);
    }
  }
  return rep;
}

/// Residual of the shift identity tying consecutive dual numerators:
///   e^{inx} e^{imy} (e^{ix} - P(y))
///     = conj(M) xi_{n+1,m} - P(y) conj(M) xi_{n,m}   (up to the (2pi)^-2
/// normalisation of the xi). Pure algebra, so the residual at points off
/// the singular set is roundoff-sized.
inline double verify_recurrence(const Weight& w, const PhaseFunction& P, const DualSystem& dual,
                                const std::vector<std::pair<double, double>>& points, int n_lo,
                                int n_hi, int m_lo, int m_hi) {
  double max_res = 0.0;
  const double four_pi_sq = kTwoPi * kTwoPi;
  for (const auto& [x, y] : points) {
    const Complex Mbar = std::conj(Complex(w.eval(x, y), 0.0));
    const Complex Py = P.eval(y);
    for (int n = n_lo; n <= n_hi; ++n)
      for (int m = m_lo; m <= m_hi; ++m) {
        const Complex lhs =
            std::polar(1.0, n * x + m * y) * (std::polar(1.0, x) - Py);
        const Complex rhs = four_pi_sq * (Mbar * dual.eval_formula(n + 1, m, x, y) -
                                          Py * Mbar * dual.eval_formula(n, m, x, y));
        max_res = std::max(max_res, std::abs(lhs - rhs));
      }
  }
  return max_res;
}

/// Uniform random sample points keeping a guard distance from the
/// weight's singular set.
inline std::vector<std::pair<double, double>> sample_points_off_singular(
    const Weight& w, int count, unsigned seed, double guard = 1e-3) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(count);
  const SingularSet& s = w.singular_set();
  while (static_cast<int>(pts.size()) < count) {
    const double x = uni(rng), y = uni(rng);
    if (s.kind == SingularSet::Kind::LineX && torus_dist(x, s.x0) < guard) continue;
    if (s.kind == SingularSet::Kind::Point &&
        std::max(torus_dist(x, s.x0), torus_dist(y, s.y0)) < guard)
      continue;
    pts.emplace_back(x, y);
  }
  return pts;
}

/// CSV export: k,m,j,l,re,im,deviation in window order.
inline void write_biorthogonality_csv(const BiorthogonalityReport& rep, std::ostream& os) {
  os << "k,m,j,l,re,im,deviation\n";
  os << std::setprecision(17);
  const size_t W = rep.window.size();
  for (size_t r = 0; r < W; ++r)
    for (size_t c = 0; c < W; ++c) {
      const Complex& v = rep.entries[r * W + c];
      os << rep.window[r].k << ',' << rep.window[r].m << ',' << rep.window[c].k << ','
         << rep.window[c].m << ',' << v.real() << ',' << v.imag() << ','
         << rep.deviations[r * W + c] << '\n';
    }
}

inline void write_biorthogonality_csv(const BiorthogonalityReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CSV: " + path);
  write_biorthogonality_csv(rep, out);
}

}  // namespace gfs2d
