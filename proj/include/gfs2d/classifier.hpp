#pragma once

// Completeness / minimality / M-basis classification of the weighted
// system {M e^{ikx} e^{imy} : (k,m) in Omega} for the three supported
// exclusion patterns. Every decision is backed by classified improper
// integrals; Inconclusive quadrature always propagates to Unknown.

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gfs2d/core.hpp"
#include "gfs2d/quadrature.hpp"
#include "gfs2d/weights.hpp"

namespace gfs2d {

struct InvalidPhase : std::runtime_error {
  explicit InvalidPhase(const std::string& what) : std::runtime_error(what) {}
};

enum class Tristate { Yes, No, Unknown };

inline const char* to_string(Tristate t) {
  switch (t) {
    case Tristate::Yes: return "yes";
    case Tristate::No: return "no";
    case Tristate::Unknown: return "unknown";
  }
  return "?";
}

inline Tristate tri_and(Tristate a, Tristate b) {
  if (a == Tristate::No || b == Tristate::No) return Tristate::No;
  if (a == Tristate::Yes && b == Tristate::Yes) return Tristate::Yes;
  return Tristate::Unknown;
}

inline Tristate tri_from_verdict(const ImproperVerdict& v, bool divergent_means_yes) {
  if (v.inconclusive()) return Tristate::Unknown;
  const bool hit = divergent_means_yes ? v.divergent() : v.convergent();
  return hit ? Tristate::Yes : Tristate::No;
}

struct MinimalityWitness {
  enum class Kind { Point, Phase, PhasePair };
  Kind kind = Kind::Point;
  double x0 = 0.0;  // Point
  double y0 = 0.0;
  std::optional<PhaseFunction> P;  // Phase / PhasePair
  std::optional<PhaseFunction> Q;  // PhasePair

  static MinimalityWitness point(double x0, double y0) {
    MinimalityWitness w;
    w.kind = Kind::Point;
    w.x0 = wrap_angle(x0);
    w.y0 = wrap_angle(y0);
    return w;
  }
  static MinimalityWitness phase(PhaseFunction P) {
    MinimalityWitness w;
    w.kind = Kind::Phase;
    w.P = std::move(P);
    return w;
  }
  static MinimalityWitness phase_pair(PhaseFunction P, PhaseFunction Q) {
    MinimalityWitness w;
    w.kind = Kind::PhasePair;
    w.P = std::move(P);
    w.Q = std::move(Q);
    return w;
  }
};

struct EvidenceItem {
  std::string name;
  std::optional<ImproperVerdict> integral;
  std::string note;
  bool required = true;
};

struct Verdict {
  ExclusionPattern pattern = ExclusionPattern::point(0, 0);
  double p = 2.0;
  Tristate complete = Tristate::Unknown;
  Tristate minimal = Tristate::Unknown;
  Tristate m_basis = Tristate::Unknown;
  std::vector<EvidenceItem> evidence;
  std::optional<MinimalityWitness> witness;
  bool contradiction_flag = false;

  bool has_required_inconclusive() const {
    for (const auto& e : evidence)
      if (e.required && e.integral && e.integral->inconclusive()) return true;
    return false;
  }
};

struct AnnihilatorElement {
  std::vector<Complex> h;  // values on the y grid
  bool zero_mean = false;
};

namespace detail {

/// |M|^-p' together with the singularity metadata (and fast-path power)
/// induced by the weight family.
inline Singularity2D c0_singularity(const Weight& w, double p_conj) {
  switch (w.singular_set().kind) {
    case SingularSet::Kind::LineX:
      if (w.kind() == Weight::Kind::ExampleX)
        return Singularity2D::line_x(w.x0(), w.alpha() * p_conj);
      return Singularity2D::line_x(w.singular_set().x0);
    case SingularSet::Kind::Point:
      if (w.kind() == Weight::Kind::ExampleSum)
        return Singularity2D::point(w.x0(), w.y0(), w.alpha() * p_conj);
      return Singularity2D::point(w.singular_set().x0, w.singular_set().y0);
    case SingularSet::Kind::Empty:
      return Singularity2D::none();
  }
  return Singularity2D::none();
}

}  // namespace detail

/// Condition: the double integral of |M|^-p' is infinite.
inline ImproperVerdict check_c0(const Weight& w, const LebesgueExponent& exp,
                                const QuadratureConfig& cfg) {
  const double pc = exp.conj();
  if (w.kind() == Weight::Kind::Tabulated && w.min_table_value() <= 0.0)
    return ImproperVerdict::make_inconclusive(
        0.3, "tabulated weight touches zero and carries no singularity metadata");
  auto f = [&](double x, double y) { return std::pow(w.eval(x, y), -pc); };
  return classify_improper_2d(f, detail::c0_singularity(w, pc), cfg);
}

struct StrongXResult {
  Tristate verdict = Tristate::Unknown;
  int probes = 0;
  int divergent = 0;
  int convergent = 0;
  int inconclusive = 0;
  std::vector<EvidenceItem> evidence;
};

/// Slice criterion for a strong x-singularity: the x-integral of |M|^-p'
/// must blow up for (almost) every y. Probed on a dense offset grid that
/// skips the measure-zero exceptional projections of the singular set.
inline StrongXResult check_strong_x_singularity(const Weight& w, const LebesgueExponent& exp,
                                                const QuadratureConfig& cfg, int n_probes = 64) {
  StrongXResult res;
  const double pc = exp.conj();
  const SingularSet& sing = w.singular_set();

  if (w.kind() == Weight::Kind::Tabulated && w.min_table_value() <= 0.0) {
    res.verdict = Tristate::Unknown;
    res.evidence.push_back(
        {"strong_x_slices", std::nullopt, "tabulated weight lacks singularity metadata", true});
    return res;
  }

  std::vector<double> probe_ys;
  for (int i = 0; i < n_probes; ++i) {
    const double y = kTwoPi * (i + 0.5) / n_probes;
    if (sing.kind == SingularSet::Kind::Point && torus_dist(y, sing.y0) < 0.01) continue;
    probe_ys.push_back(y);
  }

  std::vector<ImproperVerdict> verdicts(probe_ys.size());
  QuadratureConfig slice_cfg = cfg;
  slice_cfg.n_1d = std::max(256, cfg.n_1d / 4);
  detail::parallel_for(static_cast<int>(probe_ys.size()), [&](int i) {
    const double y = probe_ys[i];
    auto slice = [&](double x) { return std::pow(w.eval(x, y), -pc); };
    verdicts[i] = classify_improper_1d(slice, detail::slice_singularity_in_x(w, y, pc), slice_cfg);
  });

  res.probes = static_cast<int>(probe_ys.size());
  for (const auto& v : verdicts) {
    if (v.divergent()) ++res.divergent;
    else if (v.convergent()) ++res.convergent;
    else ++res.inconclusive;
  }
  if (res.convergent > 0)
    res.verdict = Tristate::No;
  else if (res.divergent == res.probes && res.probes > 0)
    res.verdict = Tristate::Yes;
  else
    res.verdict = Tristate::Unknown;

  std::ostringstream note;
  note << res.divergent << "/" << res.probes << " slices divergent, " << res.convergent
       << " convergent, " << res.inconclusive << " inconclusive";
  EvidenceItem item{"strong_x_slices", std::nullopt, note.str(), true};
  if (!verdicts.empty()) item.integral = verdicts.front();  // representative slice ladder
  res.evidence.push_back(std::move(item));
  return res;
}

namespace detail {

inline Singularity2D xp_singularity(const Weight& w, const PhaseFunction& P, double p_conj) {
  // the |e^{ix} - P(y)| factor lowers the local power only when the phase
  // tracks the singular set
  const SingularSet& s = w.singular_set();
  const bool const_phase = P.kind() == PhaseFunction::Kind::ConstantUnimodular;
  const bool anchored = const_phase && torus_dist(P.x0(), s.x0) < 1e-12;
  switch (s.kind) {
    case SingularSet::Kind::LineX:
      if (w.kind() == Weight::Kind::ExampleX) {
        if (anchored) return Singularity2D::line_x(s.x0, p_conj * (w.alpha() - 1.0));
        if (const_phase) return Singularity2D::line_x(s.x0, p_conj * w.alpha());
        return Singularity2D::line_x(s.x0);
      }
      return Singularity2D::line_x(s.x0);
    case SingularSet::Kind::Point:
      if (w.kind() == Weight::Kind::ExampleSum) {
        if (anchored) return Singularity2D::point(s.x0, s.y0, p_conj * (w.alpha() - 1.0));
        if (const_phase) return Singularity2D::point(s.x0, s.y0, p_conj * w.alpha());
        return Singularity2D::point(s.x0, s.y0);
      }
      return Singularity2D::point(s.x0, s.y0);
    case SingularSet::Kind::Empty:
      return Singularity2D::none();
  }
  return Singularity2D::none();
}

}  // namespace detail

struct XPResult {
  Tristate verdict = Tristate::Unknown;
  ImproperVerdict base;      // |M|^-p' over T^2
  ImproperVerdict weighted;  // |e^{ix}-P|^p' |M|^-p'
};

/// (x,P)-singularity: |M|^-p' non-integrable but integrable once damped by
/// |e^{ix}-P(y)|^p', with P essentially invertible.
inline XPResult check_xP_singularity(const Weight& w, const LebesgueExponent& exp,
                                     const PhaseFunction& P, const QuadratureConfig& cfg) {
  if (!P.upsilon())
    throw InvalidPhase("phase " + P.describe() + " is not essentially invertible");
  XPResult res;
  res.base = check_c0(w, exp, cfg);
  const double pc = exp.conj();
  auto f = [&](double x, double y) {
    const Complex d = std::polar(1.0, x) - P.eval(y);
    return std::pow(std::abs(d), pc) * std::pow(w.eval(x, y), -pc);
  };
  res.weighted = classify_improper_2d(f, detail::xp_singularity(w, P, pc), cfg);
  const Tristate base_div = tri_from_verdict(res.base, true);
  const Tristate weighted_conv = tri_from_verdict(res.weighted, false);
  res.verdict = tri_and(base_div, weighted_conv);
  return res;
}

namespace detail {

inline Singularity2D sin_integrand_singularity(const Weight& w, bool x_factor, double p_conj) {
  // |sin((x-x0)/2)|^p' |M|^-p' (or the y analogue)
  const SingularSet& s = w.singular_set();
  switch (s.kind) {
    case SingularSet::Kind::Point:
      if (w.kind() == Weight::Kind::ExampleSum)
        return Singularity2D::point(s.x0, s.y0, p_conj * (w.alpha() - 1.0));
      return Singularity2D::point(s.x0, s.y0);
    case SingularSet::Kind::LineX:
      if (w.kind() == Weight::Kind::ExampleX)
        return Singularity2D::line_x(
            s.x0, x_factor ? p_conj * (w.alpha() - 1.0) : p_conj * w.alpha());
      return Singularity2D::line_x(s.x0);
    case SingularSet::Kind::Empty:
      return Singularity2D::none();
  }
  return Singularity2D::none();
}

inline std::optional<std::pair<double, double>> point_witness_candidate(const Weight& w) {
  switch (w.singular_set().kind) {
    case SingularSet::Kind::Point:
      return std::make_pair(w.x0(), w.y0());
    case SingularSet::Kind::LineX:
      return std::make_pair(w.x0(), 0.0);
    case SingularSet::Kind::Empty:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

/// Omega^c = {(nu,mu)}: complete iff |M|^-p' blows up; minimal iff either
/// that integral is finite (plain exponential duals) or a witness point
/// (x0,y0) damps it along both coordinates.
inline Verdict classify_point_case(const Weight& w, const LebesgueExponent& exp, int nu, int mu,
                                   const QuadratureConfig& cfg) {
  Verdict verdict;
  verdict.pattern = ExclusionPattern::point(nu, mu);
  verdict.p = exp.p();

  const ModulatedPattern mod = modulate_pattern(verdict.pattern);
  if (mod.phase_nu != 0 || mod.phase_mu != 0)
    verdict.evidence.push_back({"modulation", std::nullopt,
                                "reduced to point(0,0) by the unimodular factor e^{-i" +
                                    std::to_string(mod.phase_nu) + "x} e^{-i" +
                                    std::to_string(mod.phase_mu) + "y}",
                                false});

  const ImproperVerdict c0 = check_c0(w, exp, cfg);
  verdict.complete = tri_from_verdict(c0, true);
  verdict.evidence.push_back({"c0_integral", c0, "double integral of |M|^-p'", true});

  if (c0.convergent()) {
    verdict.minimal = Tristate::Yes;
    verdict.evidence.push_back(
        {"minimal_via_pe", std::nullopt, "finite |M|^-p' integral gives plain duals", false});
  } else if (c0.divergent()) {
    const auto cand = detail::point_witness_candidate(w);
    if (!cand) {
      verdict.minimal = Tristate::Unknown;
      verdict.evidence.push_back(
          {"point_witness", std::nullopt, "no singular-set candidate for a witness point", true});
    } else {
      const double pc = exp.conj();
      const auto [wx, wy] = *cand;
      auto fx = [&, wx = wx](double x, double y) {
        return std::pow(std::fabs(std::sin(0.5 * (x - wx))), pc) * std::pow(w.eval(x, y), -pc);
      };
      auto fy = [&, wy = wy](double x, double y) {
        return std::pow(std::fabs(std::sin(0.5 * (y - wy))), pc) * std::pow(w.eval(x, y), -pc);
      };
      const ImproperVerdict vx =
          classify_improper_2d(fx, detail::sin_integrand_singularity(w, true, pc), cfg);
      const ImproperVerdict vy =
          classify_improper_2d(fy, detail::sin_integrand_singularity(w, false, pc), cfg);
      verdict.evidence.push_back({"sin_x_integral", vx,
                                  "x-damped integral at witness x0=" + std::to_string(wx), true});
      verdict.evidence.push_back({"sin_y_integral", vy,
                                  "y-damped integral at witness y0=" + std::to_string(wy), true});
      verdict.minimal = tri_and(tri_from_verdict(vx, false), tri_from_verdict(vy, false));
      if (verdict.minimal == Tristate::Yes)
        verdict.witness = MinimalityWitness::point(wx, wy);
    }
  } else {
    verdict.minimal = Tristate::Unknown;
  }

  verdict.m_basis = tri_and(verdict.complete, verdict.minimal);
  return verdict;
}

/// Omega^c = {0} x Z: complete iff strong x-singularity; minimal via the
/// finite-integral route or an (x,P)-singularity; both together (and the
/// M-basis property) demand a unimodular phase.
inline Verdict classify_column_case(const Weight& w, const LebesgueExponent& exp,
                                    const QuadratureConfig& cfg,
                                    std::optional<PhaseFunction> caller_phase = std::nullopt) {
  Verdict verdict;
  verdict.pattern = ExclusionPattern::column_z();
  verdict.p = exp.p();

  StrongXResult sx = check_strong_x_singularity(w, exp, cfg);
  verdict.complete = sx.verdict;
  for (auto& e : sx.evidence) verdict.evidence.push_back(std::move(e));

  const ImproperVerdict c0 = check_c0(w, exp, cfg);
  verdict.evidence.push_back({"pe_integral", c0, "double integral of |M|^-p'", true});

  bool phase_unimodular = false;
  if (c0.convergent()) {
    verdict.minimal = Tristate::Yes;
    verdict.evidence.push_back(
        {"minimal_via_pe", std::nullopt, "finite |M|^-p' integral gives plain duals", false});
  } else if (c0.divergent()) {
    std::optional<PhaseFunction> P = caller_phase;
    bool suggested = false;
    if (!P) {
      try {
        P = suggest_phase(w);
        suggested = true;
      } catch (const NoLineSingularity&) {
      }
    }
    if (!P) {
      verdict.minimal = Tristate::Unknown;
      verdict.evidence.push_back(
          {"xP_search", std::nullopt, "no phase candidate available for this weight", true});
    } else {
      const XPResult xp = check_xP_singularity(w, exp, *P, cfg);
      verdict.evidence.push_back(
          {"xP_integral", xp.weighted, "phase-damped integral with P = " + P->describe(), true});
      if (xp.verdict == Tristate::Yes) {
        verdict.minimal = Tristate::Yes;
        verdict.witness = MinimalityWitness::phase(*P);
        const UpsilonCheck uc = check_upsilon(*P);
        phase_unimodular = uc.ess_lo > 1.0 - 1e-9 && uc.ess_hi < 1.0 + 1e-9;
      } else if (xp.verdict == Tristate::No && suggested &&
                 w.kind() == Weight::Kind::ExampleX) {
        // for the line family the suggested constant phase is the only
        // candidate that can damp the singular slab
        verdict.minimal = Tristate::No;
        verdict.evidence.push_back({"xP_exhausted", std::nullopt,
                                    "canonical phase fails; no other phase can track the line",
                                    false});
      } else {
        verdict.minimal = Tristate::Unknown;
        if (xp.verdict == Tristate::No)
          verdict.evidence.push_back({"xP_candidate_failed", std::nullopt,
                                      "supplied phase fails; other phases not excluded", false});
      }
    }
  } else {
    verdict.minimal = Tristate::Unknown;
  }

  verdict.m_basis = tri_and(verdict.complete, verdict.minimal);
  if (verdict.m_basis == Tristate::Yes && verdict.witness &&
      verdict.witness->kind == MinimalityWitness::Kind::Phase && !phase_unimodular) {
    verdict.m_basis = Tristate::Unknown;
    verdict.contradiction_flag = true;
    verdict.evidence.push_back({"unimodularity", std::nullopt,
                                "completeness and minimality both certified but |P| != 1; "
                                "the certificates are mutually inconsistent",
                                true});
  }
  return verdict;
}

/// Omega^c = {0} x (Z\{0}): completeness as in the full-column case, but a
/// complete system here is never minimal; the classifier enforces that
/// structural exclusion and reports contradictory numerics instead of
/// returning an impossible verdict.
inline Verdict classify_column0_case(const Weight& w, const LebesgueExponent& exp,
                                     const QuadratureConfig& cfg,
                                     std::optional<PhaseFunction> caller_P = std::nullopt,
                                     std::optional<PhaseFunction> caller_Q = std::nullopt) {
  Verdict verdict;
  verdict.pattern = ExclusionPattern::column_z0();
  verdict.p = exp.p();

  StrongXResult sx = check_strong_x_singularity(w, exp, cfg);
  verdict.complete = sx.verdict;
  for (auto& e : sx.evidence) verdict.evidence.push_back(std::move(e));

  const ImproperVerdict c0 = check_c0(w, exp, cfg);
  verdict.evidence.push_back({"pe_integral", c0, "double integral of |M|^-p'", true});

  // optional caller-supplied (P,Q) route, evaluated for the audit trail
  Tristate pq_route = Tristate::Unknown;
  if (caller_P && caller_Q) {
    if (!caller_P->upsilon0())
      throw InvalidPhase("P must lie in the zero-mean invertible class for this pattern");
    if (!caller_Q->upsilon0())
      throw InvalidPhase("Q must lie in the zero-mean invertible class for this pattern");
    const XPResult xp = check_xP_singularity(w, exp, *caller_P, cfg);
    const double pc = exp.conj();
    auto fq = [&](double x, double y) {
      return std::pow(std::abs(1.0 - caller_Q->eval(y)), pc) * std::pow(w.eval(x, y), -pc);
    };
    const ImproperVerdict up0 = classify_improper_2d(fq, detail::c0_singularity(w, pc), cfg);
    verdict.evidence.push_back(
        {"xP_integral", xp.weighted, "phase-damped integral with P = " + caller_P->describe(), false});
    verdict.evidence.push_back(
        {"up0_integral", up0, "constant-index integral with Q = " + caller_Q->describe(), false});
    pq_route = tri_and(xp.verdict, tri_from_verdict(up0, false));
  }

  if (c0.convergent()) {
    verdict.minimal = Tristate::Yes;
    verdict.evidence.push_back(
        {"minimal_via_pe", std::nullopt, "finite |M|^-p' integral gives plain duals", false});
  } else if (verdict.complete == Tristate::Yes) {
    verdict.minimal = Tristate::No;
    verdict.evidence.push_back(
        {"structural_exclusion", std::nullopt,
         "a complete system for this pattern cannot be minimal: any zero-mean Q keeps "
         "|1-Q| bounded below on positive measure, so the constant-index integral inherits "
         "the strong x-singularity",
         false});
    if (pq_route == Tristate::Yes) {
      verdict.contradiction_flag = true;
      verdict.evidence.push_back({"contradiction", std::nullopt,
                                  "numerics certified both completeness and a (P,Q) minimality "
                                  "route; these cannot hold together",
                                  true});
    }
  } else if (c0.divergent()) {
    if (caller_P && caller_Q) {
      verdict.minimal = pq_route;
      if (pq_route == Tristate::Yes)
        verdict.witness = MinimalityWitness::phase_pair(*caller_P, *caller_Q);
    } else {
      verdict.minimal = Tristate::Unknown;
      verdict.evidence.push_back({"pq_search", std::nullopt,
                                  "minimality for this pattern needs caller-supplied zero-mean "
                                  "phases P and Q",
                                  false});
    }
  } else {
    verdict.minimal = Tristate::Unknown;
  }

  verdict.m_basis = tri_and(verdict.complete, verdict.minimal);
  return verdict;
}

/// The y-only representative of an annihilator candidate: averages out the
/// x-dependence. Only meaningful for the column patterns.
inline AnnihilatorElement project_annihilator(const std::function<Complex(double, double)>& g,
                                              const ExclusionPattern& pattern,
                                              const TorusGrid& grid, double tol = 1e-10) {
  if (pattern.kind() == ExclusionPattern::Kind::Point)
    throw PatternMismatch("annihilator projection applies to column patterns only");
  AnnihilatorElement out;
  out.h.resize(grid.n_y());
  for (int j = 0; j < grid.n_y(); ++j) {
    const double y = grid.y(j);
    Complex s(0, 0);
    for (int i = 0; i < grid.n_x(); ++i) s += g(grid.x(i), y);
    out.h[j] = s * grid.dx() / kTwoPi;
  }
  Complex mean(0, 0);
  for (const Complex& v : out.h) mean += v;
  mean *= grid.dy();
  out.zero_mean = std::abs(mean) <= tol * (1.0 + std::abs(out.h[0]));
  return out;
}

}  // namespace gfs2d
