#pragma once

// Subcommand implementations behind the gfs2d command-line tool. Each
// command takes a parsed option struct, writes its JSON report (and any
// CSV artifacts) and returns the process exit code:
//   0 success, 2 usage error, 3 verdict-blocked, 4 a required condition
//   came back Inconclusive.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gfs2d/classifier.hpp"
#include "gfs2d/core.hpp"
#include "gfs2d/dual.hpp"
#include "gfs2d/gfs.hpp"
#include "gfs2d/quadrature.hpp"
#include "gfs2d/report.hpp"
#include "gfs2d/weights.hpp"

namespace gfs2d::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBlocked = 3;
inline constexpr int kExitInconclusive = 4;

struct Options {
  // weight
  std::string weight = "examplex";  // examplex | examplesum | const1 | csv
  double x0 = 0.0;
  double y0 = 0.0;
  double alpha = 1.0;
  double const_value = 1.0;
  std::string weight_csv;

  // space / pattern
  double p = 2.0;
  std::string pattern = "column";  // point | column | column0
  int nu = 0;
  int mu = 0;

  // quadrature overrides
  int grid = 1024;
  int j_min = 3;
  int j_max = 14;
  double rho = 1.5;
  double tol = 1e-8;

  // phases (column minimality certificates): "const:<x0>" | "firstharmonic"
  std::string phase;
  std::string q_phase;

  // dual / gfs
  int window = 5;
  bool force = false;
  std::string span;        // "k,m,re[,im];..."
  std::string input_csv;   // tabulated g
  std::string n_list = "1,2,3,4";

  // sweep
  std::string alphas = "0.25,0.5,1.0,1.49,1.6";
  std::string ps;  // empty: use p

  // output
  std::string out_prefix = "gfs2d_out";
  std::string json_path = "-";  // "-" = stdout
};

namespace detail_cli {

inline Weight make_weight(const Options& o) {
  if (o.weight == "examplex") return Weight::example_x(o.x0, o.alpha);
  if (o.weight == "examplesum") return Weight::example_sum(o.x0, o.y0, o.alpha);
  if (o.weight == "const1") return Weight::constant(1.0);
  if (o.weight == "constant") return Weight::constant(o.const_value);
  if (o.weight == "csv") return Weight::from_csv(o.weight_csv);
  throw std::invalid_argument("unknown weight family: " + o.weight);
}

inline ExclusionPattern make_pattern(const Options& o) {
  if (o.pattern == "point") return ExclusionPattern::point(o.nu, o.mu);
  if (o.pattern == "column") return ExclusionPattern::column_z();
  if (o.pattern == "column0") return ExclusionPattern::column_z0();
  throw std::invalid_argument("unknown pattern: " + o.pattern + " (point|column|column0)");
}

inline QuadratureConfig make_config(const Options& o) {
  QuadratureConfig cfg;
  cfg = cfg.with_grid(o.grid);
  cfg.j_min = o.j_min;
  cfg.j_max = o.j_max;
  cfg.rho = o.rho;
  cfg.tol = o.tol;
  if (cfg.j_min >= cfg.j_max || cfg.rho <= 1.0 || cfg.tol <= 0.0)
    throw std::invalid_argument("quadrature config requires j_min < j_max, rho > 1, tol > 0");
  return cfg;
}

inline std::optional<PhaseFunction> parse_phase(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  if (spec == "firstharmonic") return PhaseFunction::first_harmonic();
  if (spec.rfind("const:", 0) == 0)
    return PhaseFunction::constant_unimodular(std::stod(spec.substr(6)));
  throw std::invalid_argument("unknown phase spec: " + spec + " (const:<x0>|firstharmonic)");
}

inline TrigPolynomial parse_span(const std::string& spec) {
  TrigPolynomial poly;
  std::istringstream ss(spec);
  std::string term;
  while (std::getline(ss, term, ';')) {
    if (term.empty()) continue;
    std::istringstream ts(term);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ts, cell, ',')) nums.push_back(std::stod(cell));
    if (nums.size() != 3 && nums.size() != 4)
      throw std::invalid_argument("span term needs k,m,re[,im]: " + term);
    poly.indices.push_back({static_cast<int>(nums[0]), static_cast<int>(nums[1])});
    poly.coeffs.emplace_back(nums[2], nums.size() == 4 ? nums[3] : 0.0);
  }
  return poly;
}

inline std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::istringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(std::stoi(cell));
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& spec) {
  std::vector<double> out;
  std::istringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(std::stod(cell));
  }
  return out;
}

inline Json args_echo(const Options& o, const std::string& command) {
  Json j{{"weight", o.weight}, {"p", o.p}, {"pattern", o.pattern}};
  if (o.weight == "examplex" || o.weight == "examplesum") {
    j["x0"] = o.x0;
    j["alpha"] = o.alpha;
  }
  if (o.weight == "examplesum") j["y0"] = o.y0;
  if (o.weight == "csv") j["weight_csv"] = o.weight_csv;
  if (o.pattern == "point") {
    j["nu"] = o.nu;
    j["mu"] = o.mu;
  }
  if (!o.phase.empty()) j["phase"] = o.phase;
  if (!o.q_phase.empty()) j["q_phase"] = o.q_phase;
  if (command == "dual" || command == "coeffs" || command == "reconstruct")
    j["window"] = o.window;
  if (command == "coeffs" || command == "reconstruct") {
    if (!o.span.empty()) j["span"] = o.span;
    if (!o.input_csv.empty()) j["input_csv"] = o.input_csv;
  }
  if (command == "reconstruct") j["n_list"] = o.n_list;
  if (command == "sweep") j["alphas"] = o.alphas;
  return j;
}

inline void emit(const Json& report, const Options& o) {
  if (o.json_path == "-") {
    std::cout << report.dump(2) << std::endl;
  } else {
    std::ofstream out(o.json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write JSON report: " + o.json_path);
    out << report.dump(2) << '\n';
  }
}

inline Verdict classify(const Weight& w, const LebesgueExponent& exp,
                        const ExclusionPattern& pattern, const QuadratureConfig& cfg,
                        const std::optional<PhaseFunction>& P,
                        const std::optional<PhaseFunction>& Q) {
  switch (pattern.kind()) {
    case ExclusionPattern::Kind::Point:
      return classify_point_case(w, exp, pattern.nu(), pattern.mu(), cfg);
    case ExclusionPattern::Kind::ColumnZ:
      return classify_column_case(w, exp, cfg, P);
    case ExclusionPattern::Kind::ColumnZ0:
      return classify_column0_case(w, exp, cfg, P, Q);
  }
  throw std::logic_error("unreachable pattern kind");
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

}  // namespace detail_cli

inline int cmd_classify(const Options& o) {
  using namespace detail_cli;
  const Timer timer;
  const Weight w = make_weight(o);
  const LebesgueExponent exp(o.p);
  const ExclusionPattern pattern = make_pattern(o);
  const QuadratureConfig cfg = make_config(o);
  const Verdict verdict =
      classify(w, exp, pattern, cfg, parse_phase(o.phase), parse_phase(o.q_phase));

  Json report = make_report("classify", args_echo(o, "classify"), cfg);
  report["weight"] = w.describe();
  report["verdict"] = to_json(verdict);
  report["timings_ms"] = Json{{"total", timer.ms()}};
  emit(report, o);
  return verdict.has_required_inconclusive() ? kExitInconclusive : kExitOk;
}

inline int cmd_dual(const Options& o) {
  using namespace detail_cli;
  const Timer timer;
  const Weight w = make_weight(o);
  const LebesgueExponent exp(o.p);
  const ExclusionPattern pattern = make_pattern(o);
  const QuadratureConfig cfg = make_config(o);
  const std::optional<PhaseFunction> P = parse_phase(o.phase);
  const std::optional<PhaseFunction> Q = parse_phase(o.q_phase);
  const Verdict verdict = classify(w, exp, pattern, cfg, P, Q);

  Json report = make_report("dual", args_echo(o, "dual"), cfg);
  report["weight"] = w.describe();
  report["verdict"] = to_json(verdict);

  if (pattern.kind() == ExclusionPattern::Kind::ColumnZ0 && verdict.minimal != Tristate::Yes &&
      !(P && Q) && !o.force) {
    report["error"] =
        "pattern column0 needs a caller-supplied phase pair to certify minimality: "
        "pass --phase and --q-phase (both zero-mean, e.g. firstharmonic)";
    report["timings_ms"] = Json{{"total", timer.ms()}};
    emit(report, o);
    return kExitBlocked;
  }
  if (verdict.minimal != Tristate::Yes && !o.force) {
    report["error"] = "system is not certified minimal; use --force for negative controls";
    report["timings_ms"] = Json{{"total", timer.ms()}};
    emit(report, o);
    return kExitBlocked;
  }

  std::optional<MinimalityWitness> witness = verdict.witness;
  if (P && pattern.kind() == ExclusionPattern::Kind::ColumnZ)
    witness = MinimalityWitness::phase(*P);
  if (P && Q && pattern.kind() == ExclusionPattern::Kind::ColumnZ0)
    witness = MinimalityWitness::phase_pair(*P, *Q);

  DualSystem dual = [&] {
    if (o.force && verdict.minimal != Tristate::Yes) {
      // negative control: construct the requested form without the gate
      if (witness && witness->kind == MinimalityWitness::Kind::Phase)
        return DualSystem::column_form(pattern, w, *witness->P);
      if (witness && witness->kind == MinimalityWitness::Kind::PhasePair)
        return DualSystem::column0_form(pattern, w, *witness->P, *witness->Q);
      if (witness && witness->kind == MinimalityWitness::Kind::Point)
        return DualSystem::point_form(pattern, w, witness->x0, witness->y0);
      return DualSystem::plain(pattern, w);
    }
    return build_dual(pattern, w, exp, witness, cfg, verdict);
  }();

  const std::vector<FreqIndex> window = enumerate_window(pattern, o.window);
  const BiorthogonalityReport biorth = verify_biorthogonality(dual, window, cfg);
  const std::string csv_path = o.out_prefix + "_biorth.csv";
  write_biorthogonality_csv(biorth, csv_path);

  report["dual"] = Json{{"form", dual.form_name()},
                        {"window_radius", o.window},
                        {"window_size", biorth.window.size()},
                        {"max_dev", biorth.max_dev},
                        {"unstabilized_entries", biorth.unstabilized_count},
                        {"csv", csv_path}};
  report["timings_ms"] = Json{{"total", timer.ms()}};
  emit(report, o);
  if (biorth.unstabilized_count > 0) return kExitInconclusive;
  return kExitOk;
}

namespace detail_cli {

struct PreparedInput {
  Field2D g;
  bool certified_span = false;
  TrigPolynomial poly;
};

inline PreparedInput make_input(const Options& o, const Weight& w) {
  PreparedInput in;
  if (!o.span.empty()) {
    in.poly = parse_span(o.span);
    in.certified_span = true;
    const TrigPolynomial poly = in.poly;
    in.g = [w, poly](double x, double y) {
      return Complex(w.eval(x, y), 0.0) * poly.eval(x, y);
    };
    return in;
  }
  if (!o.input_csv.empty()) {
    const Weight table = Weight::from_csv(o.input_csv);  // same CSV layout as weights
    in.g = [table](double x, double y) { return Complex(table.eval(x, y), 0.0); };
    return in;
  }
  // empty span: the zero function
  in.certified_span = true;
  in.g = [](double, double) { return Complex(0, 0); };
  return in;
}

inline int run_dual_pipeline(const Options& o, const std::string& command,
                             const std::function<int(const Weight&, const LebesgueExponent&,
                                                     const ExclusionPattern&,
                                                     const QuadratureConfig&, const DualSystem&,
                                                     Json&)>& body) {
  const Timer timer;
  const Weight w = make_weight(o);
  const LebesgueExponent exp(o.p);
  const ExclusionPattern pattern = make_pattern(o);
  const QuadratureConfig cfg = make_config(o);
  const std::optional<PhaseFunction> P = parse_phase(o.phase);
  const std::optional<PhaseFunction> Q = parse_phase(o.q_phase);
  const Verdict verdict = classify(w, exp, pattern, cfg, P, Q);

  Json report = make_report(command, args_echo(o, command), cfg);
  report["weight"] = w.describe();
  report["verdict"] = to_json(verdict);

  if (verdict.minimal != Tristate::Yes && !o.force) {
    report["error"] = "system is not certified minimal; coefficients need a certified dual";
    report["timings_ms"] = Json{{"total", timer.ms()}};
    emit(report, o);
    return kExitBlocked;
  }

  std::optional<MinimalityWitness> witness = verdict.witness;
  if (P && pattern.kind() == ExclusionPattern::Kind::ColumnZ)
    witness = MinimalityWitness::phase(*P);
  if (P && Q && pattern.kind() == ExclusionPattern::Kind::ColumnZ0)
    witness = MinimalityWitness::phase_pair(*P, *Q);
  const DualSystem dual = [&] {
    if (o.force && verdict.minimal != Tristate::Yes) {
      if (witness && witness->kind == MinimalityWitness::Kind::Phase)
        return DualSystem::column_form(pattern, w, *witness->P);
      if (witness && witness->kind == MinimalityWitness::Kind::PhasePair)
        return DualSystem::column0_form(pattern, w, *witness->P, *witness->Q);
      if (witness && witness->kind == MinimalityWitness::Kind::Point)
        return DualSystem::point_form(pattern, w, witness->x0, witness->y0);
      return DualSystem::plain(pattern, w);
    }
    return build_dual(pattern, w, exp, witness, cfg, verdict);
  }();

  const int code = body(w, exp, pattern, cfg, dual, report);
  report["timings_ms"] = Json{{"total", timer.ms()}};
  emit(report, o);
  return code;
}

}  // namespace detail_cli

inline int cmd_coeffs(const Options& o) {
  using namespace detail_cli;
  return run_dual_pipeline(o, "coeffs",
                           [&](const Weight& w, const LebesgueExponent&, const ExclusionPattern& pattern,
                               const QuadratureConfig& cfg, const DualSystem& dual, Json& report) {
                             const PreparedInput in = make_input(o, w);
                             // no input at all: an empty table, not a zero-filled one
                             const std::vector<FreqIndex> window =
                                 (o.span.empty() && o.input_csv.empty())
                                     ? std::vector<FreqIndex>{}
                                     : enumerate_window(pattern, o.window);
                             const CoefficientTable table =
                                 gfs_coefficients(in.g, dual, window, cfg);
                             const std::string csv_path = o.out_prefix + "_coeffs.csv";
                             write_coefficients_csv(table, csv_path);
                             int flagged = 0;
                             for (char f : table.flagged) flagged += f;
                             report["coefficients"] = Json{{"window_radius", o.window},
                                                           {"entries", table.window.size()},
                                                           {"flagged", flagged},
                                                           {"experimental", !in.certified_span},
                                                           {"csv", csv_path}};
                             return flagged > 0 ? kExitInconclusive : kExitOk;
                           });
}

inline int cmd_reconstruct(const Options& o) {
  using namespace detail_cli;
  return run_dual_pipeline(
      o, "reconstruct",
      [&](const Weight& w, const LebesgueExponent& exp, const ExclusionPattern& pattern,
          const QuadratureConfig& cfg, const DualSystem& dual, Json& report) {
        const PreparedInput in = make_input(o, w);
        const std::vector<FreqIndex> window = enumerate_window(pattern, o.window);
        const CoefficientTable table = gfs_coefficients(in.g, dual, window, cfg);
        const std::vector<int> truncations = parse_int_list(o.n_list);
        const ReconstructionResult rec = reconstruction_error(
            in.g, dual, exp.p(), truncations, table, cfg, in.certified_span);
        const std::string csv_path = o.out_prefix + "_reconstruct.csv";
        {
          std::ofstream out(csv_path, std::ios::binary);
          if (!out) throw std::runtime_error("cannot write CSV: " + csv_path);
          out << "N,error\n" << std::setprecision(17);
          for (size_t i = 0; i < rec.truncations.size(); ++i)
            out << rec.truncations[i] << ',' << rec.errors[i] << '\n';
        }
        Json errs = Json::array();
        for (size_t i = 0; i < rec.truncations.size(); ++i)
          errs.push_back(Json{{"N", rec.truncations[i]}, {"error", rec.errors[i]}});
        report["reconstruction"] =
            Json{{"errors", std::move(errs)}, {"experimental", rec.experimental}, {"csv", csv_path}};
        return kExitOk;
      });
}

inline int cmd_sweep(const Options& o) {
  using namespace detail_cli;
  const Timer timer;
  const QuadratureConfig cfg = make_config(o);
  const std::vector<double> alphas = parse_double_list(o.alphas);
  const std::vector<double> ps = o.ps.empty() ? std::vector<double>{o.p} : parse_double_list(o.ps);
  if (alphas.empty() || ps.empty()) throw std::invalid_argument("sweep needs alpha and p grids");

  // family decides the natural pattern unless one was forced
  const std::string pattern_name =
      !o.pattern.empty() ? o.pattern : std::string(o.weight == "examplesum" ? "point" : "column");

  Json rows = Json::array();
  std::ostringstream csv;
  csv << "family,p,alpha,pattern,complete,minimal,m_basis,published_band,derived_complete_minimal,"
         "disagreement\n";
  csv << std::setprecision(17);

  for (double p : ps) {
    const LebesgueExponent exp(p);
    for (double alpha : alphas) {
      Options local = o;
      local.alpha = alpha;
      local.p = p;
      local.pattern = pattern_name;
      const Weight w = make_weight(local);
      const ExclusionPattern pattern = make_pattern(local);
      const Verdict verdict =
          classify(w, exp, pattern, cfg, parse_phase(o.phase), parse_phase(o.q_phase));

      // the published admissible band for both example families
      const double lo = 1.0 / exp.conj();
      const double hi = 1.0 + 1.0 / exp.conj();
      const bool published_band = (alpha >= lo && alpha < hi) &&
                              (w.kind() == Weight::Kind::ExampleX ||
                               w.kind() == Weight::Kind::ExampleSum);
      const Tristate derived_cm = tri_and(verdict.complete, verdict.minimal);
      const bool derived_yes = derived_cm == Tristate::Yes;
      const bool disagreement = published_band != derived_yes;

      csv << o.weight << ',' << p << ',' << alpha << ',' << pattern.name() << ','
          << to_string(verdict.complete) << ',' << to_string(verdict.minimal) << ','
          << to_string(verdict.m_basis) << ',' << (published_band ? 1 : 0) << ','
          << to_string(derived_cm) << ',' << (disagreement ? 1 : 0) << '\n';

      Json row{{"family", o.weight},
               {"p", p},
               {"alpha", alpha},
               {"pattern", pattern.name()},
               {"published_band", published_band},
               {"derived_complete_minimal", to_string(derived_cm)},
               {"disagreement", disagreement},
               {"verdict", to_json(verdict)}};
      rows.push_back(std::move(row));
    }
  }

  const std::string csv_path = o.out_prefix + "_sweep.csv";
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV: " + csv_path);
    out << csv.str();
  }

  Json report = make_report("sweep", args_echo(o, "sweep"), cfg);
  report["rows"] = std::move(rows);
  report["csv"] = csv_path;
  report["timings_ms"] = Json{{"total", timer.ms()}};
  emit(report, o);
  return kExitOk;
}

}  // namespace gfs2d::cli
