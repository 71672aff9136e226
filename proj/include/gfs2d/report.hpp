#pragma once

// JSON report assembly. Reports are versioned ("schema": 1) and
// deterministic for identical inputs apart from the timings block; the
// evidence entries carry the full exclusion-level integral ladders so a
// divergence call can be audited from the report alone.

#include <json.hpp>

#include <string>

#include "gfs2d/classifier.hpp"
#include "gfs2d/core.hpp"
#include "gfs2d/dual.hpp"
#include "gfs2d/quadrature.hpp"

namespace gfs2d {

using Json = nlohmann::json;

inline Json to_json(const QuadratureConfig& cfg) {
  return Json{{"n_1d", cfg.n_1d}, {"n_2d", cfg.n_2d}, {"j_min", cfg.j_min},
              {"j_max", cfg.j_max}, {"rho", cfg.rho},  {"tol", cfg.tol}};
}

inline Json to_json(const ImproperVerdict& v) {
  Json j;
  switch (v.status) {
    case ImproperVerdict::Status::Convergent:
      j["status"] = "convergent";
      j["value"] = v.value;
      j["err_estimate"] = v.err_estimate;
      break;
    case ImproperVerdict::Status::Divergent:
      j["status"] = "divergent";
      j["growth"] = v.growth;
      break;
    case ImproperVerdict::Status::Inconclusive:
      j["status"] = "inconclusive";
      j["confidence"] = v.confidence;
      break;
  }
  j["levels"] = v.levels;
  j["j_min"] = v.j_min;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline Json to_json(const MinimalityWitness& w) {
  Json j;
  switch (w.kind) {
    case MinimalityWitness::Kind::Point:
      j["kind"] = "point";
      j["x0"] = w.x0;
      j["y0"] = w.y0;
      break;
    case MinimalityWitness::Kind::Phase:
      j["kind"] = "phase";
      j["P"] = w.P->describe();
      break;
    case MinimalityWitness::Kind::PhasePair:
      j["kind"] = "phase_pair";
      j["P"] = w.P->describe();
      j["Q"] = w.Q->describe();
      break;
  }
  return j;
}

inline Json to_json(const Verdict& v) {
  Json evidence = Json::array();
  for (const auto& e : v.evidence) {
    Json item{{"name", e.name}, {"required", e.required}};
    if (!e.note.empty()) item["note"] = e.note;
    if (e.integral) item["integral"] = to_json(*e.integral);
    evidence.push_back(std::move(item));
  }
  Json j{{"pattern", v.pattern.name()},
         {"p", v.p},
         {"complete", to_string(v.complete)},
         {"minimal", to_string(v.minimal)},
         {"m_basis", to_string(v.m_basis)},
         {"contradiction", v.contradiction_flag},
         {"evidence", std::move(evidence)}};
  if (v.witness) j["witness"] = to_json(*v.witness);
  return j;
}

/// Envelope shared by every subcommand report.
inline Json make_report(const std::string& command, Json args_echo, const QuadratureConfig& cfg) {
  return Json{{"schema", 1},
              {"tool", "gfs2d"},
              {"version", kVersion},
              {"command", command},
              {"args", std::move(args_echo)},
              {"config", to_json(cfg)}};
}

}  // namespace gfs2d
