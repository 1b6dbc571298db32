#include "ellipselaw/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <vector>

namespace ellipselaw {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& scope) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) {
      const std::string where = scope.empty() ? it.key() : scope + "." + it.key();
      throw ConfigError("config error: unknown key \"" + where + "\"");
    }
  }
}

double require_number(const json& obj, const std::string& key, const std::string& scope) {
  if (!obj.contains(key))
    throw ConfigError("config error: missing key \"" + scope + "." + key + "\"");
  if (!obj[key].is_number())
    throw ConfigError("config error: key \"" + scope + "." + key + "\" must be a number");
  return obj[key].get<double>();
}

std::vector<double> number_array(const json& value, const std::string& where) {
  if (!value.is_array())
    throw ConfigError("config error: key \"" + where + "\" must be an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number())
      throw ConfigError("config error: key \"" + where + "\" must be an array of numbers");
    const double x = v.get<double>();
    if (!std::isfinite(x))
      throw ConfigError("config error: key \"" + where + "\" contains a non-finite value");
    out.push_back(x);
  }
  return out;
}

KernelSpec parse_anisotropy(const json& block) {
  if (!block.is_object()) throw ConfigError("config error: key \"anisotropy\" must be an object");
  reject_unknown_keys(block, {"preset", "alpha", "a", "b", "cos", "sin", "samples"}, "anisotropy");

  const int sources = (block.contains("preset") ? 1 : 0) + (block.contains("samples") ? 1 : 0) +
                      ((block.contains("cos") || block.contains("sin")) ? 1 : 0);
  if (sources != 1)
    throw ConfigError(
        "config error: key \"anisotropy\" must name exactly one source (preset, cos/sin, or "
        "samples)");

  if (block.contains("preset")) {
    const std::string name = block["preset"].get<std::string>();
    if (name == "coulomb") {
      reject_unknown_keys(block, {"preset"}, "anisotropy");
      return coulomb_kernel();
    }
    if (name == "dislocation") {
      reject_unknown_keys(block, {"preset", "alpha"}, "anisotropy");
      return dislocation_kernel(require_number(block, "alpha", "anisotropy"));
    }
    if (name == "elastic") {
      reject_unknown_keys(block, {"preset", "a", "b"}, "anisotropy");
      const double a = require_number(block, "a", "anisotropy");
      const double b = require_number(block, "b", "anisotropy");
      if (!(b > a && a > 0.0))
        throw ConfigError("config error: key \"anisotropy.preset\" elastic requires b > a > 0");
      return elastic_kernel(a, b);
    }
    throw ConfigError("config error: key \"anisotropy.preset\" has unknown value \"" + name +
                      "\"");
  }

  if (block.contains("samples")) {
    const std::vector<double> samples = number_array(block["samples"], "anisotropy.samples");
    KernelSpec spec;
    try {
      spec.series = series_from_samples(samples);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config error: key \"anisotropy.samples\": ") + e.what());
    }
    return spec;
  }

  KernelSpec spec;
  if (block.contains("cos")) spec.series.cos_coeffs = number_array(block["cos"], "anisotropy.cos");
  if (block.contains("sin")) spec.series.sin_coeffs = number_array(block["sin"], "anisotropy.sin");
  const std::size_t n = std::max(spec.series.cos_coeffs.size(), spec.series.sin_coeffs.size());
  if (spec.series.cos_coeffs.size() != spec.series.sin_coeffs.size()) {
    if (!spec.series.cos_coeffs.empty() && !spec.series.sin_coeffs.empty())
      throw ConfigError("config error: keys \"anisotropy.cos\" and \"anisotropy.sin\" must have "
                        "equal length");
    spec.series.cos_coeffs.resize(n, 0.0);
    spec.series.sin_coeffs.resize(n, 0.0);
  }
  return spec;
}

ConfinementSpec parse_confinement(const json& block) {
  if (!block.is_object())
    throw ConfigError("config error: key \"confinement\" must be an object");
  if (!block.contains("kind"))
    throw ConfigError("config error: missing key \"confinement.kind\"");
  const std::string kind = block["kind"].get<std::string>();
  if (kind == "quadratic") {
    reject_unknown_keys(block, {"kind"}, "confinement");
    return QuadraticConfinement{};
  }
  if (kind == "power") {
    reject_unknown_keys(block, {"kind", "p"}, "confinement");
    const double p = require_number(block, "p", "confinement");
    if (!(p > 0.0)) throw ConfigError("config error: key \"confinement.p\" must be positive");
    return PowerConfinement{p};
  }
  if (kind == "elliptical_well") {
    reject_unknown_keys(block, {"kind", "phi", "a1", "a2"}, "confinement");
    EllipseShape domain;
    domain.phi = require_number(block, "phi", "confinement");
    domain.a1 = require_number(block, "a1", "confinement");
    domain.a2 = require_number(block, "a2", "confinement");
    if (!(domain.a1 > 0.0 && domain.a2 > 0.0))
      throw ConfigError("config error: keys \"confinement.a1/a2\" must be positive");
    return EllipticalWell{domain};
  }
  throw ConfigError("config error: key \"confinement.kind\" has unknown value \"" + kind + "\"");
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config error: top level must be an object");
  reject_unknown_keys(
      doc, {"anisotropy", "confinement", "log_strength", "tolerances", "quad_nodes", "n", "seed"},
      "");
  if (!doc.contains("anisotropy"))
    throw ConfigError("config error: missing key \"anisotropy\"");

  RunConfig config;
  config.kernel = parse_anisotropy(doc["anisotropy"]);

  if (doc.contains("confinement")) config.confinement = parse_confinement(doc["confinement"]);

  if (doc.contains("log_strength")) {
    const double s = doc["log_strength"].get<double>();
    if (!(s >= 1.0) || !std::isfinite(s))
      throw ConfigError("config error: key \"log_strength\" must be a finite number >= 1");
    config.kernel.log_strength = s;
  }

  if (doc.contains("tolerances")) {
    const json& tol = doc["tolerances"];
    reject_unknown_keys(tol, {"solver", "el_scan", "parseval"}, "tolerances");
    if (tol.contains("solver")) config.tolerances.solver = tol["solver"].get<double>();
    if (tol.contains("el_scan")) config.tolerances.el_scan = tol["el_scan"].get<double>();
    if (tol.contains("parseval")) config.tolerances.parseval = tol["parseval"].get<double>();
    if (!(config.tolerances.solver > 0.0 && config.tolerances.el_scan > 0.0 &&
          config.tolerances.parseval > 0.0))
      throw ConfigError("config error: key \"tolerances\" entries must be positive");
  }

  if (doc.contains("quad_nodes")) {
    config.quad_nodes = doc["quad_nodes"].get<int>();
    if (config.quad_nodes < 64 || config.quad_nodes % 2 != 0)
      throw ConfigError("config error: key \"quad_nodes\" must be even and at least 64");
  }

  if (doc.contains("n")) {
    const auto n = doc["n"].get<std::int64_t>();
    if (n < 1) throw ConfigError("config error: key \"n\" must be a positive integer");
    config.n = static_cast<std::size_t>(n);
  }
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

json prediction_to_json(const Prediction& prediction) {
  json doc;
  if (prediction.is_ellipse()) {
    const EllipseShape& e = prediction.ellipse();
    doc["kind"] = "ellipse";
    doc["phi"] = e.phi;
    doc["a1"] = e.a1;
    doc["a2"] = e.a2;
  } else {
    doc["kind"] = "segment";
    doc["direction"] = prediction.segment().direction;
  }
  return doc;
}

Prediction prediction_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind"))
    throw ConfigError("config error: prediction must be an object with key \"kind\"");
  Prediction prediction;
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "ellipse") {
    EllipseShape e;
    e.phi = require_number(doc, "phi", "prediction");
    e.a1 = require_number(doc, "a1", "prediction");
    e.a2 = require_number(doc, "a2", "prediction");
    if (!(e.a1 > 0.0 && e.a2 > 0.0))
      throw ConfigError("config error: prediction semi-axes must be positive");
    prediction.law = e;
  } else if (kind == "segment") {
    SegmentLaw s;
    s.direction = require_number(doc, "direction", "prediction");
    prediction.law = s;
  } else {
    throw ConfigError("config error: prediction \"kind\" must be \"ellipse\" or \"segment\"");
  }
  return prediction;
}

json el_report_to_json(const ELReport& report) {
  return json{{"interior_max_grad_residual", report.interior_max_grad_residual},
              {"exterior_min_radial_residual", report.exterior_min_radial_residual},
              {"constant_c", report.constant_c}};
}

json parseval_report_to_json(const ParsevalReport& report) {
  return json{{"lhs", report.lhs}, {"rhs", report.rhs}, {"rel_gap", report.rel_gap}};
}

json classification_to_json(const PsiClassification& cls) {
  return json{{"psi_min", cls.min_value},
              {"argmin", cls.argmin_angle},
              {"label", to_string(cls.label)}};
}

}  // namespace ellipselaw
