#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "ellipselaw/anisotropy.hpp"
#include "ellipselaw/ellipse.hpp"
#include "ellipselaw/particle.hpp"
#include "ellipselaw/potential.hpp"
#include "ellipselaw/verify.hpp"

namespace ellipselaw {

/// Malformed configuration; the message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double solver = 1e-8;
  double el_scan = 1e-6;
  double parseval = 1e-3;
};

/// Parsed run configuration. Top-level keys: "anisotropy" (required),
/// "confinement", "log_strength", "tolerances", "quad_nodes", "n", "seed".
/// Unknown keys are rejected.
struct RunConfig {
  KernelSpec kernel;
  ConfinementSpec confinement = QuadraticConfinement{};
  Tolerances tolerances;
  int quad_nodes = 512;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);  // throws ConfigError / std::ios errors

nlohmann::json prediction_to_json(const Prediction& prediction);
Prediction prediction_from_json(const nlohmann::json& doc);  // throws ConfigError

nlohmann::json el_report_to_json(const ELReport& report);
nlohmann::json parseval_report_to_json(const ParsevalReport& report);
nlohmann::json classification_to_json(const PsiClassification& cls);

}  // namespace ellipselaw
