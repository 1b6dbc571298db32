// Batch front door: parse a JSON config, dispatch to the solver, verifier, or
// simulator, and emit machine-readable reports (JSON) and point clouds (CSV).
//
// Exit codes: 0 success, 1 quantitative failure, 2 config error, 3 IO error,
// 4 out-of-theory input (indefinite kernel).

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ellipselaw/config.hpp"

namespace {

using namespace ellipselaw;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitQuantitative = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitOutOfTheory = 4;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open output file: " + path);
  out << text;
  if (!out) throw std::ios_base::failure("cannot write output file: " + path);
}

void emit(const json& doc, const std::optional<std::string>& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path)
    write_text(*path, text);
  else
    std::cout << text;
}

std::string format_csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

void require_base_kernel(const RunConfig& config, const char* command) {
  if (config.kernel.log_strength != 1.0)
    throw ConfigError(std::string("config error: key \"log_strength\" must be 1 for ") + command +
                      " (only simulate supports scaled kernels)");
}

int cmd_analyze(const std::string& config_path, const std::optional<std::string>& out) {
  const RunConfig config = load_run_config(config_path);
  require_base_kernel(config, "analyze");
  const int grid = std::max(4 * static_cast<int>(config.kernel.series.order()) + 16, 2048);
  const PsiClassification cls = classify_psi(config.kernel.series, grid);
  emit(classification_to_json(cls), out);
  return kExitOk;
}

int cmd_solve(const std::string& config_path, const std::optional<std::string>& out,
              const std::optional<std::string>& report_path) {
  const RunConfig config = load_run_config(config_path);
  require_base_kernel(config, "solve");
  SolveOptions opts;
  opts.quad_nodes = config.quad_nodes;
  opts.residual_tol = config.tolerances.solver;
  const Prediction prediction = solve(config.kernel.series, opts);

  ProbeCounts counts;
  counts.quad_nodes = config.quad_nodes;
  const ELReport report = el_scan(config.kernel.series, prediction, counts);

  const json prediction_doc = prediction_to_json(prediction);
  const json report_doc = el_report_to_json(report);
  if (out) write_text(*out, prediction_doc.dump(2) + "\n");
  if (report_path) write_text(*report_path, report_doc.dump(2) + "\n");
  if (!out && !report_path)
    std::cout << json{{"prediction", prediction_doc}, {"el_report", report_doc}}.dump(2) << "\n";

  const bool within = report.interior_max_grad_residual <= config.tolerances.el_scan &&
                      report.exterior_min_radial_residual >= -config.tolerances.el_scan;
  return within ? kExitOk : kExitQuantitative;
}

int cmd_simulate(const std::string& config_path, std::optional<std::size_t> n_flag,
                 std::optional<std::uint64_t> seed_flag, const std::string& out_path,
                 const std::string& log_path, int max_iters, double grad_tol) {
  const RunConfig config = load_run_config(config_path);
  const std::size_t n = n_flag ? *n_flag : config.n.value_or(0);
  if (n < 1) throw ConfigError("config error: missing key \"n\" (or --n flag)");
  const std::uint64_t seed = seed_flag ? *seed_flag : config.seed.value_or(0);

  DescentOptions opts;
  opts.seed = seed;
  opts.max_iters = max_iters;
  opts.grad_tol = grad_tol;

  ParticleConfig start = random_disk_config(n, seed, std::numbers::sqrt2);
  const MinimizeResult result = minimize(start, config.kernel, config.confinement, opts);

  std::string csv = "x,y\n";
  for (const Vec2& p : result.config.positions)
    csv += format_csv_number(p.x) + "," + format_csv_number(p.y) + "\n";
  write_text(out_path, csv);

  std::string log = "iter,energy,grad_norm,step\n";
  for (const IterationRecord& rec : result.log)
    log += std::to_string(rec.iter) + "," + format_csv_number(rec.energy) + "," +
           format_csv_number(rec.grad_norm) + "," + format_csv_number(rec.step) + "\n";
  write_text(log_path, log);

  if (result.stalled) {
    std::cerr << "simulate: descent stalled (line-search step collapsed); partial outputs "
                 "retained\n";
    return kExitQuantitative;
  }
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& prediction_path) {
  const RunConfig config = load_run_config(config_path);
  require_base_kernel(config, "verify");
  std::ifstream in(prediction_path);
  if (!in) throw std::ios_base::failure("cannot open prediction file: " + prediction_path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: prediction file is not valid JSON: ") + e.what());
  }
  const Prediction prediction = prediction_from_json(doc);

  ProbeCounts counts;
  counts.quad_nodes = config.quad_nodes;
  const ELReport report = el_scan(config.kernel.series, prediction, counts);
  emit(el_report_to_json(report), std::nullopt);
  const bool within = report.interior_max_grad_residual <= config.tolerances.el_scan &&
                      report.exterior_min_radial_residual >= -config.tolerances.el_scan;
  return within ? kExitOk : kExitQuantitative;
}

int cmd_parseval(const std::string& config_path, double px, double py, double qx, double qy,
                 double sigma) {
  const RunConfig config = load_run_config(config_path);
  require_base_kernel(config, "parseval");
  GaussianBlobPair blobs;
  blobs.p = {px, py};
  blobs.q = {qx, qy};
  blobs.sigma = sigma;
  if (!(sigma > 0.0)) throw ConfigError("config error: --sigma must be positive");
  VerifyQuadOptions opts;
  opts.angular_nodes = config.quad_nodes;
  const ParsevalReport report = parseval_gap(config.kernel.series, blobs, opts);
  emit(parseval_report_to_json(report), std::nullopt);
  return report.rel_gap <= config.tolerances.parseval ? kExitOk : kExitQuantitative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimiser prediction and verification for anisotropic logarithmic kernels"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::string> report_path;

  auto* analyze = app.add_subcommand("analyze", "Classify the angular profile of the kernel");
  analyze->add_option("config", config_path, "JSON config file")->required();
  analyze->add_option("--out", out_path, "Write the report to this file instead of stdout");

  auto* solve_cmd = app.add_subcommand("solve", "Predict the minimiser (ellipse or segment)");
  solve_cmd->add_option("config", config_path, "JSON config file")->required();
  solve_cmd->add_option("--out", out_path, "Write the prediction JSON to this file");
  solve_cmd->add_option("--report", report_path, "Write the residual report JSON to this file");

  std::optional<std::size_t> n_flag;
  std::optional<std::uint64_t> seed_flag;
  std::string particles_path = "particles.csv";
  std::string log_path = "descent_log.csv";
  int max_iters = 2000;
  double grad_tol = 1e-4;
  auto* simulate = app.add_subcommand("simulate", "Minimize the discrete n-particle energy");
  simulate->add_option("config", config_path, "JSON config file")->required();
  simulate->add_option("--n", n_flag, "Number of particles (overrides config)");
  simulate->add_option("--seed", seed_flag, "RNG seed (overrides config)");
  simulate->add_option("--out", particles_path, "Particle CSV output path");
  simulate->add_option("--log", log_path, "Iteration log CSV output path");
  simulate->add_option("--max-iters", max_iters, "Descent iteration cap");
  simulate->add_option("--grad-tol", grad_tol, "Force sup-norm convergence tolerance");

  std::string prediction_path;
  auto* verify_cmd = app.add_subcommand("verify", "Scan Euler-Lagrange residuals of a prediction");
  verify_cmd->add_option("config", config_path, "JSON config file")->required();
  verify_cmd->add_option("prediction", prediction_path, "Prediction JSON file")->required();

  double px = 1.0, py = 0.0, qx = -1.0, qy = 0.0, sigma = 0.5;
  auto* parseval = app.add_subcommand("parseval", "Fourier-side energy identity cross-check");
  parseval->add_option("config", config_path, "JSON config file")->required();
  parseval->add_option("--px", px, "Blob center p, x coordinate");
  parseval->add_option("--py", py, "Blob center p, y coordinate");
  parseval->add_option("--qx", qx, "Blob center q, x coordinate");
  parseval->add_option("--qy", qy, "Blob center q, y coordinate");
  parseval->add_option("--sigma", sigma, "Common blob width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(config_path, out_path);
    if (app.got_subcommand(solve_cmd)) return cmd_solve(config_path, out_path, report_path);
    if (app.got_subcommand(simulate))
      return cmd_simulate(config_path, n_flag, seed_flag, particles_path, log_path, max_iters,
                          grad_tol);
    if (app.got_subcommand(verify_cmd)) return cmd_verify(config_path, prediction_path);
    if (app.got_subcommand(parseval)) return cmd_parseval(config_path, px, py, qx, qy, sigma);
  } catch (const IndefiniteKernelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOutOfTheory;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SolveFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitQuantitative;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
