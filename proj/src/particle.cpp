#include "ellipselaw/particle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ellipselaw {

namespace {

constexpr double kCollisionGuard = 1e-9;
constexpr double kStallStep = 1e-14;

double kernel_value(const KernelSpec& kernel, Vec2 z) {
  return -kernel.log_strength * 0.5 * std::log(z.norm2()) +
         eval_kappa(kernel.series, z.angle());
}

Vec2 kernel_gradient(const KernelSpec& kernel, Vec2 z) {
  const double r2 = z.norm2();
  const double dk = eval_kappa_angular_derivative(kernel.series, z.angle());
  // grad(-s log|z|) = -s z / |z|^2; grad kappa = kappa'(theta) (-z.y, z.x) / |z|^2
  return {(-kernel.log_strength * z.x - dk * z.y) / r2,
          (-kernel.log_strength * z.y + dk * z.x) / r2};
}

double confinement_value(const ConfinementSpec& conf, Vec2 x) {
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, QuadraticConfinement>) return x.norm2();
        if constexpr (std::is_same_v<T, PowerConfinement>) return std::pow(x.norm(), c.p);
        return 0.0;  // elliptical well: handled by projection
      },
      conf);
}

Vec2 confinement_gradient(const ConfinementSpec& conf, Vec2 x) {
  return std::visit(
      [&](const auto& c) -> Vec2 {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, QuadraticConfinement>) return x * 2.0;
        if constexpr (std::is_same_v<T, PowerConfinement>) {
          const double r = x.norm();
          if (r == 0.0) return {};
          return x * (c.p * std::pow(r, c.p - 2.0));
        }
        return {};
      },
      conf);
}

double min_pair_distance2(const std::vector<Vec2>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pts.size(); ++j)
    for (std::size_t k = j + 1; k < pts.size(); ++k)
      best = std::fmin(best, (pts[j] - pts[k]).norm2());
  return best;
}

// Per-particle forces f_j = n * dE/dx_j = (2/n) sum_k grad W + grad V; the
// n-scaling keeps step sizes n-independent.
std::vector<Vec2> forces(const ParticleConfig& cfg, const KernelSpec& kernel,
                         const ConfinementSpec& conf) {
  const std::size_t n = cfg.size();
  std::vector<Vec2> f(n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec2 acc{};
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      acc += kernel_gradient(kernel, cfg.positions[j] - cfg.positions[k]);
    }
    f[j] = acc * (2.0 / static_cast<double>(n)) + confinement_gradient(conf, cfg.positions[j]);
  }
  return f;
}

double sup_norm(const std::vector<Vec2>& v) {
  double m = 0.0;
  for (const Vec2& x : v) m = std::fmax(m, std::fmax(std::fabs(x.x), std::fabs(x.y)));
  return m;
}

}  // namespace

double discrete_energy(const ParticleConfig& cfg, const KernelSpec& kernel,
                       const ConfinementSpec& conf) {
  const std::size_t n = cfg.size();
  if (n == 0) return 0.0;
  double interaction = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const Vec2 z = cfg.positions[j] - cfg.positions[k];
      if (z.norm2() == 0.0) return std::numeric_limits<double>::infinity();
      interaction += kernel_value(kernel, z);
    }
  }
  double confinement = 0.0;
  for (const Vec2& x : cfg.positions) confinement += confinement_value(conf, x);
  const double dn = static_cast<double>(n);
  return 2.0 * interaction / (dn * dn) + confinement / dn;
}

std::vector<Vec2> discrete_gradient(const ParticleConfig& cfg, const KernelSpec& kernel,
                                    const ConfinementSpec& conf) {
  std::vector<Vec2> g = forces(cfg, kernel, conf);
  const double inv_n = 1.0 / static_cast<double>(cfg.size());
  for (Vec2& v : g) v = v * inv_n;
  return g;
}

MinimizeResult minimize(const ParticleConfig& start, const KernelSpec& kernel,
                        const ConfinementSpec& conf, const DescentOptions& opts) {
  if (opts.max_iters <= 0 || !(opts.step0 > 0.0) || !(opts.grad_tol > 0.0) ||
      !(opts.armijo_c > 0.0 && opts.armijo_c < 1.0) ||
      !(opts.shrink > 0.0 && opts.shrink < 1.0))
    throw std::invalid_argument("minimize: descent options out of range");
  if (const auto* power = std::get_if<PowerConfinement>(&conf); power && !(power->p > 0.0))
    throw std::invalid_argument("minimize: power confinement exponent must be positive");

  MinimizeResult result;
  result.config = start;
  const std::size_t n = start.size();
  if (n == 0) {
    result.converged = true;
    return result;
  }
  const EllipticalWell* well = std::get_if<EllipticalWell>(&conf);
  if (well)
    for (Vec2& x : result.config.positions) x = project_to_ellipse(well->domain, x);

  double energy = discrete_energy(result.config, kernel, conf);
  double step = opts.step0;
  const double dn = static_cast<double>(n);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const std::vector<Vec2> f = forces(result.config, kernel, conf);
    const double fnorm = sup_norm(f);
    result.log.push_back({iter, energy, fnorm, step});
    if (fnorm <= opts.grad_tol) {
      result.converged = true;
      return result;
    }

    bool accepted = false;
    std::vector<Vec2> trial(n);
    while (step >= kStallStep) {
      for (std::size_t j = 0; j < n; ++j) {
        trial[j] = result.config.positions[j] - f[j] * step;
        if (well) trial[j] = project_to_ellipse(well->domain, trial[j]);
      }
      if (min_pair_distance2(trial) >= kCollisionGuard * kCollisionGuard) {
        const double trial_energy = discrete_energy({trial}, kernel, conf);
        // sufficient decrease along the projected step, floored at machine
        // resolution so acceptance always certifies real progress
        double moved2 = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          moved2 += (trial[j] - result.config.positions[j]).norm2();
        const double floor_ =
            std::numeric_limits<double>::epsilon() * (std::fabs(energy) + 1.0);
        const double decrease = std::fmax(opts.armijo_c * moved2 / (step * dn), floor_);
        if (trial_energy <= energy - decrease) {
          result.config.positions.swap(trial);
          energy = trial_energy;
          accepted = true;
          break;
        }
      }
      step *= opts.shrink;
    }
    if (!accepted) {
      result.stalled = true;
      return result;
    }
    // grow the step back after an accepted move
    step = std::min(step / opts.shrink, opts.step0 * 64.0);
  }
  return result;
}

Mat2 second_moments(const ParticleConfig& cfg) {
  Mat2 m;
  if (cfg.size() == 0) return m;
  for (const Vec2& x : cfg.positions) {
    m.xx += x.x * x.x;
    m.xy += x.x * x.y;
    m.yy += x.y * x.y;
  }
  const double inv_n = 1.0 / static_cast<double>(cfg.size());
  return m * inv_n;
}

ParticleConfig random_disk_config(std::size_t n, std::uint64_t seed, double radius) {
  std::mt19937_64 rng(seed);
  auto uniform01 = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1), reproducible
  };
  ParticleConfig cfg;
  cfg.positions.reserve(n);
  while (cfg.positions.size() < n) {
    const double x = 2.0 * uniform01() - 1.0;
    const double y = 2.0 * uniform01() - 1.0;
    if (x * x + y * y <= 1.0) cfg.positions.push_back({radius * x, radius * y});
  }
  return cfg;
}

Vec2 project_to_ellipse(const EllipseShape& domain, Vec2 p) {
  if (!(domain.a1 > 0.0 && domain.a2 > 0.0))
    throw std::invalid_argument("project_to_ellipse: degenerate domain");
  const Vec2 q = rotate(p, -domain.phi);
  const double A = domain.a1, B = domain.a2;
  const double u = q.x / A, v = q.y / B;
  if (u * u + v * v <= 1.0) return p;

  // closest boundary point solves x = A^2 qx / (A^2 + lam), y = B^2 qy / (B^2 + lam)
  // with f(lam) = (A qx / (A^2+lam))^2 + (B qy / (B^2+lam))^2 - 1 = 0, lam > 0
  auto f = [&](double lam) {
    const double tx = A * q.x / (A * A + lam);
    const double ty = B * q.y / (B * B + lam);
    return tx * tx + ty * ty - 1.0;
  };
  double lo = 0.0;
  double hi = std::fmax(A, B) * q.norm();  // f(hi) < 0 for this bound
  while (f(hi) > 0.0) hi *= 2.0;
  double lam = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    const double tx = A * q.x / (A * A + lam);
    const double ty = B * q.y / (B * B + lam);
    const double val = tx * tx + ty * ty - 1.0;
    if (std::fabs(val) < 1e-15) break;
    if (val > 0.0)
      lo = lam;
    else
      hi = lam;
    const double dval =
        -2.0 * (tx * tx / (A * A + lam) + ty * ty / (B * B + lam));
    double next = lam - val / dval;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - lam) < 1e-16 * (1.0 + lam)) {
      lam = next;
      break;
    }
    lam = next;
  }
  const Vec2 proj{A * A * q.x / (A * A + lam), B * B * q.y / (B * B + lam)};
  return rotate(proj, domain.phi);
}

}  // namespace ellipselaw
