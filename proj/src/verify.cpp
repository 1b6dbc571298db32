#include "ellipselaw/verify.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ellipselaw/quadrature.hpp"

namespace ellipselaw {

namespace {

constexpr double kPi = std::numbers::pi;

struct WeightedGaussian {
  Vec2 center;
  double weight;
};

// int W(z) * sum_i w_i G_var(z - c_i) dz in polar coordinates, where G_var is
// the isotropic Gaussian density of the given variance. The radial mesh is
// graded toward 0 (the log singularity of W is integrable) and the angular
// trapezoid is spectrally accurate.
double polar_kernel_energy(const AnisotropySeries& series,
                           const std::vector<WeightedGaussian>& gaussians, double variance,
                           const VerifyQuadOptions& opts) {
  const double sigma_eff = std::sqrt(variance);
  double max_offset = 0.0;
  for (const auto& g : gaussians) max_offset = std::fmax(max_offset, g.center.norm());
  const double rmax = 12.0 * sigma_eff + max_offset;
  const double norm = 1.0 / (2.0 * kPi * variance);

  auto ring = [&](double r) {
    const double mean = periodic_mean(opts.angular_nodes, [&](double t) {
      const Vec2 z{r * std::cos(t), r * std::sin(t)};
      double density = 0.0;
      for (const auto& g : gaussians)
        density += g.weight * std::exp(-(z - g.center).norm2() / (2.0 * variance));
      return (-std::log(r) + eval_kappa(series, t)) * density;
    });
    return 2.0 * kPi * mean * norm * r;
  };

  const double panel_w = opts.panel_width_sigmas * sigma_eff;
  const double w0 = std::fmin(panel_w, rmax);
  double total = integrate_graded(ring, 0.0, w0, 0.0, opts.graded_depth, opts.radial_gl);
  double lo = w0;
  while (lo < rmax) {
    const double hi = std::fmin(lo + panel_w, rmax);
    total += integrate_gl(ring, lo, hi, opts.radial_gl);
    lo = hi;
  }
  return total;
}

}  // namespace

ParsevalReport parseval_gap(const AnisotropySeries& series, const GaussianBlobPair& blobs,
                            const VerifyQuadOptions& opts) {
  ParsevalReport report;
  const Vec2 d = blobs.p - blobs.q;
  if (d.norm2() == 0.0) return report;  // nu = 0: both sides vanish

  // physical side: autocorrelation of nu is 2 G(z) - G(z - d) - G(z + d) with
  // variance 2 sigma^2
  const double variance = 2.0 * blobs.sigma * blobs.sigma;
  report.lhs = polar_kernel_energy(
      series, {{Vec2{}, 2.0}, {d, -1.0}, {-d, -1.0}}, variance, opts);

  // Fourier side: (1/pi) int psi_hat(t) (1 - cos(r e_t . d)) e^{-sigma^2 r^2} / r
  const double rmax = 12.0 / blobs.sigma;
  const double s2 = blobs.sigma * blobs.sigma;
  auto ring = [&](double r) {
    const double mean = periodic_mean(opts.angular_nodes, [&](double t) {
      const double proj = r * (d.x * std::cos(t) + d.y * std::sin(t));
      return eval_psi_hat(series, t) * (1.0 - std::cos(proj));
    });
    return 2.0 * mean * std::exp(-s2 * r * r) / r;  // (1/pi) * 2pi = 2
  };
  const double panel_w = std::fmin(0.5 / std::fmax(d.norm(), 1e-9), 0.5 / blobs.sigma);
  double rhs = 0.0;
  double lo = 0.0;
  while (lo < rmax) {
    const double hi = std::fmin(lo + panel_w, rmax);
    rhs += integrate_gl(ring, lo, hi, opts.radial_gl);
    lo = hi;
  }
  report.rhs = rhs;

  const double denom = std::fmax(std::fabs(report.rhs), 1e-300);
  report.rel_gap = std::fabs(report.lhs - report.rhs) / denom;
  return report;
}

std::array<double, 5> convexity_probe(const AnisotropySeries& series, const ParticleConfig& cfg_a,
                                      const ParticleConfig& cfg_b, double sigma,
                                      const VerifyQuadOptions& opts) {
  if (cfg_a.size() == 0 || cfg_b.size() == 0)
    throw std::invalid_argument("convexity_probe: configurations must be non-empty");
  if (!(sigma > 0.0)) throw std::invalid_argument("convexity_probe: sigma must be positive");

  const double variance = 2.0 * sigma * sigma;
  auto bilinear = [&](const ParticleConfig& u, const ParticleConfig& v) {
    std::vector<WeightedGaussian> gaussians;
    gaussians.reserve(u.size() * v.size());
    const double w = 1.0 / (static_cast<double>(u.size()) * static_cast<double>(v.size()));
    for (const Vec2& a : u.positions)
      for (const Vec2& b : v.positions) gaussians.push_back({a - b, w});
    return polar_kernel_energy(series, gaussians, variance, opts);
  };

  const double e_aa = bilinear(cfg_a, cfg_a);
  const double e_ab = bilinear(cfg_a, cfg_b);
  const double e_bb = bilinear(cfg_b, cfg_b);

  std::array<double, 5> energies{};
  for (int i = 0; i < 5; ++i) {
    const double t = i / 4.0;
    energies[i] = (1.0 - t) * (1.0 - t) * e_aa + 2.0 * t * (1.0 - t) * e_ab + t * t * e_bb;
  }
  return energies;
}

}  // namespace ellipselaw
