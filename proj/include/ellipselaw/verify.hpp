#pragma once

#include <array>

#include "ellipselaw/anisotropy.hpp"
#include "ellipselaw/geometry.hpp"
#include "ellipselaw/particle.hpp"

namespace ellipselaw {

/// Signed test measure nu = g_sigma(. - p) - g_sigma(. - q): two isotropic
/// Gaussian bumps of common width and opposite sign (total mass zero).
struct GaussianBlobPair {
  Vec2 p{1.0, 0.0};
  Vec2 q{-1.0, 0.0};
  double sigma = 0.5;
};

struct ParsevalReport {
  double lhs = 0.0;      // int (W * nu) d nu, via the closed-form autocorrelation
  double rhs = 0.0;      // 2 pi int psi_hat(xi)/|xi|^2 |nu_hat|^2 d xi
  double rel_gap = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|); 0 when both vanish
};

struct VerifyQuadOptions {
  int angular_nodes = 512;
  int radial_gl = 16;
  int graded_depth = 40;
  double panel_width_sigmas = 0.5;
};

/// Both sides of the Fourier-side energy identity for nu, by two independent
/// polar quadratures (physical side with a log-singularity-aware radial mesh,
/// Fourier side with the analytic |nu_hat|^2).
ParsevalReport parseval_gap(const AnisotropySeries& series, const GaussianBlobPair& blobs,
                            const VerifyQuadOptions& opts = {});

/// Interaction energies of the Gaussian-smoothed empirical measures of cfg_a
/// and cfg_b interpolated at t = 0, 1/4, 1/2, 3/4, 1. Strictly convex along
/// the segment whenever the smoothed measures differ and psi_hat >= 0.
std::array<double, 5> convexity_probe(const AnisotropySeries& series, const ParticleConfig& cfg_a,
                                      const ParticleConfig& cfg_b, double sigma,
                                      const VerifyQuadOptions& opts = {});

}  // namespace ellipselaw
