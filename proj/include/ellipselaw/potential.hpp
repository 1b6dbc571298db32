#pragma once

#include "ellipselaw/anisotropy.hpp"
#include "ellipselaw/ellipse.hpp"
#include "ellipselaw/geometry.hpp"

namespace ellipselaw {

/// Bessel function of the first kind of order 1. Power series below r = 10,
/// amplitude-phase asymptotic expansion above; absolute error below 1e-8 on
/// [0, 1e6]. Extended to r < 0 by oddness.
double bessel_j1(double r);

/// Closed form of the improper integral int_0^inf J1(r) sin(alpha r) / r dr:
/// alpha on [0, 1], 1 / (alpha + sqrt(alpha^2 - 1)) above. Continuous at 1.
double tail_factor(double alpha_val);

/// Gradient of W * (chi_E / |E|) at x, for W = -log|.| + kappa. Linear in x
/// inside E; outside, the closed-form tail factor contributes through the
/// directions where |x . y| exceeds |D(a) R^T y|.
Vec2 grad_potential(const AnisotropySeries& series, const EllipseShape& shape, Vec2 x,
                    int quad_nodes = 512);

/// Radial growth residual grad(W * chi)(x) . x + |x|^2; vanishes inside a
/// solved shape and is nonnegative outside it.
double radial_residual(const AnisotropySeries& series, const EllipseShape& shape, Vec2 x,
                       int quad_nodes = 512);

/// Coulomb potential of the normalized disk of radius r (closed-form test oracle):
/// 1/2 - |x|^2 / (2 r^2) - log r inside, -log|x| outside.
double disk_coulomb_potential(Vec2 x, double r);

/// Potential of the weighted boundary measure of the ellipse (the equilibrium
/// measure under the hard elliptic confinement), by direct quadrature of the
/// angle parametrization, which carries weight dt / (2 pi) exactly. Rejects x
/// within 1e-6 of the boundary.
double boundary_potential(const AnisotropySeries& series, const EllipseShape& shape, Vec2 x,
                          int quad_nodes);

/// On-line potential of the semicircle law along `direction`, evaluated at
/// arc coordinate s: -int log|s - t| rho(t) dt + kappa(e_dir), with the
/// substitution t = sqrt2 sin u and panels refined toward the singularity.
double segment_potential(const AnisotropySeries& series, double direction, double s,
                         int quad_nodes = 512);

/// Euler-Lagrange residual scan of a prediction over deterministic probe grids.
struct ELReport {
  double interior_max_grad_residual = 0.0;
  double exterior_min_radial_residual = 0.0;
  double constant_c = 0.0;
};

struct ProbeCounts {
  int radii = 32;
  int angles = 64;
  int segment_points = 64;
  int quad_nodes = 512;
};

ELReport el_scan(const AnisotropySeries& series, const EllipseShape& shape,
                 const ProbeCounts& counts = {});
ELReport el_scan(const AnisotropySeries& series, const SegmentLaw& segment,
                 const ProbeCounts& counts = {});
ELReport el_scan(const AnisotropySeries& series, const Prediction& prediction,
                 const ProbeCounts& counts = {});

/// Value of (W * chi_E/|E|)(0): the potential level at the center, evaluated by a
/// one-dimensional spectral quadrature. Combined with the interior gradient map this
/// pins the Euler-Lagrange constant.
double center_potential(const AnisotropySeries& series, const EllipseShape& shape,
                        int quad_nodes = 512);

/// Interior gradient map G with grad(W * chi)(x) = G x for x in E.
Mat2 interior_gradient_map(const AnisotropySeries& series, const EllipseShape& shape,
                           int quad_nodes = 512);

}  // namespace ellipselaw
