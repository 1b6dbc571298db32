#pragma once

#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ellipselaw/anisotropy.hpp"
#include "ellipselaw/geometry.hpp"

namespace ellipselaw {

/// Ellipse centered at the origin: semi-axis a1 along direction phi, a2 along
/// phi + pi/2. Solver output is normalized to a1 <= a2 with phi in (-pi/2, pi/2]
/// (phi = 0 when the ellipse is a circle), and satisfies a1^2 + a2^2 = 2.
struct EllipseShape {
  double phi = 0.0;
  double a1 = 1.0;
  double a2 = 1.0;

  /// M = R(phi) diag(a1^2, a2^2) R(phi)^T.
  Mat2 moment_matrix() const;
};

/// Collapsed minimiser: semicircle density (1/pi) sqrt(2 - t^2) on
/// [-half_length, half_length] along the given direction.
struct SegmentLaw {
  double direction = 0.0;  // radians in [0, pi)
  double half_length = std::numbers::sqrt2;
};

struct ContinuationStep {
  double epsilon;
  double beta;  // smaller squared semi-axis of the eps-regularized solution
};

struct Prediction {
  std::variant<EllipseShape, SegmentLaw> law;
  std::vector<ContinuationStep> continuation;  // non-empty only on the degenerate path

  bool is_ellipse() const { return std::holds_alternative<EllipseShape>(law); }
  const EllipseShape& ellipse() const { return std::get<EllipseShape>(law); }
  const SegmentLaw& segment() const { return std::get<SegmentLaw>(law); }
};

struct SolveOptions {
  int quad_nodes = 512;
  double residual_tol = 1e-8;
};

/// Thrown when psi_hat is negative somewhere on the circle: the energy is not
/// convex there and no ellipse/segment prediction applies.
struct IndefiniteKernelError : std::runtime_error {
  PsiClassification classification;
  explicit IndefiniteKernelError(const PsiClassification& cls);
};

/// Thrown when the multistart Newton search fails to reach the residual tolerance.
struct SolveFailure : std::runtime_error {
  double best_residual;
  SolveFailure(const std::string& what, double residual);
};

/// gamma(beta, phi) = -(1/pi) * integral over S^1 of
///   psi_hat(t + phi) log(beta cos^2 t + (2 - beta) sin^2 t) dt,
/// by quad_nodes-point trapezoid. Requires 0 < beta < 2 and quad_nodes even, >= 64.
double gamma_objective(const AnisotropySeries& series, double beta, double phi, int quad_nodes);

/// d gamma / d beta at (beta, phi); same preconditions.
double gamma_beta_derivative(const AnisotropySeries& series, double beta, double phi,
                             int quad_nodes);

/// Residual of the stationarity system: entries
///   (1/pi) * integral psi_hat(y) y_j y_k / (M y . y) dt - delta_jk,
/// zero exactly at the minimizing shape. Requires a1, a2 > 0.
Mat2 system_residual(const AnisotropySeries& series, const EllipseShape& shape, int quad_nodes);

/// Predict the minimiser of the quadratic-confinement energy: the ellipse law
/// when psi_hat > 0, the ellipse or segment limit (via the eps-continuation
/// ladder) when psi_hat >= 0 degenerately. Throws IndefiniteKernelError when
/// psi_hat changes sign.
Prediction solve(const AnisotropySeries& series, const SolveOptions& opts = {});

}  // namespace ellipselaw
