#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ellipselaw {

/// Truncated even Fourier series of the angular anisotropy on the circle,
///
///   kappa(theta) = sum_{n=1}^{N} a_{2n} cos(2n theta) + b_{2n} sin(2n theta).
///
/// No constant term is stored (it would only shift the energy), and only even
/// harmonics occur, so kappa(theta + pi) = kappa(theta).
struct AnisotropySeries {
  std::vector<double> cos_coeffs;  // a_{2n}, n = 1..N
  std::vector<double> sin_coeffs;  // b_{2n}, n = 1..N
  std::size_t order() const { return cos_coeffs.size(); }
};

enum class PsiLabel { StrictlyPositive, Degenerate, Indefinite };

std::string to_string(PsiLabel label);

/// Classification threshold separating analytic zeros of psi_hat from rounding noise.
inline constexpr double kPsiPositivityTol = 1e-10;

/// Sign classification of the angular profile psi_hat over the circle.
struct PsiClassification {
  double min_value = 0.0;
  double argmin_angle = 0.0;  // radians in [0, pi)
  PsiLabel label = PsiLabel::StrictlyPositive;
};

/// Interaction kernel W(x) = -log_strength * log|x| + kappa(x); log_strength = 1
/// is the base kernel, values 1 + eps arise in the degenerate continuation.
struct KernelSpec {
  double log_strength = 1.0;
  AnisotropySeries series;
};

/// kappa at angle theta.
double eval_kappa(const AnisotropySeries& series, double theta);

/// d kappa / d theta (term-by-term derivative of the series).
double eval_kappa_angular_derivative(const AnisotropySeries& series, double theta);

/// Angular profile of the kernel's Fourier transform:
///   psi_hat(theta) = 1 + sum (-1)^n 2n (a_{2n} cos(2n theta) + b_{2n} sin(2n theta)).
/// Pi-periodic; identically 1 for the pure Coulomb kernel, and its mean over
/// the circle is 1 for every series.
double eval_psi_hat(const AnisotropySeries& series, double theta);

/// First and second angular derivatives of psi_hat.
double eval_psi_hat_derivative(const AnisotropySeries& series, double theta);
double eval_psi_hat_second_derivative(const AnisotropySeries& series, double theta);

/// Minimum of psi_hat over a uniform grid on [0, pi) refined by a three-point
/// quadratic fit around the grid minimum. Requires grid_size >= 4N + 16.
PsiClassification classify_psi(const AnisotropySeries& series, int grid_size);

/// Discrete Fourier analysis of m uniform samples on [0, 2pi). The sampled
/// function must be even on the circle (values[j] == values[j + m/2]) within
/// 1e-10 and m must be even with m >= 8. Returns the harmonics 2n for
/// n = 1..m/4 (the constant term is discarded); trailing zero harmonics are
/// trimmed.
AnisotropySeries series_from_samples(std::span<const double> values);

/// Series of theta -> kappa(theta - psi), i.e. the anisotropy pattern rotated by psi.
AnisotropySeries rotate(const AnisotropySeries& series, double psi);

/// Named kernels. The dislocation kernel is alpha * x1^2/|x|^2 (series {a_2 = alpha/2});
/// the elastic kernel is the two-log anisotropy with material constants b > a > 0,
/// sampled at 512 angles.
KernelSpec coulomb_kernel();
KernelSpec dislocation_kernel(double alpha);
KernelSpec elastic_kernel(double a, double b);

/// Pointwise value of the elastic anisotropy (before sampling); exposed for tests.
double elastic_kappa_value(double a, double b, double theta);

}  // namespace ellipselaw
