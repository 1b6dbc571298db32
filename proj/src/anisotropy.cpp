#include "ellipselaw/anisotropy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ellipselaw {

namespace {

constexpr double kPi = std::numbers::pi;

// Sign factor from the Fourier transform of even circular harmonics:
// the harmonic of order 2n picks up the factor (-1)^n 2n.
double hat_factor(std::size_t n) {
  const double f = 2.0 * static_cast<double>(n);
  return (n % 2 == 0) ? f : -f;
}

}  // namespace

std::string to_string(PsiLabel label) {
  switch (label) {
    case PsiLabel::StrictlyPositive: return "strictly-positive";
    case PsiLabel::Degenerate: return "degenerate";
    case PsiLabel::Indefinite: return "indefinite";
  }
  return "unknown";
}

double eval_kappa(const AnisotropySeries& series, double theta) {
  double sum = 0.0;
  for (std::size_t n = 1; n <= series.order(); ++n) {
    const double arg = 2.0 * static_cast<double>(n) * theta;
    sum += series.cos_coeffs[n - 1] * std::cos(arg) + series.sin_coeffs[n - 1] * std::sin(arg);
  }
  return sum;
}

double eval_kappa_angular_derivative(const AnisotropySeries& series, double theta) {
  double sum = 0.0;
  for (std::size_t n = 1; n <= series.order(); ++n) {
    const double k = 2.0 * static_cast<double>(n);
    const double arg = k * theta;
    sum += k * (-series.cos_coeffs[n - 1] * std::sin(arg) + series.sin_coeffs[n - 1] * std::cos(arg));
  }
  return sum;
}

double eval_psi_hat(const AnisotropySeries& series, double theta) {
  double sum = 1.0;
  for (std::size_t n = 1; n <= series.order(); ++n) {
    const double arg = 2.0 * static_cast<double>(n) * theta;
    sum += hat_factor(n) *
           (series.cos_coeffs[n - 1] * std::cos(arg) + series.sin_coeffs[n - 1] * std::sin(arg));
  }
  return sum;
}

double eval_psi_hat_derivative(const AnisotropySeries& series, double theta) {
  double sum = 0.0;
  for (std::size_t n = 1; n <= series.order(); ++n) {
    const double k = 2.0 * static_cast<double>(n);
    const double arg = k * theta;
    sum += hat_factor(n) * k *
           (-series.cos_coeffs[n - 1] * std::sin(arg) + series.sin_coeffs[n - 1] * std::cos(arg));
  }
  return sum;
}

double eval_psi_hat_second_derivative(const AnisotropySeries& series, double theta) {
  double sum = 0.0;
  for (std::size_t n = 1; n <= series.order(); ++n) {
    const double k = 2.0 * static_cast<double>(n);
    const double arg = k * theta;
    sum -= hat_factor(n) * k * k *
           (series.cos_coeffs[n - 1] * std::cos(arg) + series.sin_coeffs[n - 1] * std::sin(arg));
  }
  return sum;
}

PsiClassification classify_psi(const AnisotropySeries& series, int grid_size) {
  const int min_grid = 4 * static_cast<int>(series.order()) + 16;
  if (grid_size < min_grid)
    throw std::invalid_argument("classify_psi: grid_size must be at least 4N + 16");

  // psi_hat is pi-periodic, so a grid on [0, pi) sees everything
  const double h = kPi / grid_size;
  double best = eval_psi_hat(series, 0.0);
  int best_j = 0;
  for (int j = 1; j < grid_size; ++j) {
    const double v = eval_psi_hat(series, j * h);
    if (v < best) {
      best = v;
      best_j = j;
    }
  }

  // three-point quadratic refinement around the grid minimum (wrap mod pi),
  // then a short Newton polish on the derivative
  const double fm = eval_psi_hat(series, (best_j - 1) * h);
  const double fp = eval_psi_hat(series, (best_j + 1) * h);
  const double denom = fm - 2.0 * best + fp;
  double argmin = best_j * h;
  double min_value = best;
  if (denom > 0.0) {
    double refined = argmin + 0.5 * (fm - fp) / denom * h;
    for (int it = 0; it < 30; ++it) {
      const double d1 = eval_psi_hat_derivative(series, refined);
      const double d2 = eval_psi_hat_second_derivative(series, refined);
      if (d2 <= 0.0) break;
      const double step = d1 / d2;
      refined -= step;
      if (std::fabs(refined - best_j * h) > h) {  // left the bracket; keep the fit point
        refined = argmin + 0.5 * (fm - fp) / denom * h;
        break;
      }
      if (std::fabs(step) < 1e-15) break;
    }
    const double rv = eval_psi_hat(series, refined);
    if (rv < min_value) {
      min_value = rv;
      argmin = refined;
    }
  }
  argmin = std::fmod(argmin, kPi);
  if (argmin < 0.0) argmin += kPi;

  PsiClassification out;
  out.min_value = min_value;
  out.argmin_angle = argmin;
  if (min_value > kPsiPositivityTol)
    out.label = PsiLabel::StrictlyPositive;
  else if (min_value < -kPsiPositivityTol)
    out.label = PsiLabel::Indefinite;
  else
    out.label = PsiLabel::Degenerate;
  return out;
}

AnisotropySeries series_from_samples(std::span<const double> values) {
  const std::size_t m = values.size();
  if (m < 8 || m % 2 != 0)
    throw std::invalid_argument("series_from_samples: sample count must be even and at least 8");
  for (std::size_t j = 0; j < m / 2; ++j) {
    if (std::fabs(values[j] - values[j + m / 2]) > 1e-10)
      throw std::invalid_argument(
          "series_from_samples: samples are not even on the circle (values[j] != values[j + m/2])");
  }

  const std::size_t n_harmonics = m / 4;
  AnisotropySeries series;
  series.cos_coeffs.assign(n_harmonics, 0.0);
  series.sin_coeffs.assign(n_harmonics, 0.0);

  double scale = 0.0;
  for (std::size_t j = 0; j < m; ++j) scale = std::fmax(scale, std::fabs(values[j]));

  const double w = 2.0 * kPi / static_cast<double>(m);
  for (std::size_t n = 1; n <= n_harmonics; ++n) {
    const double k = 2.0 * static_cast<double>(n);
    double ac = 0.0, as = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double arg = k * static_cast<double>(j) * w;
      ac += values[j] * std::cos(arg);
      as += values[j] * std::sin(arg);
    }
    series.cos_coeffs[n - 1] = 2.0 * ac / static_cast<double>(m);
    series.sin_coeffs[n - 1] = 2.0 * as / static_cast<double>(m);
  }

  // trim trailing harmonics at rounding level
  const double tol = 1e-13 * (1.0 + scale);
  std::size_t keep = n_harmonics;
  while (keep > 0 && std::fabs(series.cos_coeffs[keep - 1]) < tol &&
         std::fabs(series.sin_coeffs[keep - 1]) < tol)
    --keep;
  series.cos_coeffs.resize(keep);
  series.sin_coeffs.resize(keep);
  return series;
}

AnisotropySeries rotate(const AnisotropySeries& series, double psi) {
  AnisotropySeries out;
  out.cos_coeffs.resize(series.order());
  out.sin_coeffs.resize(series.order());
  for (std::size_t n = 1; n <= series.order(); ++n) {
    const double c = std::cos(2.0 * static_cast<double>(n) * psi);
    const double s = std::sin(2.0 * static_cast<double>(n) * psi);
    const double a = series.cos_coeffs[n - 1];
    const double b = series.sin_coeffs[n - 1];
    // kappa(theta - psi): cos(2n(theta-psi)) = cos c + sin s expansion
    out.cos_coeffs[n - 1] = a * c - b * s;
    out.sin_coeffs[n - 1] = a * s + b * c;
  }
  return out;
}

KernelSpec coulomb_kernel() { return {}; }

KernelSpec dislocation_kernel(double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("dislocation_kernel: alpha must be finite");
  KernelSpec spec;
  if (alpha != 0.0) {
    spec.series.cos_coeffs = {alpha / 2.0};
    spec.series.sin_coeffs = {0.0};
  }
  return spec;
}

double elastic_kappa_value(double a, double b, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double c1 = a + b, c2 = b - a;
  const double l1 = std::log(c * c + c1 * c1 * s * s);
  const double l2 = std::log(c * c + c2 * c2 * s * s);
  return -0.25 * (c1 / a) * l1 + 0.25 * (c2 / a) * l2;
}

KernelSpec elastic_kernel(double a, double b) {
  if (!(b > a && a > 0.0))
    throw std::invalid_argument("elastic_kernel: material constants must satisfy b > a > 0");
  constexpr std::size_t m = 512;
  std::vector<double> samples(m);
  for (std::size_t j = 0; j < m; ++j)
    samples[j] = elastic_kappa_value(a, b, 2.0 * kPi * static_cast<double>(j) / m);
  KernelSpec spec;
  spec.series = series_from_samples(samples);
  return spec;
}

}  // namespace ellipselaw
