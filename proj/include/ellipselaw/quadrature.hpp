#pragma once

#include <numbers>
#include <vector>

namespace ellipselaw {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given size (nodes computed once by Newton iteration).
const GaussRule& gauss_legendre(int n);

/// Mean of a 2pi-periodic function over one period by the n-point trapezoid
/// rule; spectrally accurate for analytic integrands.
template <class F>
double periodic_mean(int n, F&& f) {
  const double h = 2.0 * std::numbers::pi / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += f(j * h);
  return sum / n;
}

template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

/// Integrate over [a, b] with dyadic panels accumulating at the endpoint `sing`
/// (one of a or b); handles integrable endpoint singularities (log, sqrt).
template <class F>
double integrate_graded(F&& f, double a, double b, double sing, int depth = 36, int gl = 16) {
  const bool at_left = std::abs(sing - a) <= std::abs(sing - b);
  double total = 0.0;
  double w = (b - a);
  // panels [sing + w/2^{k+1}, sing + w/2^k] toward the singular end
  double hi = at_left ? b : a;  // signed walk from the far end toward sing
  for (int k = 0; k < depth; ++k) {
    w *= 0.5;
    const double lo = at_left ? a + w : b - w;
    total += at_left ? integrate_gl(f, lo, hi, gl) : integrate_gl(f, hi, lo, gl);
    hi = lo;
  }
  // innermost sliver: GL nodes stay interior, so integrable singularities are fine
  total += at_left ? integrate_gl(f, a, hi, gl) : integrate_gl(f, hi, b, gl);
  return total;
}

/// Composite Simpson rule with n (even) subintervals.
template <class F>
double integrate_simpson(F&& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace ellipselaw
