#include "ellipselaw/ellipse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

namespace ellipselaw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBetaWall = 1e-6;
constexpr double kSegmentBetaThreshold = 1e-3;
constexpr std::array<double, 5> kEpsLadder = {0.1, 0.05, 0.025, 0.0125, 0.00625};

double hat_factor(std::size_t n) {
  const double f = 2.0 * static_cast<double>(n);
  return (n % 2 == 0) ? f : -f;
}

// Samples psi_hat(t + phi) + eps and its angular derivatives at one node,
// walking the harmonics with the angle-addition recurrence.
struct PsiSample {
  double psi, dpsi, ddpsi;
};

PsiSample sample_psi(const AnisotropySeries& s, double eps, double u, bool want_second) {
  PsiSample out{1.0 + eps, 0.0, 0.0};
  const double c1 = std::cos(u), s1 = std::sin(u);
  double cn = 1.0, sn = 0.0;  // cos/sin of n*u, starting at n = 0
  for (std::size_t n = 1; n <= s.order(); ++n) {
    const double cnext = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = cnext;
    const double a = s.cos_coeffs[n - 1], b = s.sin_coeffs[n - 1];
    const double f = hat_factor(n);
    const double k = 2.0 * static_cast<double>(n);
    out.psi += f * (a * cn + b * sn);
    out.dpsi += f * k * (-a * sn + b * cn);
    if (want_second) out.ddpsi -= f * k * k * (a * cn + b * sn);
  }
  return out;
}

struct GammaDerivs {
  double value = 0.0, db = 0.0, dp = 0.0, dbb = 0.0, dpp = 0.0, dbp = 0.0;
};

// gamma and its (beta, phi) derivatives in one trapezoid pass. The integrand
// uses beta cos^2 t + (2 - beta) sin^2 t = 1 + (beta - 1) cos 2t.
GammaDerivs gamma_derivs(const AnisotropySeries& s, double eps, double beta, double phi,
                         int nodes) {
  GammaDerivs g;
  const double h = 2.0 * kPi / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double t = j * h;
    const PsiSample p = sample_psi(s, eps, 2.0 * (t + phi), true);
    const double c2t = std::cos(2.0 * t);
    const double q = 1.0 + (beta - 1.0) * c2t;
    const double L = std::log(q);
    const double r = c2t / q;
    g.value += p.psi * L;
    g.db += p.psi * r;
    g.dp += p.dpsi * L;
    g.dbb += p.psi * r * r;
    g.dbp += p.dpsi * r;
    g.dpp += p.ddpsi * L;
  }
  const double scale = -2.0 / nodes;
  g.value *= scale;
  g.db *= scale;
  g.dp *= scale;
  g.dbp *= scale;
  g.dpp *= scale;
  g.dbb *= 2.0 / nodes;
  return g;
}

double gamma_value(const AnisotropySeries& s, double eps, double beta, double phi, int nodes) {
  double sum = 0.0;
  const double h = 2.0 * kPi / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double t = j * h;
    const PsiSample p = sample_psi(s, eps, 2.0 * (t + phi), false);
    sum += p.psi * std::log(1.0 + (beta - 1.0) * std::cos(2.0 * t));
  }
  return -2.0 * sum / nodes;
}

// Trapezoid node count: resolve all harmonics and the near-wall log when the
// small semi-axis shrinks (pole at distance ~ sqrt(beta/2) off the real axis).
int effective_nodes(int base, std::size_t order, double beta) {
  const double wall = std::min(beta, 2.0 - beta);
  int n = std::max(base, 4 * static_cast<int>(order) + 64);
  if (wall < 0.04) n = std::max(n, static_cast<int>(std::ceil(48.0 / std::sqrt(wall))));
  if (n % 2 != 0) ++n;
  return std::min(n, 16384);
}

struct Stationary {
  double beta = 1.0;
  double phi = 0.0;
  double gamma = 0.0;
};

// Damped Newton descent on gamma from one start; falls back to steepest
// descent when the (shifted) Hessian step fails to decrease.
Stationary newton_descend(const AnisotropySeries& s, double eps, double beta0, double phi0,
                          int base_nodes) {
  double beta = std::clamp(beta0, kBetaWall, 2.0 - kBetaWall);
  double phi = phi0;
  int nodes = effective_nodes(base_nodes, s.order(), beta);
  GammaDerivs g = gamma_derivs(s, eps, beta, phi, nodes);

  for (int iter = 0; iter < 120; ++iter) {
    const double gnorm = std::max(std::fabs(g.db), std::fabs(g.dp));
    if (gnorm <= 1e-13 * (1.0 + std::fabs(g.value))) break;

    // positive-definite shift of the 2x2 Hessian
    double hbb = g.dbb, hpp = g.dpp, hbp = g.dbp;
    const double tr = hbb + hpp;
    const double det = hbb * hpp - hbp * hbp;
    const double disc = std::sqrt(std::fmax(tr * tr - 4.0 * det, 0.0));
    const double lmin = 0.5 * (tr - disc);
    const double floor_ = 1e-9 * (1.0 + std::fabs(hbb) + std::fabs(hpp));
    if (lmin < floor_) {
      const double shift = floor_ - lmin;
      hbb += shift;
      hpp += shift;
    }
    const double d = hbb * hpp - hbp * hbp;
    double step_b = -(hpp * g.db - hbp * g.dp) / d;
    double step_p = -(hbb * g.dp - hbp * g.db) / d;

    bool accepted = false;
    for (int pass = 0; pass < 2 && !accepted; ++pass) {
      if (pass == 1) {  // steepest descent fallback
        const double gn = std::hypot(g.db, g.dp);
        step_b = -g.db / gn * 0.1;
        step_p = -g.dp / gn * 0.1;
      }
      // trust region: flat phi directions would otherwise blow the step up
      const double snorm = std::fmax(std::fabs(step_b), std::fabs(step_p));
      if (snorm > 0.5) {
        step_b *= 0.5 / snorm;
        step_p *= 0.5 / snorm;
      }
      const double slope0 = g.db * step_b + g.dp * step_p;
      if (!(slope0 < 0.0)) continue;
      // inside the quadratic basin the Armijo test cannot certify the
      // microscopic decrease; take the Newton step outright
      if (pass == 0 && gnorm < 1e-6) {
        beta = std::clamp(beta + step_b, kBetaWall, 2.0 - kBetaWall);
        phi += step_p;
        nodes = effective_nodes(base_nodes, s.order(), beta);
        accepted = true;
        break;
      }
      double s_ = 1.0;
      for (int ls = 0; ls < 60; ++ls, s_ *= 0.5) {
        const double bt = std::clamp(beta + s_ * step_b, kBetaWall, 2.0 - kBetaWall);
        const double pt = phi + s_ * step_p;
        const int nt = effective_nodes(base_nodes, s.order(), bt);
        const double vt = gamma_value(s, eps, bt, pt, nt);
        if (vt <= g.value + 1e-4 * s_ * slope0) {
          beta = bt;
          phi = pt;
          nodes = nt;
          accepted = true;
          break;
        }
        if (std::fabs(bt - beta) + std::fabs(pt - phi) < 1e-15) break;
      }
    }
    if (!accepted) break;
    g = gamma_derivs(s, eps, beta, phi, nodes);
  }
  return {beta, phi, g.value};
}

// Map to the gauge beta <= 1 (small axis first) with phi in (-pi/2, pi/2];
// angles within rounding of the -pi/2 boundary are reported as +pi/2.
Stationary canonicalize(Stationary st) {
  if (st.beta > 1.0) {
    st.beta = 2.0 - st.beta;
    st.phi += kPi / 2.0;
  }
  st.phi = std::remainder(st.phi, kPi);
  if (st.phi <= -kPi / 2.0 + 1e-9) st.phi = std::fmin(st.phi + kPi, kPi / 2.0);
  return st;
}

Stationary multistart(const AnisotropySeries& s, double eps, int base_nodes,
                      const std::optional<Stationary>& warm, bool full_grid) {
  std::optional<Stationary> best;
  auto consider = [&](double b0, double p0) {
    const Stationary st = canonicalize(newton_descend(s, eps, b0, p0, base_nodes));
    if (!best || st.gamma < best->gamma - 1e-12 ||
        (st.gamma < best->gamma + 1e-12 && st.phi < best->phi))
      best = st;
  };
  if (full_grid)
    for (int k = 0; k < 16; ++k) consider(1.0, k * kPi / 16.0);
  if (warm) consider(warm->beta, warm->phi);
  return *best;
}

EllipseShape shape_from(double beta, double phi) {
  EllipseShape shape;
  shape.a1 = std::sqrt(beta);
  shape.a2 = std::sqrt(2.0 - beta);
  shape.phi = (std::fabs(shape.a1 - shape.a2) <= 1e-9) ? 0.0 : phi;
  return shape;
}

double segment_direction(double minor_axis_phi) {
  double dir = std::fmod(minor_axis_phi + kPi / 2.0, kPi);
  if (dir < 0.0) dir += kPi;
  return dir;
}

void check_gamma_args(double beta, int quad_nodes) {
  if (!(beta > 0.0 && beta < 2.0))
    throw std::invalid_argument("gamma: beta must lie in (0, 2)");
  if (quad_nodes < 64 || quad_nodes % 2 != 0)
    throw std::invalid_argument("gamma: quad_nodes must be even and at least 64");
}

}  // namespace

Mat2 EllipseShape::moment_matrix() const {
  const double c = std::cos(phi), s = std::sin(phi);
  const double l1 = a1 * a1, l2 = a2 * a2;
  return {l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c};
}

namespace {
std::string indefinite_message(const PsiClassification& cls) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "outside the convexity range: min psi_hat = %.6g at angle %.6g",
                cls.min_value, cls.argmin_angle);
  return buf;
}
}  // namespace

IndefiniteKernelError::IndefiniteKernelError(const PsiClassification& cls)
    : std::runtime_error(indefinite_message(cls)), classification(cls) {}

SolveFailure::SolveFailure(const std::string& what, double residual)
    : std::runtime_error(what), best_residual(residual) {}

double gamma_objective(const AnisotropySeries& series, double beta, double phi, int quad_nodes) {
  check_gamma_args(beta, quad_nodes);
  return gamma_value(series, 0.0, beta, phi, quad_nodes);
}

double gamma_beta_derivative(const AnisotropySeries& series, double beta, double phi,
                             int quad_nodes) {
  check_gamma_args(beta, quad_nodes);
  double sum = 0.0;
  const double h = 2.0 * kPi / quad_nodes;
  for (int j = 0; j < quad_nodes; ++j) {
    const double t = j * h;
    const PsiSample p = sample_psi(series, 0.0, 2.0 * (t + phi), false);
    const double c2t = std::cos(2.0 * t);
    sum += p.psi * c2t / (1.0 + (beta - 1.0) * c2t);
  }
  return -2.0 * sum / quad_nodes;
}

Mat2 system_residual(const AnisotropySeries& series, const EllipseShape& shape, int quad_nodes) {
  if (!(shape.a1 > 0.0 && shape.a2 > 0.0))
    throw std::invalid_argument("system_residual: degenerate shape (the integrand is singular)");
  if (quad_nodes < 64 || quad_nodes % 2 != 0)
    throw std::invalid_argument("system_residual: quad_nodes must be even and at least 64");
  const Mat2 m = shape.moment_matrix();
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  const double h = 2.0 * kPi / quad_nodes;
  for (int j = 0; j < quad_nodes; ++j) {
    const double t = j * h;
    const Vec2 y{std::cos(t), std::sin(t)};
    const double w = eval_psi_hat(series, t) / m.quad(y);
    sxx += w * y.x * y.x;
    sxy += w * y.x * y.y;
    syy += w * y.y * y.y;
  }
  const double scale = 2.0 / quad_nodes;  // (1/pi) * (2pi/nodes)
  return {sxx * scale - 1.0, sxy * scale, syy * scale - 1.0};
}

Prediction solve(const AnisotropySeries& series, const SolveOptions& opts) {
  const int grid = std::max(4 * static_cast<int>(series.order()) + 16, 2048);
  const PsiClassification cls = classify_psi(series, grid);
  if (cls.label == PsiLabel::Indefinite) throw IndefiniteKernelError(cls);

  Prediction out;

  if (cls.label == PsiLabel::StrictlyPositive) {
    const Stationary st = multistart(series, 0.0, opts.quad_nodes, std::nullopt, true);
    const EllipseShape shape = shape_from(st.beta, st.phi);
    const int check_nodes = effective_nodes(opts.quad_nodes, series.order(), st.beta);
    const double res = system_residual(series, shape, check_nodes).sup_norm();
    if (res > opts.residual_tol) {
      char buf[96];
      std::snprintf(buf, sizeof(buf),
                    "solve: stationarity residual %.3e exceeds tolerance after multistart", res);
      throw SolveFailure(buf, res);
    }
    out.law = shape;
    return out;
  }

  // Degenerate profile: continuation along psi_hat + eps, tracking the small
  // squared semi-axis beta(eps).
  std::optional<Stationary> prev;
  std::vector<Stationary> path;
  for (double eps : kEpsLadder) {
    const Stationary st = multistart(series, eps, opts.quad_nodes, prev, !prev.has_value());
    out.continuation.push_back({eps, st.beta});
    path.push_back(st);
    prev = st;
  }

  const Stationary& last = path[path.size() - 1];
  const Stationary& before = path[path.size() - 2];
  bool monotone = true;
  for (std::size_t i = 1; i < path.size(); ++i)
    if (path[i].beta >= path[i - 1].beta) monotone = false;
  const double beta_limit = std::fmax(0.0, 2.0 * last.beta - before.beta);

  if (monotone && beta_limit < kSegmentBetaThreshold) {
    out.law = SegmentLaw{segment_direction(last.phi)};
    return out;
  }

  // Ellipse survives the limit: extrapolate the ladder to eps = 0 and polish
  // there (gamma stays C^1 at eps = 0; only strong convexity may be lost).
  const double beta_guess = std::clamp(beta_limit, 2.0 * kBetaWall, 1.0);
  const double phi_guess = last.phi + std::remainder(last.phi - before.phi, kPi);
  const Stationary polished =
      canonicalize(newton_descend(series, 0.0, beta_guess, phi_guess, opts.quad_nodes));

  Stationary chosen = polished;
  const EllipseShape polished_shape = shape_from(polished.beta, polished.phi);
  const int check_nodes = effective_nodes(opts.quad_nodes, series.order(), polished.beta);
  const double res = system_residual(series, polished_shape, check_nodes).sup_norm();
  if (!(res <= std::max(opts.residual_tol, 1e-7)))
    chosen = canonicalize({beta_guess, phi_guess, polished.gamma});

  if (chosen.beta < kSegmentBetaThreshold) {
    out.law = SegmentLaw{segment_direction(chosen.phi)};
    return out;
  }
  out.law = shape_from(chosen.beta, chosen.phi);
  return out;
}

}  // namespace ellipselaw
