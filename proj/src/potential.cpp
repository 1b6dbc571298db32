#include "ellipselaw/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ellipselaw/quadrature.hpp"

namespace ellipselaw {

namespace {

constexpr double kPi = std::numbers::pi;

double bessel_j1_series(double r) {
  // J1(r) = (r/2) sum_k (-1)^k (r^2/4)^k / (k! (k+1)!)
  const double z = 0.25 * r * r;
  double term = 0.5 * r;
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -z / (static_cast<double>(k) * (k + 1.0));
    sum += term;
    if (std::fabs(term) < 1e-18 * (1.0 + std::fabs(sum))) break;
  }
  return sum;
}

double bessel_j1_asymptotic(double r) {
  // J1(r) ~ sqrt(2/(pi r)) [P cos chi - Q sin chi], chi = r - 3pi/4, with the
  // standard semiconvergent series for mu = 4 (truncated at the smallest term).
  constexpr double mu = 4.0;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * r);
    if (std::fabs(term) >= prev) break;  // asymptotic tail started growing
    const int phase = (k / 2) % 2;       // + + - - + + ...
    const double signed_term = phase ? -term : term;
    if (k % 2 == 0)
      p += signed_term;
    else
      q += signed_term;
    prev = std::fabs(term);
    if (prev < 1e-17) break;
  }
  const double chi = r - 0.75 * kPi;
  return std::sqrt(2.0 / (kPi * r)) * (p * std::cos(chi) - q * std::sin(chi));
}

void check_shape(const EllipseShape& shape, const char* who) {
  if (!(shape.a1 > 0.0 && shape.a2 > 0.0))
    throw std::invalid_argument(std::string(who) + ": degenerate shape");
}

// Squared ellipse coordinate |D(a)^{-1} R^T x|^2; <= 1 exactly on E.
double ellipse_coordinate2(const EllipseShape& shape, Vec2 x) {
  const Vec2 xr = rotate(x, -shape.phi);
  const double u = xr.x / shape.a1, v = xr.y / shape.a2;
  return u * u + v * v;
}

// Interior (linear) part of the gradient: -(1/pi) int psi (x.y) y / (M y.y) dt.
Vec2 gradient_linear_part(const AnisotropySeries& series, const Mat2& m, Vec2 x, int nodes) {
  double gx = 0.0, gy = 0.0;
  const double h = 2.0 * kPi / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double t = j * h;
    const Vec2 y{std::cos(t), std::sin(t)};
    const double w = eval_psi_hat(series, t) * x.dot(y) / m.quad(y);
    gx += w * y.x;
    gy += w * y.y;
  }
  const double scale = -2.0 / nodes;
  return {gx * scale, gy * scale};
}

// Exterior correction: (1/pi) int psi sign(x.y) sqrt(N_+) / (M y.y) y dt over
// the angular set where N(t) = (x.y)^2 - M y.y > 0, with the crossing angles in
// closed form and a sine substitution that makes the integrand analytic.
Vec2 gradient_exterior_correction(const AnisotropySeries& series, const Mat2& m, Vec2 x) {
  const double A = 0.5 * x.norm2() - 0.5 * m.trace();
  const double B = 0.5 * (x.x * x.x - x.y * x.y) - 0.5 * (m.xx - m.yy);
  const double C = x.x * x.y - m.xy;
  const double rho = std::hypot(B, C);
  if (A + rho <= 0.0 || rho == 0.0) return {};  // N <= 0 everywhere: x in E
  const double c0 = std::clamp(-A / rho, -1.0, 1.0);
  const double ustar = std::acos(c0);
  const double delta = std::atan2(C, B);
  const double t_mid = 0.5 * delta;
  const double t_half = 0.5 * ustar;

  auto segment_n = [&](double t) {
    return A + B * std::cos(2.0 * t) + C * std::sin(2.0 * t);
  };

  const GaussRule& rule = gauss_legendre(48);
  double gx = 0.0, gy = 0.0;
  for (int i = 0; i < 48; ++i) {
    const double v = 0.5 * kPi * rule.nodes[i];
    const double t = t_mid + t_half * std::sin(v);
    const double jac = t_half * std::cos(v) * 0.5 * kPi;
    const Vec2 y{std::cos(t), std::sin(t)};
    const double n_val = std::fmax(segment_n(t), 0.0);
    const double sgn = (x.dot(y) >= 0.0) ? 1.0 : -1.0;
    const double w = eval_psi_hat(series, t) * sgn * std::sqrt(n_val) / m.quad(y) * jac *
                     rule.weights[i];
    gx += w * y.x;
    gy += w * y.y;
  }
  // the antipodal interval contributes identically
  return {2.0 * gx / kPi, 2.0 * gy / kPi};
}

int exterior_nodes(const EllipseShape& shape, int quad_nodes) {
  // resolve the log-kernel pole structure when one axis is small
  const double wall = std::min(shape.a1, shape.a2);
  int n = quad_nodes;
  if (wall < 0.2) n = std::max(n, static_cast<int>(std::ceil(48.0 / wall)));
  if (n % 2 != 0) ++n;
  return std::min(n, 16384);
}

double segment_log_potential(double s, int quad_nodes) {
  // -int log|s - t| rho(t) dt  with  t = sqrt2 sin u: -(2/pi) int log|s - sqrt2 sin u| cos^2 u du
  const double sqrt2 = std::numbers::sqrt2;
  auto f = [&](double u) {
    const double c = std::cos(u);
    return -std::log(std::fabs(s - sqrt2 * std::sin(u))) * c * c * 2.0 / kPi;
  };
  const int gl = std::max(16, quad_nodes / 32);
  if (std::fabs(s) < sqrt2) {
    const double ustar = std::asin(s / sqrt2);
    return integrate_graded(f, -kPi / 2.0, ustar, ustar, 40, gl) +
           integrate_graded(f, ustar, kPi / 2.0, ustar, 40, gl);
  }
  // no interior singularity; refine toward the near endpoint where the
  // integrand is merely close to singular
  const double near_end = (s > 0.0) ? kPi / 2.0 : -kPi / 2.0;
  return integrate_graded(f, -kPi / 2.0, kPi / 2.0, near_end, 40, gl);
}

}  // namespace

double bessel_j1(double r) {
  if (!std::isfinite(r)) throw std::invalid_argument("bessel_j1: argument must be finite");
  const double a = std::fabs(r);
  const double v = (a < 10.0) ? bessel_j1_series(a) : bessel_j1_asymptotic(a);
  return (r < 0.0) ? -v : v;
}

double tail_factor(double alpha_val) {
  if (!(alpha_val >= 0.0)) throw std::invalid_argument("tail_factor: argument must be >= 0");
  if (alpha_val <= 1.0) return alpha_val;
  return 1.0 / (alpha_val + std::sqrt(alpha_val * alpha_val - 1.0));
}

Vec2 grad_potential(const AnisotropySeries& series, const EllipseShape& shape, Vec2 x,
                    int quad_nodes) {
  check_shape(shape, "grad_potential");
  const Mat2 m = shape.moment_matrix();
  const int nodes = exterior_nodes(shape, quad_nodes);
  Vec2 g = gradient_linear_part(series, m, x, nodes);
  if (ellipse_coordinate2(shape, x) > 1.0) g += gradient_exterior_correction(series, m, x);
  return g;
}

double radial_residual(const AnisotropySeries& series, const EllipseShape& shape, Vec2 x,
                       int quad_nodes) {
  return grad_potential(series, shape, x, quad_nodes).dot(x) + x.norm2();
}

double disk_coulomb_potential(Vec2 x, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("disk_coulomb_potential: radius must be positive");
  const double d = x.norm();
  if (d < r) return 0.5 - 0.5 * d * d / (r * r) - std::log(r);
  return -std::log(d);
}

double boundary_potential(const AnisotropySeries& series, const EllipseShape& shape, Vec2 x,
                          int quad_nodes) {
  check_shape(shape, "boundary_potential");
  if (quad_nodes < 256)
    throw std::invalid_argument("boundary_potential: quad_nodes must be at least 256");
  const double q = std::sqrt(ellipse_coordinate2(shape, x));
  if (std::fabs(q - 1.0) * std::min(shape.a1, shape.a2) < 1e-6)
    throw std::invalid_argument("boundary_potential: x is within 1e-6 of the boundary");
  return periodic_mean(quad_nodes, [&](double t) {
    const Vec2 y = rotate({shape.a1 * std::cos(t), shape.a2 * std::sin(t)}, shape.phi);
    const Vec2 z = x - y;
    return -std::log(z.norm()) + eval_kappa(series, z.angle());
  });
}

double segment_potential(const AnisotropySeries& series, double direction, double s,
                         int quad_nodes) {
  if (quad_nodes < 256)
    throw std::invalid_argument("segment_potential: quad_nodes must be at least 256");
  return segment_log_potential(s, quad_nodes) + eval_kappa(series, direction);
}

double center_potential(const AnisotropySeries& series, const EllipseShape& shape,
                        int quad_nodes) {
  check_shape(shape, "center_potential");
  // (W * chi)(0) = 1/2 + mean_t [ kappa(R D(a) u(t)) - log|D(a) u(t)| ]
  return 0.5 + periodic_mean(quad_nodes, [&](double t) {
           const Vec2 du{shape.a1 * std::cos(t), shape.a2 * std::sin(t)};
           const Vec2 y = rotate(du, shape.phi);
           return eval_kappa(series, y.angle()) - 0.5 * std::log(du.norm2());
         });
}

Mat2 interior_gradient_map(const AnisotropySeries& series, const EllipseShape& shape,
                           int quad_nodes) {
  check_shape(shape, "interior_gradient_map");
  const Mat2 m = shape.moment_matrix();
  const int nodes = exterior_nodes(shape, quad_nodes);
  double gxx = 0.0, gxy = 0.0, gyy = 0.0;
  const double h = 2.0 * kPi / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double t = j * h;
    const Vec2 y{std::cos(t), std::sin(t)};
    const double w = eval_psi_hat(series, t) / m.quad(y);
    gxx += w * y.x * y.x;
    gxy += w * y.x * y.y;
    gyy += w * y.y * y.y;
  }
  const double scale = -2.0 / nodes;
  return {gxx * scale, gxy * scale, gyy * scale};
}

ELReport el_scan(const AnisotropySeries& series, const EllipseShape& shape,
                 const ProbeCounts& counts) {
  check_shape(shape, "el_scan");
  ELReport report;
  const Mat2 g = interior_gradient_map(series, shape, counts.quad_nodes);
  const double c0 = center_potential(series, shape, std::max(counts.quad_nodes, 1024));

  // interior: polar grid scaled to 0.95 E; residual grad + x = (G + I) x
  double max_grad = 0.0;
  double c_sum = 0.0;
  int c_count = 0;
  for (int i = 0; i < counts.radii; ++i) {
    const double r = 0.95 * (i + 1.0) / counts.radii;
    for (int j = 0; j < counts.angles; ++j) {
      const double t = 2.0 * kPi * j / counts.angles;
      const Vec2 x = rotate({shape.a1 * r * std::cos(t), shape.a2 * r * std::sin(t)}, shape.phi);
      const Vec2 res = g.apply(x) + x;
      max_grad = std::fmax(max_grad, res.norm());
      c_sum += c0 + 0.5 * g.quad(x) + 0.5 * x.norm2();
      ++c_count;
    }
  }
  report.interior_max_grad_residual = max_grad;
  report.constant_c = c_sum / c_count;

  // exterior: dilations of the boundary spanning [1.05, 3]
  double min_radial = std::numeric_limits<double>::infinity();
  for (int i = 0; i < counts.radii; ++i) {
    const double sf = 1.05 + (3.0 - 1.05) * i / (counts.radii - 1.0);
    for (int j = 0; j < counts.angles; ++j) {
      const double t = 2.0 * kPi * j / counts.angles;
      const Vec2 x =
          rotate({shape.a1 * sf * std::cos(t), shape.a2 * sf * std::sin(t)}, shape.phi);
      min_radial = std::fmin(min_radial, radial_residual(series, shape, x, counts.quad_nodes));
    }
  }
  report.exterior_min_radial_residual = min_radial;
  return report;
}

ELReport el_scan(const AnisotropySeries& series, const SegmentLaw& segment,
                 const ProbeCounts& counts) {
  ELReport report;
  const double sqrt2 = std::numbers::sqrt2;
  std::vector<double> values(counts.segment_points);
  for (int i = 0; i < counts.segment_points; ++i) {
    const double s =
        -0.95 * sqrt2 + 1.9 * sqrt2 * i / (counts.segment_points - 1.0);
    values[i] = segment_potential(series, segment.direction, s, counts.quad_nodes) + 0.5 * s * s;
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double max_dev = 0.0;
  for (double v : values) max_dev = std::fmax(max_dev, std::fabs(v - mean));
  report.interior_max_grad_residual = max_dev;
  report.constant_c = mean;

  double min_ext = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 16; ++i) {
    const double s = sqrt2 * (1.05 + (3.0 / sqrt2 - 1.05) * i / 15.0);
    for (double sgn : {-1.0, 1.0}) {
      const double v =
          segment_potential(series, segment.direction, sgn * s, counts.quad_nodes) +
          0.5 * s * s - mean;
      min_ext = std::fmin(min_ext, v);
    }
  }
  report.exterior_min_radial_residual = min_ext;
  return report;
}

ELReport el_scan(const AnisotropySeries& series, const Prediction& prediction,
                 const ProbeCounts& counts) {
  if (prediction.is_ellipse()) return el_scan(series, prediction.ellipse(), counts);
  return el_scan(series, prediction.segment(), counts);
}

}  // namespace ellipselaw
