#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "ellipselaw/particle.hpp"
#include "ellipselaw/potential.hpp"
#include "ellipselaw/quadrature.hpp"

using namespace ellipselaw;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

ParticleConfig seeded_config(std::size_t n, std::uint64_t seed) {
  return random_disk_config(n, seed, kSqrt2);
}

}  // namespace

TEST_CASE("discrete energy hand values") {
  const KernelSpec coulomb = coulomb_kernel();
  ParticleConfig pair{{{0.0, 0.0}, {1.0, 0.0}}};
  CHECK(discrete_energy(pair, coulomb, QuadraticConfinement{}) ==
        doctest::Approx(0.5).epsilon(1e-14));

  ParticleConfig single{{{0.0, 0.0}}};
  CHECK(discrete_energy(single, coulomb, QuadraticConfinement{}) == 0.0);

  const KernelSpec disl1 = dislocation_kernel(1.0);
  ParticleConfig vertical{{{0.0, 0.0}, {0.0, 1.0}}};
  ParticleConfig horizontal{{{0.0, 0.0}, {1.0, 0.0}}};
  CHECK(discrete_energy(vertical, disl1, QuadraticConfinement{}) ==
        doctest::Approx(0.25).epsilon(1e-13));
  CHECK(discrete_energy(horizontal, disl1, QuadraticConfinement{}) ==
        doctest::Approx(0.75).epsilon(1e-13));

  ParticleConfig coincident{{{0.3, 0.3}, {0.3, 0.3}}};
  CHECK(std::isinf(discrete_energy(coincident, coulomb, QuadraticConfinement{})));
}

TEST_CASE("gradient symmetry and finite differences") {
  const KernelSpec disl = dislocation_kernel(0.5);
  ParticleConfig pair{{{0.7, 0.0}, {-0.7, 0.0}}};
  const auto g = discrete_gradient(pair, disl, QuadraticConfinement{});
  CHECK(g[0].x == doctest::Approx(-g[1].x).epsilon(1e-14));
  CHECK(g[0].y == doctest::Approx(-g[1].y).epsilon(1e-14));

  ParticleConfig cfg = seeded_config(10, 123);
  const double h = 1e-6;
  for (const ConfinementSpec& conf :
       {ConfinementSpec{QuadraticConfinement{}}, ConfinementSpec{PowerConfinement{3.0}}}) {
    const auto grad = discrete_gradient(cfg, disl, conf);
    double max_rel = 0.0;
    for (std::size_t j = 0; j < cfg.size(); ++j) {
      for (int axis = 0; axis < 2; ++axis) {
        ParticleConfig up = cfg, dn = cfg;
        (axis == 0 ? up.positions[j].x : up.positions[j].y) += h;
        (axis == 0 ? dn.positions[j].x : dn.positions[j].y) -= h;
        const double fd =
            (discrete_energy(up, disl, conf) - discrete_energy(dn, disl, conf)) / (2.0 * h);
        const double an = axis == 0 ? grad[j].x : grad[j].y;
        max_rel = std::fmax(max_rel, std::fabs(an - fd) / (1.0 + std::fabs(fd)));
      }
    }
    CHECK(max_rel < 1e-6);
  }
}

TEST_CASE("interaction forces obey action-reaction") {
  const KernelSpec disl = dislocation_kernel(0.7);
  ParticleConfig cfg = seeded_config(12, 5);
  const auto grad = discrete_gradient(cfg, disl, QuadraticConfinement{});
  // subtract the analytic confinement part to isolate the interaction forces
  Vec2 total{};
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    total += grad[j] - cfg.positions[j] * (2.0 / static_cast<double>(cfg.size()));
  }
  CHECK(std::fabs(total.x) < 1e-12);
  CHECK(std::fabs(total.y) < 1e-12);
}

TEST_CASE("permutation and translation identities") {
  const KernelSpec disl = dislocation_kernel(0.5);
  ParticleConfig cfg = seeded_config(14, 9);
  const double e0 = discrete_energy(cfg, disl, QuadraticConfinement{});

  ParticleConfig shuffled = cfg;
  std::mt19937_64 rng(4);
  std::shuffle(shuffled.positions.begin(), shuffled.positions.end(), rng);
  CHECK(discrete_energy(shuffled, disl, QuadraticConfinement{}) ==
        doctest::Approx(e0).epsilon(1e-12));

  const Vec2 t{0.4, -0.2};
  ParticleConfig moved = cfg;
  Vec2 mean{};
  for (Vec2& p : moved.positions) {
    mean += p;
    p += t;
  }
  mean = mean * (1.0 / static_cast<double>(cfg.size()));
  const double expected_delta = 2.0 * t.dot(mean) + t.norm2();
  CHECK(discrete_energy(moved, disl, QuadraticConfinement{}) - e0 ==
        doctest::Approx(expected_delta).epsilon(1e-12));
}

TEST_CASE("minimize rejects out-of-range options") {
  DescentOptions bad;
  bad.armijo_c = 1.5;
  CHECK_THROWS_AS(minimize(seeded_config(2, 1), coulomb_kernel(), QuadraticConfinement{}, bad),
                  std::invalid_argument);
  DescentOptions bad2;
  bad2.shrink = 1.0;
  CHECK_THROWS_AS(minimize(seeded_config(2, 1), coulomb_kernel(), QuadraticConfinement{}, bad2),
                  std::invalid_argument);
  CHECK_THROWS_AS(minimize(seeded_config(2, 1), coulomb_kernel(), PowerConfinement{-1.0},
                           DescentOptions{}),
                  std::invalid_argument);
}

TEST_CASE("minimize: single particle reaches the confinement minimum") {
  DescentOptions opts;
  opts.grad_tol = 1e-8;
  opts.max_iters = 200;
  const MinimizeResult res =
      minimize(ParticleConfig{{{0.9, -0.4}}}, coulomb_kernel(), QuadraticConfinement{}, opts);
  CHECK(res.converged);
  CHECK(res.config.positions[0].norm() < 1e-8);
}

TEST_CASE("minimize: energy monotone and bit-deterministic") {
  const KernelSpec disl = dislocation_kernel(0.5);
  DescentOptions opts;
  opts.max_iters = 120;
  opts.seed = 42;
  const ParticleConfig start = seeded_config(40, 42);
  const MinimizeResult a = minimize(start, disl, QuadraticConfinement{}, opts);
  const MinimizeResult b = minimize(start, disl, QuadraticConfinement{}, opts);

  REQUIRE(a.log.size() >= 2);
  for (std::size_t i = 1; i < a.log.size(); ++i) CHECK(a.log[i].energy <= a.log[i - 1].energy);

  REQUIRE(a.config.size() == b.config.size());
  CHECK(std::memcmp(a.config.positions.data(), b.config.positions.data(),
                    a.config.size() * sizeof(Vec2)) == 0);
}

TEST_CASE("minimize: unreachable tolerance ends in a clean stall") {
  DescentOptions opts;
  opts.grad_tol = 1e-300;  // below attainable precision
  opts.max_iters = 20000;
  const MinimizeResult res =
      minimize(seeded_config(3, 1), coulomb_kernel(), QuadraticConfinement{}, opts);
  CHECK(res.stalled);
  CHECK(!res.converged);
  // the stalled configuration is still a minimizer for practical purposes
  REQUIRE(!res.log.empty());
  CHECK(res.log.back().grad_norm < 1e-6);
}

TEST_CASE("elliptical well keeps every particle inside the domain") {
  const EllipseShape domain{0.4, 0.8, 0.5};
  DescentOptions opts;
  opts.max_iters = 300;
  const MinimizeResult res = minimize(seeded_config(60, 3), coulomb_kernel(),
                                      EllipticalWell{domain}, opts);
  for (const Vec2& p : res.config.positions) {
    const Vec2 q = rotate(p, -domain.phi);
    const double u = q.x / domain.a1, v = q.y / domain.a2;
    CHECK(u * u + v * v <= 1.0 + 1e-9);
  }
}

TEST_CASE("project_to_ellipse") {
  const EllipseShape domain{0.0, 2.0, 1.0};
  const Vec2 inside{0.5, 0.3};
  const Vec2 kept = project_to_ellipse(domain, inside);
  CHECK(kept.x == inside.x);
  CHECK(kept.y == inside.y);

  const Vec2 outside{3.0, 2.0};
  const Vec2 proj = project_to_ellipse(domain, outside);
  const double q = proj.x * proj.x / 4.0 + proj.y * proj.y;
  CHECK(q == doctest::Approx(1.0).epsilon(1e-10));
  // displacement is along the boundary normal (proj_x/a1^2, proj_y/a2^2)
  const Vec2 normal{proj.x / 4.0, proj.y};
  const Vec2 diff = outside - proj;
  const double cross = normal.x * diff.y - normal.y * diff.x;
  CHECK(std::fabs(cross) < 1e-9);

  const Vec2 axis_point{5.0, 0.0};
  const Vec2 axis_proj = project_to_ellipse(domain, axis_point);
  CHECK(axis_proj.x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::fabs(axis_proj.y) < 1e-12);
}

TEST_CASE("second moments") {
  CHECK(second_moments(ParticleConfig{{{1.0, 0.0}, {-1.0, 0.0}}}).xx ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(second_moments(ParticleConfig{{{1.0, 0.0}, {-1.0, 0.0}}}).yy == 0.0);
  CHECK(second_moments(ParticleConfig{{{0.0, 0.0}}}).sup_norm() == 0.0);

  // quasi-uniform disk points (sunflower spiral): moments approach r^2/4
  ParticleConfig sunflower;
  const std::size_t n = 100000;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt((i + 0.5) / n);
    const double t = golden * static_cast<double>(i);
    sunflower.positions.push_back({r * std::cos(t), r * std::sin(t)});
  }
  const Mat2 m = second_moments(sunflower);
  CHECK(m.xx == doctest::Approx(0.25).epsilon(0.01));
  CHECK(m.yy == doctest::Approx(0.25).epsilon(0.01));
  CHECK(std::fabs(m.xy) < 0.005);
}

TEST_CASE("n=400 dislocation minimizer matches the ellipse-law moments") {
  const KernelSpec disl = dislocation_kernel(0.5);
  DescentOptions opts;
  opts.seed = 42;
  opts.max_iters = 300;  // the moment statistics settle long before full convergence
  const MinimizeResult res =
      minimize(seeded_config(400, 42), disl, QuadraticConfinement{}, opts);
  const Mat2 m = second_moments(res.config);
  CHECK(m.xx == doctest::Approx(0.125).epsilon(0.05));
  CHECK(m.yy == doctest::Approx(0.375).epsilon(0.05));
}

TEST_CASE("n=200 degenerate dislocation collapses toward the vertical segment") {
  const KernelSpec disl1 = dislocation_kernel(1.0);
  DescentOptions opts;
  opts.seed = 7;
  opts.max_iters = 800;
  const MinimizeResult res =
      minimize(seeded_config(200, 7), disl1, QuadraticConfinement{}, opts);
  const Mat2 m = second_moments(res.config);
  CHECK(m.xx <= 0.01);
  CHECK(m.yy == doctest::Approx(0.5).epsilon(0.10));
}

TEST_CASE("discrete minima approach the continuum energy from below") {
  const KernelSpec disl = dislocation_kernel(0.5);
  const EllipseShape shape{0.0, std::sqrt(0.5), std::sqrt(1.5)};

  // continuum value: I = c0 + 1/4 with c0 the center potential (the interior
  // potential is c0 + (1/2) G x . x, and the ellipse-law moments are M/4)
  const double c0 = center_potential(disl.series, shape, 2048);
  const double continuum = c0 + 0.25;

  double prev_gap = 1e300;
  double final_gap = 0.0;
  for (std::size_t n : {100u, 200u, 400u}) {
    DescentOptions opts;
    opts.seed = 11;
    opts.max_iters = 300;
    const MinimizeResult res =
        minimize(seeded_config(n, 11), disl, QuadraticConfinement{}, opts);
    const double energy = discrete_energy(res.config, disl, QuadraticConfinement{});
    const double gap = std::fabs(energy - continuum);
    CHECK(gap < prev_gap);
    prev_gap = gap;
    final_gap = gap;
  }
  CHECK(final_gap / continuum < 0.05);
}
