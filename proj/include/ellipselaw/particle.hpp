#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "ellipselaw/anisotropy.hpp"
#include "ellipselaw/ellipse.hpp"
#include "ellipselaw/geometry.hpp"

namespace ellipselaw {

/// n equally weighted points in the plane (the empirical measure carries 1/n each).
struct ParticleConfig {
  std::vector<Vec2> positions;
  std::size_t size() const { return positions.size(); }
};

struct QuadraticConfinement {};
struct PowerConfinement {
  double p = 2.0;
};
struct EllipticalWell {
  EllipseShape domain;
};
using ConfinementSpec = std::variant<QuadraticConfinement, PowerConfinement, EllipticalWell>;

struct DescentOptions {
  int max_iters = 2000;
  double step0 = 0.5;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  double grad_tol = 1e-4;  // sup-norm of the per-particle force n * dE/dx_j
  std::uint64_t seed = 0;
};

/// (1/n^2) sum_{j != k} W(x_j - x_k) + (1/n) sum_j V(x_j). A coincident pair
/// yields +infinity (W(0) = +inf), reported as the overflow value, not a crash.
/// The elliptical well contributes zero (feasibility is enforced by projection
/// inside minimize).
double discrete_energy(const ParticleConfig& cfg, const KernelSpec& kernel,
                       const ConfinementSpec& conf);

/// Exact gradient of discrete_energy with respect to each position.
std::vector<Vec2> discrete_gradient(const ParticleConfig& cfg, const KernelSpec& kernel,
                                    const ConfinementSpec& conf);

struct IterationRecord {
  int iter;
  double energy;
  double grad_norm;  // sup-norm of the per-particle force
  double step;
};

struct MinimizeResult {
  ParticleConfig config;
  std::vector<IterationRecord> log;
  bool converged = false;
  bool stalled = false;  // line-search step collapsed below 1e-14
};

/// Armijo-backtracking gradient descent on the per-particle forces; for the
/// elliptical well every trial step is followed by closest-point projection
/// onto the domain. Steps that would bring a pair closer than 1e-9 are
/// rejected. Energy is non-increasing across accepted steps, and trajectories
/// are bit-deterministic for fixed inputs.
MinimizeResult minimize(const ParticleConfig& start, const KernelSpec& kernel,
                        const ConfinementSpec& conf, const DescentOptions& opts = {});

/// (1/n) sum_j x_j x_j^T.
Mat2 second_moments(const ParticleConfig& cfg);

/// Seeded uniform sample of the disk of the given radius (deterministic across
/// platforms: raw mt19937_64 draws mapped to doubles by hand).
ParticleConfig random_disk_config(std::size_t n, std::uint64_t seed, double radius);

/// Closest point of the closed elliptic domain (identity for interior points);
/// 1D Newton/bisection on the Lagrange multiplier.
Vec2 project_to_ellipse(const EllipseShape& domain, Vec2 p);

}  // namespace ellipselaw
