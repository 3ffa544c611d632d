#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sleq/model.hpp"

namespace sleq {

// Anchors are center + anchor_scale*g + bias*(bias_scale*g') with g, g'
// standard Gaussian. The bias columns let callers push samples along a
// known asymptotic direction.
struct SampleOptions {
  double anchor_scale = 1.0;
  std::optional<Vector> center;
  std::optional<Matrix> bias;
  double bias_scale = 1.0;
};

// Points on {h = 0} from exact roots of h along random lines.
// Deterministic for a fixed seed; may return fewer than count points.
std::vector<Vector> sample_constraint(const QuadForm& h, int count, std::uint64_t seed,
                                      const SampleOptions& opt = {},
                                      const Tolerances& t = {});

struct E1Oracle {
  bool refuted = false;  // false means "true so far", never a proof
  std::optional<Vector> witness;
  int samples = 0;
  double min_value = kInf;
  std::optional<Vector> argmin;
};

E1Oracle oracle_e1(const QuadForm& f, const QuadForm& h, int samples, std::uint64_t seed,
                   const SampleOptions& opt = {}, const Tolerances& t = {});

struct E2Oracle {
  bool found = false;
  double mu = 0.0;
};

std::vector<double> mu_grid(double lo, double hi, double step);

// First grid value making lift(f) + mu*lift(h) PSD within tolerance.
E2Oracle oracle_e2(const QuadForm& f, const QuadForm& h, const std::vector<double>& grid,
                   const Tolerances& t = {});

// Image point (f(x), h_1(x), ..., h_p(x)).
Vector joint_image(const NumrangeProblem& p, const Vector& x);

// Exact membership of a point in the joint range: solve the affine part,
// then test the objective value against the range of f on that flat.
bool in_joint_range(const NumrangeProblem& p, const Vector& point, double slack,
                    const Tolerances& t = {});

struct MidpointOracle {
  bool violation = false;
  std::optional<std::pair<Vector, Vector>> pair;  // preimages x, x'
};

MidpointOracle midpoint_oracle(const NumrangeProblem& p, int pairs, std::uint64_t seed,
                               const Tolerances& t = {});

}  // namespace sleq
