#pragma once

#include <optional>
#include <string>

#include "sleq/model.hpp"
#include "sleq/tolerance.hpp"

namespace sleq {

enum class SolveStatus { Unbounded, Unattained, Attained };
const char* to_string(SolveStatus s);

// Data certifying that no Kuhn-Tucker point is feasible at the unique dual
// multiplier: h restricted to y0 + V y never vanishes.
struct AttainabilityWitness {
  Vector y0;
  Matrix V;
  double scalar = 0.0;  // h(y0) - (By0+b)^T V (V^T B V)^+ V^T (By0+b)
  std::string label;    // "soluset1" or "soluset2"
};

struct DualProfile {
  PencilInterval interval;
  double mu_star = 0.0;
  double value = -kInf;
  bool finite() const { return std::isfinite(value); }
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Unbounded;
  double value = -kInf;
  std::optional<Vector> x_star;
  std::optional<double> mu_star;
  std::optional<AttainabilityWitness> witness;
  std::optional<PencilInterval> pencil;  // only set on the dual route
  std::string route;                     // "reduced" or "dual"
  std::optional<double> dual_value;
};

// Lagrangian dual function; -inf outside the pencil or when a + mu b is not
// in R(A + mu B).
double dual_value(const Qp1eqcProblem& p, double mu, const Tolerances& t = {});

// Maximizes the dual over the pencil interval using d'(mu) = h(x(mu)).
DualProfile maximize_dual(const Qp1eqcProblem& p, const Tolerances& t = {});

SolveOutcome solve(const Qp1eqcProblem& p, const SolverOptions& opt = {});

Vector recover_primal(const Qp1eqcProblem& p, double mu, const SolverOptions& opt = {});

// Requires the constraint to take both signs and B != 0.
bool verify_global_optimality(const Qp1eqcProblem& p, const Vector& x, double mu,
                              const Tolerances& t = {});

// |primal value - dual maximum|; +inf when the dual is unbounded.
double strong_duality_gap(const Qp1eqcProblem& p, const SolverOptions& opt = {});

// A feasible point with f(x) < target, from constraint sampling followed by
// descent along the constraint manifold. Used to harvest counterexamples.
std::optional<Vector> feasible_point_below(const Qp1eqcProblem& p, double target,
                                           const SolverOptions& opt = {},
                                           const std::optional<Matrix>& bias = std::nullopt);

// Whether B counts as zero relative to the objective scale.
bool constraint_is_affine(const Qp1eqcProblem& p, const Tolerances& t = {});

// {h = 0} = x0 + span(basis) when h is affine, or when h attains 0 only at
// its extremum. Empty optional when {h = 0} is curved.
struct ConstraintFlat {
  Vector x0;
  Matrix basis;
};
std::optional<ConstraintFlat> constraint_flat(const Qp1eqcProblem& p, const Tolerances& t = {});

}  // namespace sleq
