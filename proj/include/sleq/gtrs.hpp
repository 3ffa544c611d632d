#pragma once

#include <optional>

#include "sleq/model.hpp"
#include "sleq/qp1eqc.hpp"
#include "sleq/tolerance.hpp"

namespace sleq {

enum class GtrsSource { Interior, LowerBoundary, UpperBoundary };
const char* to_string(GtrsSource s);

struct GtrsOutcome {
  SolveStatus status = SolveStatus::Unbounded;
  double value = -kInf;
  std::optional<Vector> x_star;
  // Multiplier of h - l (or h - u) on the decisive boundary; 0 for Interior.
  std::optional<double> mu_star;
  GtrsSource source = GtrsSource::Interior;
  std::optional<SolveOutcome> lower;
  std::optional<SolveOutcome> upper;
};

struct IntervalSLemmaVerdict {
  bool equivalence_holds = false;
  bool i1_true = false;
  bool i2_true = false;
  std::optional<double> mu;  // mu > 0 weighs l - h, mu < 0 weighs h - u
  std::optional<double> exception_nu;
  std::optional<Vector> counterexample;
  std::optional<Matrix> exception_matrix;
};

// Some x with l < h(x) < u.
bool strict_feasibility(const GtrsProblem& p, const Tolerances& t = {});

GtrsOutcome solve_gtrs(const GtrsProblem& p, const SolverOptions& opt = {});

// Lift of f(V y + s b / (2 b^T b)) + nu (s - l + d)(s - u + d) in (y, s), where
// h = s + d on that parametrization. PSD for some nu >= 0 marks the
// exceptional case. Needs B = 0 and b != 0.
SymMatrix interval_exception_matrix(const GtrsProblem& p, double nu, const Tolerances& t = {});

IntervalSLemmaVerdict interval_slemma(const GtrsProblem& p, const SolverOptions& opt = {});

// PSD check of lift(f + mu_-(h - u) + mu_+(l - h)).
bool interval_certifies(const GtrsProblem& p, double mu, const Tolerances& t = {});

}  // namespace sleq
