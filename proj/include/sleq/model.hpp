#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sleq/symlin.hpp"
#include "sleq/tolerance.hpp"

namespace sleq {

// q(x) = x^T A x + 2 a^T x + c
struct QuadForm {
  SymMatrix A;
  Vector a;
  double c = 0.0;

  QuadForm() = default;
  QuadForm(SymMatrix A_, Vector a_, double c_);

  static QuadForm affine(const Vector& b, double d);
  static QuadForm constant(Index n, double value);

  Index dim() const { return A.dim(); }
  double operator()(const Vector& x) const;
  Vector gradient(const Vector& x) const;  // 2(Ax + a)
  double data_norm() const;                // |A|_inf + |a| + |c|
  bool is_affine(const Tolerances& t = {}) const;
  QuadForm shifted(double delta) const { return {A, a, c + delta}; }
};

QuadForm operator+(const QuadForm& p, const QuadForm& q);
QuadForm operator-(const QuadForm& p, const QuadForm& q);
QuadForm operator*(double s, const QuadForm& q);

double evaluate(const QuadForm& q, const Vector& x);
SymMatrix lift(const QuadForm& q);

// h^2 for affine h, as a quadratic.
QuadForm square_affine(const QuadForm& h);

struct ValueRange {
  double lo = -kInf;
  double hi = kInf;
  bool lo_attained = false;
  bool hi_attained = false;
  std::optional<Vector> lo_point;
  std::optional<Vector> hi_point;

  bool contains(double v, double slack = 0.0) const;
  bool interior_contains(double v, double slack = 0.0) const;
};

ValueRange value_range(const QuadForm& q, const Tolerances& t = {});

QuadForm restrict_to_affine(const QuadForm& q, const Vector& x0, const Matrix& v);

// Unconstrained infimum of q.
struct UnconstrainedMin {
  bool bounded = false;
  double value = -kInf;
  std::optional<Vector> argmin;
};
UnconstrainedMin minimize_unconstrained(const QuadForm& q, const Tolerances& t = {});

// A point with q(y) < target, if one exists. Exact constructions along
// minimizers, negative curvature, or linear descent in N(A).
std::optional<Vector> point_below(const QuadForm& q, double target,
                                  const Tolerances& t = {});

// A point with q(y) = level, found by exact roots of q along lines through
// the origin. Gives up after max_attempts directions.
std::optional<Vector> level_point(const QuadForm& q, double level, std::uint64_t seed,
                                  int max_attempts = 64, const Tolerances& t = {});

// Real roots of a2 t^2 + 2 a1 t + a0 = 0, ascending.
std::vector<double> quadratic_roots(double a2, double a1, double a0);

// Scale used for constraint feasibility: t.feas * (1 + |d| + |b| + |B|).
double feas_tol(const QuadForm& h, const Tolerances& t = {});
// Same, plus the rounding error of evaluating h at x. Matters only for
// minimizers far from the origin.
double feas_tol(const QuadForm& h, const Vector& x, const Tolerances& t = {});

struct Qp1eqcProblem {
  QuadForm objective;
  QuadForm constraint;
};

struct GtrsProblem {
  QuadForm objective;
  QuadForm constraint;
  double l = 0.0;
  double u = 0.0;
};

struct AffineMap {
  Vector b;
  double d = 0.0;
};

struct NumrangeProblem {
  QuadForm f;
  std::vector<AffineMap> affines;
};

// Objective 1/2 z^2 + 1/2 x^T A x - a^T x subject to 1/2|Qx - c|^2 - d - z = 0,
// in variables (x, z).
Qp1eqcProblem build_dwp(const Matrix& q, const Vector& c, double d, const SymMatrix& a,
                        const Vector& lin);

}  // namespace sleq
