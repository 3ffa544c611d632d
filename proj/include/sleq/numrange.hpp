#pragma once

#include <optional>
#include <utility>

#include "sleq/model.hpp"
#include "sleq/tolerance.hpp"

namespace sleq {

enum class ConvexityCase { None, A, B };
const char* to_string(ConvexityCase c);

// Convexity of {(f(x), h_1(x), ..., h_p(x))} for affine h_i. V spans N(P)
// with P = [b_1 ... b_p]^T, W spans N(V^T A).
struct ConvexityVerdict {
  bool convex = true;
  ConvexityCase kase = ConvexityCase::None;
  Index rank = 0;
  Matrix V;
  Matrix W;
  std::optional<double> witness_eig;
  Vector vav_eigenvalues;
  bool va_in_range = true;
  // Some eigenvalue of V^T A V or W^T A W sits within two decades of the
  // sign tolerance, so the verdict could flip under perturbation.
  bool boundary = false;
};

ConvexityVerdict classify_convexity(const NumrangeProblem& p, const Tolerances& t = {});

// (mu1, mu2) with mu1 A + mu2 B positive definite, if found.
std::optional<std::pair<double, double>> polyak_sufficient(const QuadForm& f, const QuadForm& h,
                                                           const Tolerances& t = {});

enum class OrthantCase { I, II };
const char* to_string(OrthantCase c);

struct OrthantVerdict {
  OrthantCase kase = OrthantCase::I;
  std::optional<Vector> escape_direction;  // case I: f(tz), h_1(tz) -> -inf
  std::optional<double> alpha;             // case II: A = alpha b_1 b_1^T
};

// Requires {(f, h_1)} to be nonconvex.
OrthantVerdict classify_orthant_p1(const QuadForm& f, const AffineMap& h1, const Tolerances& t = {});

// (f(tz), h_1(tz)).
std::pair<double, double> orthant_curve(const QuadForm& f, const AffineMap& h1, const Vector& z, double t);

}  // namespace sleq
