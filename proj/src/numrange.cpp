#include "sleq/numrange.hpp"

#include <cmath>
#include <numbers>

#include "sleq/errors.hpp"

namespace sleq {

const char* to_string(ConvexityCase c) {
  switch (c) {
    case ConvexityCase::None: return "none";
    case ConvexityCase::A: return "a";
    case ConvexityCase::B: return "b";
  }
  return "?";
}

const char* to_string(OrthantCase c) { return c == OrthantCase::I ? "i" : "ii"; }

namespace {

Matrix rows_of(const NumrangeProblem& p) {
  const Index n = p.f.dim();
  Matrix m(static_cast<Index>(p.affines.size()), n);
  for (std::size_t i = 0; i < p.affines.size(); ++i) {
    if (p.affines[i].b.size() != n) throw DimensionMismatch("affine map length differs from f");
    m.row(static_cast<Index>(i)) = p.affines[i].b.transpose();
  }
  return m;
}

bool near_threshold(const Spectrum& s) {
  for (Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double v = std::abs(s.eigenvalues(i));
    if (v > 1e-2 * s.tol && v < 1e2 * s.tol) return true;
  }
  return false;
}

}  // namespace

ConvexityVerdict classify_convexity(const NumrangeProblem& p, const Tolerances& t) {
  if (p.affines.empty()) throw PreconditionViolation("at least one affine map is required");
  const Matrix rows = rows_of(p);
  const SymMatrix& a = p.f.A;
  ConvexityVerdict v;
  v.V = null_basis(rows, t);
  v.rank = p.f.dim() - v.V.cols();
  const Matrix va = v.V.transpose() * a.mat();
  v.W = null_basis(va, t);
  v.va_in_range = in_column_space(va, v.V.transpose() * p.f.a, t.feas, t);

  const Spectrum sv = spectrum(a.congruence(v.V), t);
  const Spectrum sw = spectrum(a.congruence(v.W), t);
  v.vav_eigenvalues = sv.eigenvalues;
  v.boundary = near_threshold(sv) || near_threshold(sw);
  // An empty V^T A V is both PSD and NSD.
  const bool vav_psd = v.V.cols() == 0 || sv.psd();
  const bool vav_nsd = v.V.cols() == 0 || sv.nsd();
  const bool w_neg = v.W.cols() > 0 && sw.n_neg > 0;
  const bool w_pos = v.W.cols() > 0 && sw.n_pos > 0;
  if (vav_psd && v.va_in_range && w_neg) {
    v.kase = ConvexityCase::A;
    v.witness_eig = sw.min();
  } else if (vav_nsd && v.va_in_range && w_pos) {
    v.kase = ConvexityCase::B;
    v.witness_eig = sw.max();
  }
  v.convex = v.kase == ConvexityCase::None;
  return v;
}

std::optional<std::pair<double, double>> polyak_sufficient(const QuadForm& f, const QuadForm& h,
                                                           const Tolerances& t) {
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  if (f.dim() < 2) throw PreconditionViolation("the Polyak condition needs n >= 2");
  const auto g = [&](double th) { return lambda_min(std::cos(th) * f.A + std::sin(th) * h.A); };
  constexpr int kSeeds = 64;
  const double step = 2.0 * std::numbers::pi / kSeeds;
  double best_th = 0.0;
  double best = -kInf;
  for (int k = 0; k < kSeeds; ++k) {
    const double th = k * step;
    const double v = g(th);
    if (v > best) {
      best = v;
      best_th = th;
    }
  }
  // lambda_min(cos A + sin B) is concave on any arc where the combination is
  // PD, so a local golden section around the best seed is enough.
  const ConcaveMax m = maximize_concave(g, best_th - step, best_th + step);
  if (m.value > best) {
    best = m.value;
    best_th = m.arg;
  }
  if (best < t.sign(f.A.norm_inf() + h.A.norm_inf())) return std::nullopt;
  return std::make_pair(std::cos(best_th), std::sin(best_th));
}

std::pair<double, double> orthant_curve(const QuadForm& f, const AffineMap& h1, const Vector& z, double t) {
  const Vector x = t * z;
  return {f(x), 2.0 * h1.b.dot(x) + h1.d};
}

OrthantVerdict classify_orthant_p1(const QuadForm& f, const AffineMap& h1, const Tolerances& t) {
  const NumrangeProblem p{f, {h1}};
  if (classify_convexity(p, t).convex) throw HypothesisViolation("the joint range is convex");
  const SymMatrix& a = f.A;
  const Spectrum s = spectrum(a, t);
  const Vector& b = h1.b;
  OrthantVerdict out;

  if (s.n_neg == 0) {
    out.kase = OrthantCase::II;
    const double alpha = b.dot(a.mat() * b) / std::pow(b.squaredNorm(), 2);
    const Matrix res = a.mat() - alpha * b * b.transpose();
    if (!(alpha > 0.0) || res.cwiseAbs().rowwise().sum().maxCoeff() > 1e3 * s.tol) {
      throw Error("A is semidefinite but not a positive multiple of b1 b1^T");
    }
    out.alpha = alpha;
    return out;
  }

  const double btol = 1e-8 * b.norm();
  const Matrix neg = s.negative_vectors();
  std::optional<Vector> z;
  for (Index i = 0; i < neg.cols() && !z; ++i) {
    const double bz = b.dot(neg.col(i));
    if (std::abs(bz) > btol) z = bz < 0.0 ? Vector(neg.col(i)) : Vector(-neg.col(i));
  }
  if (!z) {
    // Every negative direction is orthogonal to b1: tilt one toward -b1.
    const Vector w = neg.col(0);
    const Vector down = -b / b.norm();
    for (double beta = 1.0; beta > 1e-12 && !z; beta *= 0.5) {
      const Vector c = w + beta * down;
      if (c.dot(a.mat() * c) < 0.0) z = c;
    }
    if (!z) throw Error("no escape direction found");
  }
  // Scale so both coordinates are already decreasing at t = 10 and below
  // -1000 at t = 1000.
  Vector dir = *z / z->norm();
  for (int k = 0; k < 64; ++k) {
    const auto c1 = orthant_curve(f, h1, dir, 10.0);
    const auto c2 = orthant_curve(f, h1, dir, 100.0);
    const auto c3 = orthant_curve(f, h1, dir, 1000.0);
    if (c1.first > c2.first && c2.first > c3.first && c1.second > c2.second && c2.second > c3.second &&
        c3.first < -1e3 && c3.second < -1e3) {
      break;
    }
    dir *= 2.0;
  }
  out.kase = OrthantCase::I;
  out.escape_direction = dir;
  return out;
}

}  // namespace sleq
