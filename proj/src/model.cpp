#include "sleq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sleq/errors.hpp"

namespace sleq {

QuadForm::QuadForm(SymMatrix A_, Vector a_, double c_)
    : A(std::move(A_)), a(std::move(a_)), c(c_) {
  if (a.size() != A.dim()) throw DimensionMismatch("quadratic: linear term length differs from matrix");
  if (!a.allFinite() || !std::isfinite(c)) throw NonFiniteInput("quadratic: non-finite data");
}

QuadForm QuadForm::affine(const Vector& b, double d) {
  return {SymMatrix::zero(b.size()), b, d};
}

QuadForm QuadForm::constant(Index n, double value) {
  return {SymMatrix::zero(n), Vector::Zero(n), value};
}

double QuadForm::operator()(const Vector& x) const { return evaluate(*this, x); }

Vector QuadForm::gradient(const Vector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("gradient: point dimension");
  return 2.0 * (A.mat() * x + a);
}

double QuadForm::data_norm() const { return A.norm_inf() + a.norm() + std::abs(c); }

bool QuadForm::is_affine(const Tolerances& t) const {
  return A.is_zero(t.zero_block * (1.0 + a.norm() + std::abs(c)));
}

QuadForm operator+(const QuadForm& p, const QuadForm& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("quadratic sum dimension");
  return {p.A + q.A, p.a + q.a, p.c + q.c};
}

QuadForm operator-(const QuadForm& p, const QuadForm& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("quadratic difference dimension");
  return {p.A - q.A, p.a - q.a, p.c - q.c};
}

QuadForm operator*(double s, const QuadForm& q) { return {s * q.A, s * q.a, s * q.c}; }

double evaluate(const QuadForm& q, const Vector& x) {
  if (x.size() != q.dim()) throw DimensionMismatch("evaluate: point dimension");
  return x.dot(q.A.mat() * x) + 2.0 * q.a.dot(x) + q.c;
}

SymMatrix lift(const QuadForm& q) {
  const Index n = q.dim();
  Matrix m(n + 1, n + 1);
  m.topLeftCorner(n, n) = q.A.mat();
  m.topRightCorner(n, 1) = q.a;
  m.bottomLeftCorner(1, n) = q.a.transpose();
  m(n, n) = q.c;
  return SymMatrix(m);
}

QuadForm square_affine(const QuadForm& h) {
  // (2 b^T x + d)^2 = x^T (4 b b^T) x + 2 (2 d b)^T x + d^2
  const Vector& b = h.a;
  return {SymMatrix(Matrix(4.0 * b * b.transpose())), 2.0 * h.c * b, h.c * h.c};
}

bool ValueRange::contains(double v, double slack) const {
  const bool above = lo_attained ? v >= lo - slack : v > lo - slack;
  const bool below = hi_attained ? v <= hi + slack : v < hi + slack;
  return above && below;
}

bool ValueRange::interior_contains(double v, double slack) const {
  return v > lo + slack && v < hi - slack;
}

ValueRange value_range(const QuadForm& q, const Tolerances& t) {
  ValueRange r;
  const Spectrum s = spectrum(q.A, t);
  const double tol = t.sign(q.A.norm_inf());
  if (s.indefinite()) return r;
  if (s.n_neg == 0 && s.n_pos == 0) {
    if (q.a.norm() <= tol) {
      r.lo = r.hi = q.c;
      r.lo_attained = r.hi_attained = true;
      r.lo_point = r.hi_point = Vector::Zero(q.dim());
    }
    return r;
  }
  if (!in_range(q.A, q.a, tol, t)) return r;
  const Vector x = -(pinv(q.A, t).mat() * q.a);
  const double v = q(x);
  if (s.psd()) {
    r.lo = v;
    r.lo_attained = true;
    r.lo_point = x;
  } else {
    r.hi = v;
    r.hi_attained = true;
    r.hi_point = x;
  }
  return r;
}

QuadForm restrict_to_affine(const QuadForm& q, const Vector& x0, const Matrix& v) {
  if (x0.size() != q.dim() || v.rows() != q.dim()) {
    throw DimensionMismatch("restrict_to_affine: anchor or basis dimension");
  }
  return {q.A.congruence(v), v.transpose() * (q.A.mat() * x0 + q.a), q(x0)};
}

UnconstrainedMin minimize_unconstrained(const QuadForm& q, const Tolerances& t) {
  UnconstrainedMin r;
  const Spectrum s = spectrum(q.A, t);
  if (!s.psd()) return r;
  if (!in_range(q.A, q.a, t.sign(q.A.norm_inf()), t)) return r;
  const Vector x = -(pinv(q.A, t).mat() * q.a);
  r.bounded = true;
  r.argmin = x;
  r.value = q(x);
  return r;
}

std::optional<Vector> point_below(const QuadForm& q, double target, const Tolerances& t) {
  const Index n = q.dim();
  if (q.c < target) return Vector::Zero(n);
  const Spectrum s = spectrum(q.A, t);
  if (s.psd()) {
    const UnconstrainedMin m = minimize_unconstrained(q, t);
    if (m.bounded) {
      if (m.value < target) return m.argmin;
      return std::nullopt;
    }
    // Linear descent along the part of a in N(A).
    const Matrix z = s.null_vectors();
    const Vector nz = z * (z.transpose() * q.a);
    const double nn = nz.squaredNorm();
    if (nn == 0.0) return std::nullopt;
    for (double scale = 1.0; scale < 1e30; scale *= 2.0) {
      const double step = scale * ((q.c - target) / (2.0 * nn) + 1.0);
      const Vector y = -step * nz;
      if (q(y) < target) return y;
    }
    return std::nullopt;
  }
  const Vector v = s.eigenvectors.col(0);
  const double dir = q.a.dot(v) > 0.0 ? -1.0 : 1.0;
  for (double step = 1.0; step < 1e30; step *= 2.0) {
    const Vector y = (dir * step) * v;
    if (q(y) < target) return y;
  }
  return std::nullopt;
}

std::vector<double> quadratic_roots(double a2, double a1, double a0) {
  std::vector<double> roots;
  const double scale = std::abs(a1) + std::abs(a0);
  if (a2 == 0.0 || std::abs(a2) <= 1e-15 * scale) {
    if (a1 != 0.0) roots.push_back(-a0 / (2.0 * a1));
    return roots;
  }
  double disc = a1 * a1 - a2 * a0;
  if (disc < 0.0) {
    if (disc < -1e-14 * (a1 * a1 + std::abs(a2 * a0))) return roots;
    disc = 0.0;
  }
  const double sq = std::sqrt(disc);
  const double qq = -(a1 + (a1 >= 0.0 ? sq : -sq));
  if (qq == 0.0) {
    roots.push_back(0.0);
    return roots;
  }
  roots.push_back(qq / a2);
  roots.push_back(a0 / qq);
  std::sort(roots.begin(), roots.end());
  return roots;
}

double feas_tol(const QuadForm& h, const Tolerances& t) {
  return t.feas * (1.0 + std::abs(h.c) + h.a.norm() + h.A.norm_inf());
}

double feas_tol(const QuadForm& h, const Vector& x, const Tolerances& t) {
  const double xn = x.norm();
  const double terms = h.A.norm_inf() * xn * xn + 2.0 * h.a.norm() * xn + std::abs(h.c);
  return feas_tol(h, t) + 64.0 * std::numeric_limits<double>::epsilon() * terms;
}

std::optional<Vector> level_point(const QuadForm& q, double level, std::uint64_t seed,
                                  int max_attempts, const Tolerances& t) {
  const Index n = q.dim();
  const double accept = t.feas * (1.0 + std::abs(level) + q.data_norm());
  if (std::abs(q.c - level) <= accept) return Vector::Zero(n);
  if (n == 0) return std::nullopt;

  std::vector<Vector> dirs;
  const ValueRange r = value_range(q, t);
  if (r.lo_point && r.lo_point->norm() > 0.0) dirs.push_back(*r.lo_point);
  if (r.hi_point && r.hi_point->norm() > 0.0) dirs.push_back(*r.hi_point);
  if (q.a.norm() > 0.0) dirs.push_back(q.a);
  const Spectrum s = spectrum(q.A, t);
  for (Index i = 0; i < n; ++i) dirs.push_back(s.eigenvectors.col(i));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int k = 0; k < max_attempts; ++k) {
    Vector w;
    if (static_cast<std::size_t>(k) < dirs.size()) {
      w = dirs[static_cast<std::size_t>(k)];
    } else {
      w.resize(n);
      for (Index i = 0; i < n; ++i) w(i) = nd(rng);
    }
    w /= w.norm();
    const double a2 = w.dot(q.A.mat() * w);
    const double a1 = q.a.dot(w);
    std::vector<double> roots = quadratic_roots(a2, a1, q.c - level);
    std::sort(roots.begin(), roots.end(),
              [](double x, double y) { return std::abs(x) < std::abs(y); });
    for (const double root : roots) {
      const Vector y = root * w;
      if (std::abs(q(y) - level) <= accept) return y;
    }
  }
  return std::nullopt;
}

Qp1eqcProblem build_dwp(const Matrix& q, const Vector& c, double d, const SymMatrix& a,
                        const Vector& lin) {
  const Index n = q.cols();
  if (q.size() == 0 || q.cwiseAbs().maxCoeff() == 0.0) throw PreconditionViolation("build_dwp: Q must be nonzero");
  if (c.size() != q.rows()) throw DimensionMismatch("build_dwp: c must have one entry per row of Q");
  if (a.dim() != n || lin.size() != n) throw DimensionMismatch("build_dwp: A and a must match the columns of Q");

  Matrix obj = Matrix::Zero(n + 1, n + 1);
  obj.topLeftCorner(n, n) = 0.5 * a.mat();
  obj(n, n) = 0.5;
  Vector obj_lin = Vector::Zero(n + 1);
  obj_lin.head(n) = -0.5 * lin;

  Matrix con = Matrix::Zero(n + 1, n + 1);
  con.topLeftCorner(n, n) = 0.5 * q.transpose() * q;
  Vector con_lin(n + 1);
  con_lin.head(n) = -0.5 * q.transpose() * c;
  con_lin(n) = -0.5;

  return {QuadForm(SymMatrix(obj), obj_lin, 0.0),
          QuadForm(SymMatrix(con), con_lin, 0.5 * c.squaredNorm() - d)};
}

}  // namespace sleq
