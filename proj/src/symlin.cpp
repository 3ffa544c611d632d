#include "sleq/symlin.hpp"

#include <algorithm>
#include <cmath>

#include "sleq/errors.hpp"

namespace sleq {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("symmetric matrix must be square");
  }
  if (!m.allFinite()) throw NonFiniteInput("matrix has non-finite entries");
  if (m.size() > 0) {
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    asymmetry_ = (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(Index n) { return {Matrix::Zero(n, n), Trusted{}}; }

SymMatrix SymMatrix::identity(Index n) {
  return {Matrix::Identity(n, n), Trusted{}};
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  if (!d.allFinite()) throw NonFiniteInput("diagonal has non-finite entries");
  return {Matrix(d.asDiagonal()), Trusted{}};
}

double SymMatrix::norm_inf() const {
  if (m_.size() == 0) return 0.0;
  return m_.cwiseAbs().rowwise().sum().maxCoeff();
}

bool SymMatrix::is_zero(double tol) const { return norm_inf() <= tol; }

SymMatrix SymMatrix::congruence(const Matrix& v) const {
  if (v.rows() != dim()) throw DimensionMismatch("congruence basis has wrong height");
  Matrix r = v.transpose() * m_ * v;
  return SymMatrix(r);
}

SymMatrix operator+(const SymMatrix& x, const SymMatrix& y) {
  if (x.dim() != y.dim()) throw DimensionMismatch("matrix sum dimension");
  return {x.m_ + y.m_, SymMatrix::Trusted{}};
}

SymMatrix operator-(const SymMatrix& x, const SymMatrix& y) {
  if (x.dim() != y.dim()) throw DimensionMismatch("matrix difference dimension");
  return {x.m_ - y.m_, SymMatrix::Trusted{}};
}

SymMatrix operator*(double s, const SymMatrix& x) {
  return {s * x.m_, SymMatrix::Trusted{}};
}

SymMatrix operator-(const SymMatrix& x) { return {-x.m_, SymMatrix::Trusted{}}; }

namespace {

Matrix select_columns(const Spectrum& s, int first, int count) {
  return s.eigenvectors.middleCols(first, count);
}

Vector eigenvalues_only(const Matrix& m) {
  if (m.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

Matrix Spectrum::null_vectors() const { return select_columns(*this, n_neg, n_zero); }
Matrix Spectrum::negative_vectors() const { return select_columns(*this, 0, n_neg); }
Matrix Spectrum::positive_vectors() const {
  return select_columns(*this, n_neg + n_zero, n_pos);
}

Spectrum spectrum(const SymMatrix& m, double tol) {
  Spectrum s;
  s.tol = tol;
  const Index n = m.dim();
  if (n == 0) {
    s.eigenvalues = Vector(0);
    s.eigenvectors = Matrix(0, 0);
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  for (Index i = 0; i < n; ++i) {
    const double l = s.eigenvalues(i);
    if (l < -tol) {
      ++s.n_neg;
    } else if (l > tol) {
      ++s.n_pos;
    } else {
      ++s.n_zero;
    }
  }
  return s;
}

Spectrum spectrum(const SymMatrix& m, const Tolerances& t) {
  return spectrum(m, t.sign(m.norm_inf()));
}

double lambda_min(const SymMatrix& m) {
  const Vector e = eigenvalues_only(m.mat());
  return e.size() ? e(0) : kInf;
}

double lambda_max(const SymMatrix& m) {
  const Vector e = eigenvalues_only(m.mat());
  return e.size() ? e(e.size() - 1) : -kInf;
}

SymMatrix pinv(const SymMatrix& m, double cutoff) {
  const Index n = m.dim();
  if (n == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  Vector inv = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double l = es.eigenvalues()(i);
    if (std::abs(l) > cutoff) inv(i) = 1.0 / l;
  }
  const Matrix& q = es.eigenvectors();
  return SymMatrix(Matrix(q * inv.asDiagonal() * q.transpose()));
}

namespace {

double pinv_cutoff(const SymMatrix& m, const Tolerances& t) {
  const Vector e = eigenvalues_only(m.mat());
  const double big = e.size() ? e.cwiseAbs().maxCoeff() : 0.0;
  return std::max(t.sign(m.norm_inf()), t.rank * big);
}

}  // namespace

SymMatrix pinv(const SymMatrix& m, const Tolerances& t) {
  return pinv(m, pinv_cutoff(m, t));
}

Matrix null_basis(const Matrix& m, double tol, const Tolerances& t) {
  const Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  if (!m.allFinite()) throw NonFiniteInput("null_basis: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cut = std::max(tol, t.rank * (sv.size() ? sv(0) : 0.0));
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

Matrix null_basis(const Matrix& m, const Tolerances& t) {
  double norm = 0.0;
  if (m.size() > 0) norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  return null_basis(m, t.sign(norm), t);
}

Matrix orthogonal_complement(const Matrix& basis, Index n) {
  if (basis.cols() == 0) return Matrix::Identity(n, n);
  return null_basis(Matrix(basis.transpose()), 1e-8);
}

bool in_range(const SymMatrix& m, const Vector& v, double tol, const Tolerances& t) {
  if (v.size() != m.dim()) throw DimensionMismatch("in_range: vector length");
  if (m.dim() == 0) return true;
  const SymMatrix p = pinv(m, t);
  const Vector r = v - m.mat() * (p.mat() * v);
  return r.norm() <= tol * (1.0 + v.norm());
}

bool in_column_space(const Matrix& m, const Vector& v, double tol, const Tolerances& t) {
  if (v.size() != m.rows()) throw DimensionMismatch("in_column_space: vector length");
  if (m.rows() == 0) return true;
  if (m.cols() == 0) return v.norm() <= tol * (1.0 + v.norm());
  // Components of v orthogonal to the column space lie in N(M^T).
  const Matrix left_null = null_basis(Matrix(m.transpose()), t);
  const Vector r = left_null.transpose() * v;
  return r.norm() <= tol * (1.0 + v.norm());
}

bool PencilInterval::singleton(const Tolerances& t) const {
  return bounded() && hi - lo <= t.singleton * (1.0 + std::abs(lo));
}

bool PencilInterval::contains(double mu, double slack) const {
  return !empty && mu >= lo - slack && mu <= hi + slack;
}

double PencilInterval::interior_point() const {
  if (empty) return std::numeric_limits<double>::quiet_NaN();
  if (bounded()) return 0.5 * (lo + hi);
  if (std::isfinite(lo)) return lo + 1.0 + std::abs(lo);
  if (std::isfinite(hi)) return hi - 1.0 - std::abs(hi);
  return 0.0;
}

ConcaveMax maximize_concave(const std::function<double(double)>& g, double lo,
                            double hi, double cap, double arg_tol) {
  if (!(lo <= hi)) throw PreconditionViolation("maximize_concave: empty domain");
  const double lo_e = std::max(lo, -cap);
  const double hi_e = std::min(hi, cap);
  double c = std::clamp(0.0, lo_e, hi_e);
  double gc = g(c);
  double step = 1.0;
  double left = c;
  double right = c;

  double r = std::min(c + step, hi_e);
  double gr = r > c ? g(r) : -kInf;
  if (r > c && gr > gc) {
    double l = c;
    for (;;) {
      l = c;
      c = r;
      gc = gr;
      step *= 2.0;
      r = std::min(c + step, hi_e);
      if (r <= c) {
        r = c;
        break;
      }
      gr = g(r);
      if (gr <= gc) break;
    }
    left = l;
    right = r;
  } else {
    double l = std::max(c - step, lo_e);
    double gl = l < c ? g(l) : -kInf;
    if (l < c && gl > gc) {
      double rr = c;
      for (;;) {
        rr = c;
        c = l;
        gc = gl;
        step *= 2.0;
        l = std::max(c - step, lo_e);
        if (l >= c) {
          l = c;
          break;
        }
        gl = g(l);
        if (gl <= gc) break;
      }
      left = l;
      right = rr;
    } else {
      left = l;
      right = r > c ? r : c;
    }
  }

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = left;
  double b = right;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = g(x1);
  double f2 = g(x2);
  for (int it = 0; it < 500; ++it) {
    if (b - a <= arg_tol * (1.0 + std::abs(0.5 * (a + b)))) break;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = g(x1);
    }
  }

  ConcaveMax best;
  const double candidates[] = {x1, x2, a, b, 0.5 * (a + b), left, right};
  for (const double x : candidates) {
    const double v = g(x);
    if (v > best.value) {
      best.value = v;
      best.arg = x;
    }
  }
  const double near = arg_tol * (1.0 + std::abs(best.arg));
  if ((hi > cap && std::abs(best.arg - cap) <= near) ||
      (lo < -cap && std::abs(best.arg + cap) <= near)) {
    best.unbounded = true;
  }
  return best;
}

ConcaveMax max_lambda_min_affine(const SymMatrix& m0, const SymMatrix& m1, double lo,
                                 double hi, const Tolerances& t) {
  if (m0.dim() != m1.dim()) throw DimensionMismatch("max_lambda_min_affine dimension");
  if (m1.is_zero(0.0)) {
    ConcaveMax r;
    r.arg = std::clamp(0.0, lo, hi);
    r.value = lambda_min(m0);
    return r;
  }
  const auto g = [&](double s) { return lambda_min(m0 + s * m1); };
  return maximize_concave(g, lo, hi, t.mu_cap, 1e-10);
}

namespace {

// Walks outward from a point with g >= 0 and bisects the first sign change.
// Returns +-inf when g stays nonnegative up to the cap.
double boundary_search(const std::function<double(double)>& g, double inside,
                       double dir, double cap) {
  double step = 1.0;
  double out = inside + dir * step;
  for (;;) {
    if (std::abs(out) >= cap) {
      out = dir * cap;
      if (g(out) >= 0.0) return dir * kInf;
      break;
    }
    if (g(out) < 0.0) break;
    inside = out;
    step *= 2.0;
    out = inside + dir * step;
  }
  for (int it = 0; it < 200; ++it) {
    if (std::abs(out - inside) <= 1e-10 * (1.0 + std::abs(inside))) break;
    const double mid = 0.5 * (inside + out);
    if (g(mid) >= 0.0) {
      inside = mid;
    } else {
      out = mid;
    }
  }
  return inside;
}

PencilInterval deflated_pencil(const SymMatrix& a, const SymMatrix& b,
                               const Tolerances& t) {
  const double tol = t.sign(a.norm_inf() + b.norm_inf());
  const Spectrum sb = spectrum(b, t);
  if (sb.n_neg == 0 && sb.n_pos == 0) {
    return lambda_min(a) >= -tol ? PencilInterval::whole_line() : PencilInterval::none();
  }
  if (sb.indefinite()) {
    const auto g = [&](double mu) { return lambda_min(a + mu * b); };
    const ConcaveMax m = max_lambda_min_affine(a, b, -kInf, kInf, t);
    if (m.value < -tol) return PencilInterval::none();
    if (m.value < 0.0) return {m.arg, m.arg, false, true, true};
    const double lo = boundary_search(g, m.arg, -1.0, t.mu_cap);
    const double hi = boundary_search(g, m.arg, 1.0, t.mu_cap);
    return {lo, hi, false, std::isfinite(lo), std::isfinite(hi)};
  }
  // Semidefinite B: nonempty iff A restricted to N(B) is positive definite;
  // the far end is then infinite.
  const double s = sb.n_neg == 0 ? 1.0 : -1.0;
  const SymMatrix bs = s * b;
  const Matrix z = sb.null_vectors();
  if (z.cols() > 0) {
    const Spectrum w = spectrum(a.congruence(z), tol);
    if (!w.pd()) return PencilInterval::none();
  }
  const auto g = [&](double nu) { return lambda_min(a + nu * bs); };
  double nu = 0.0;
  if (g(nu) < 0.0) {
    nu = 1.0;
    while (g(nu) < 0.0) {
      nu *= 2.0;
      if (nu > t.mu_cap) return PencilInterval::none();
    }
  }
  const double edge = boundary_search(g, nu, -1.0, t.mu_cap);
  if (s > 0) return {edge, kInf, false, std::isfinite(edge), false};
  return {-kInf, -edge, false, false, std::isfinite(edge)};
}

}  // namespace

PencilInterval pencil_interval(const SymMatrix& a, const SymMatrix& b, const Tolerances& t) {
  if (a.dim() != b.dim()) throw DimensionMismatch("pencil_interval: A and B differ in size");
  const Index n = a.dim();
  if (n == 0) return PencilInterval::whole_line();
  Matrix stacked(2 * n, n);
  stacked << a.mat(), b.mat();
  const Matrix k = null_basis(stacked, t.sign(a.norm_inf() + b.norm_inf()), t);
  if (k.cols() == n) return PencilInterval::whole_line();
  const Matrix u = orthogonal_complement(k, n);
  return deflated_pencil(a.congruence(u), b.congruence(u), t);
}

}  // namespace sleq
