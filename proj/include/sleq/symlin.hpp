#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "sleq/tolerance.hpp"

namespace sleq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense symmetric matrix. Input is symmetrized as (M+M^T)/2; the relative
// asymmetry of the raw input is kept so loaders can warn about it.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(Index n);
  static SymMatrix identity(Index n);
  static SymMatrix diagonal(const Vector& d);

  Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }
  double asymmetry() const { return asymmetry_; }
  double norm_inf() const;
  bool is_zero(double tol) const;

  // V^T M V for a basis matrix V.
  SymMatrix congruence(const Matrix& v) const;

  friend SymMatrix operator+(const SymMatrix& x, const SymMatrix& y);
  friend SymMatrix operator-(const SymMatrix& x, const SymMatrix& y);
  friend SymMatrix operator*(double s, const SymMatrix& x);
  friend SymMatrix operator-(const SymMatrix& x);

 private:
  struct Trusted {};
  SymMatrix(Matrix m, Trusted) : m_(std::move(m)) {}

  Matrix m_;
  double asymmetry_ = 0.0;
};

struct Spectrum {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns
  double tol = 0.0;
  int n_neg = 0;
  int n_zero = 0;
  int n_pos = 0;

  double min() const { return eigenvalues.size() ? eigenvalues(0) : kInf; }
  double max() const {
    return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : -kInf;
  }
  bool psd() const { return n_neg == 0; }
  bool nsd() const { return n_pos == 0; }
  bool pd() const { return n_neg == 0 && n_zero == 0; }
  bool nd() const { return n_pos == 0 && n_zero == 0; }
  bool indefinite() const { return n_neg > 0 && n_pos > 0; }
  Matrix null_vectors() const;
  Matrix negative_vectors() const;
  Matrix positive_vectors() const;
};

Spectrum spectrum(const SymMatrix& m, double tol);
Spectrum spectrum(const SymMatrix& m, const Tolerances& t = {});
double lambda_min(const SymMatrix& m);
double lambda_max(const SymMatrix& m);

SymMatrix pinv(const SymMatrix& m, double cutoff);
SymMatrix pinv(const SymMatrix& m, const Tolerances& t = {});

// Orthonormal basis of N(M). Singular values <= max(tol, t.rank*sigma_max)
// count as zero. A matrix with no rows has the identity as null basis.
Matrix null_basis(const Matrix& m, double tol, const Tolerances& t = {});
Matrix null_basis(const Matrix& m, const Tolerances& t = {});

// Orthonormal basis of the complement of span(basis) in R^n.
Matrix orthogonal_complement(const Matrix& basis, Index n);

bool in_range(const SymMatrix& m, const Vector& v, double tol,
              const Tolerances& t = {});
// Column-space membership for a rectangular matrix.
bool in_column_space(const Matrix& m, const Vector& v, double tol,
                     const Tolerances& t = {});

struct PencilInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;
  bool lo_attained = false;
  bool hi_attained = false;

  static PencilInterval none() { return {}; }
  static PencilInterval whole_line() { return {-kInf, kInf, false, false, false}; }

  bool bounded() const { return !empty && std::isfinite(lo) && std::isfinite(hi); }
  bool singleton(const Tolerances& t = {}) const;
  bool contains(double mu, double slack = 0.0) const;
  // A finite point inside the interval, preferring the midpoint.
  double interior_point() const;
};

PencilInterval pencil_interval(const SymMatrix& a, const SymMatrix& b,
                               const Tolerances& t = {});

struct ConcaveMax {
  double arg = 0.0;
  double value = -kInf;
  bool unbounded = false;  // still increasing at the domain/cap limit
};

// Maximizes a concave function over [lo, hi] (endpoints may be infinite):
// expanding bracket from clamp(0), then golden section.
ConcaveMax maximize_concave(const std::function<double(double)>& g, double lo,
                            double hi, double cap = 1e8, double arg_tol = 1e-10);

ConcaveMax max_lambda_min_affine(const SymMatrix& m0, const SymMatrix& m1,
                                 double lo = -kInf, double hi = kInf,
                                 const Tolerances& t = {});

}  // namespace sleq
