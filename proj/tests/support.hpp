#pragma once

#include <random>

#include "sleq/model.hpp"
#include "sleq/symlin.hpp"

namespace sleq::testing {

inline Matrix gaussian(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = nd(rng);
  }
  return m;
}

inline Vector gaussian_vec(std::mt19937_64& rng, Index n) {
  return gaussian(rng, n, 1).col(0);
}

inline SymMatrix random_sym(std::mt19937_64& rng, Index n) {
  return SymMatrix(gaussian(rng, n, n));
}

// Symmetric matrix with a prescribed number of negative/zero/positive eigenvalues.
inline SymMatrix random_inertia(std::mt19937_64& rng, int neg, int zero, int pos) {
  const Index n = neg + zero + pos;
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  Vector d(n);
  Index k = 0;
  for (int i = 0; i < neg; ++i) d(k++) = -mag(rng);
  for (int i = 0; i < zero; ++i) d(k++) = 0.0;
  for (int i = 0; i < pos; ++i) d(k++) = mag(rng);
  const Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  const Matrix q = qr.householderQ();
  return SymMatrix(Matrix(q * d.asDiagonal() * q.transpose()));
}

inline SymMatrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return SymMatrix::diagonal(d);
}

inline Vector vec(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d;
}

inline SymMatrix sym(std::initializer_list<std::initializer_list<double>> rows) {
  const Index n = static_cast<Index>(rows.size());
  Matrix m(n, n);
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return SymMatrix(m);
}

inline Matrix random_orthogonal(std::mt19937_64& rng, Index n) {
  const Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  return qr.householderQ();
}

// Random (f, h) with {h = 0} nonempty. Families cover the generic case, affine
// h, h that fails to change sign, shared null directions, unattained minima
// and semidefinite objectives.
inline Qp1eqcProblem random_problem(std::mt19937_64& rng, int family) {
  std::uniform_int_distribution<int> dim(1, 4);
  const Index n = (family == 4) ? std::max<Index>(2, dim(rng)) : dim(rng);
  const Vector x0 = gaussian_vec(rng, n);
  const auto pin = [&](const SymMatrix& b, const Vector& lin) {
    return QuadForm(b, lin, -(x0.dot(b.mat() * x0) + 2.0 * lin.dot(x0)));
  };
  switch (family) {
    case 0:
      return {QuadForm(random_sym(rng, n), gaussian_vec(rng, n), gaussian_vec(rng, 1)(0)),
              pin(random_sym(rng, n), gaussian_vec(rng, n))};
    case 1:
      return {QuadForm(random_sym(rng, n), gaussian_vec(rng, n), 0.3),
              pin(SymMatrix::zero(n), gaussian_vec(rng, n))};
    case 2: {
      // h = (x - x0)^T B (x - x0) with B semidefinite and singular.
      std::uniform_int_distribution<int> zeros(1, static_cast<int>(n));
      const int z = zeros(rng);
      SymMatrix b = random_inertia(rng, 0, z, static_cast<int>(n) - z);
      if (rng() % 2) b = -b;
      return {QuadForm(random_sym(rng, n), gaussian_vec(rng, n), 0.1),
              QuadForm(b, Vector(-(b.mat() * x0)), x0.dot(b.mat() * x0))};
    }
    case 3: {
      // A and B share a null direction.
      const Matrix q = random_orthogonal(rng, n);
      Matrix a = Matrix::Zero(n, n);
      Matrix b = Matrix::Zero(n, n);
      a.bottomRightCorner(n - 1, n - 1) = random_sym(rng, n - 1).mat();
      b.bottomRightCorner(n - 1, n - 1) = random_sym(rng, n - 1).mat();
      const SymMatrix bs(Matrix(q * b * q.transpose()));
      Vector lin = gaussian_vec(rng, n);
      if (rng() % 2) lin -= q.col(0) * q.col(0).dot(lin);
      return {QuadForm(SymMatrix(Matrix(q * a * q.transpose())), lin, 0.0),
              pin(bs, gaussian_vec(rng, n))};
    }
    case 4: {
      // x1^2 + sum_{i>2} x_i^2 on x1 x2 = 1, rotated: infimum 0, unattained.
      const Matrix q = random_orthogonal(rng, n);
      Vector da = Vector::Ones(n);
      da(1) = 0.0;
      Matrix hb = Matrix::Zero(n, n);
      hb(0, 1) = hb(1, 0) = 0.5;
      return {QuadForm(SymMatrix(Matrix(q * da.asDiagonal() * q.transpose())), Vector::Zero(n), 0.0),
              QuadForm(SymMatrix(Matrix(q * hb * q.transpose())), Vector::Zero(n), -1.0)};
    }
    default: {
      std::uniform_int_distribution<int> zeros(0, static_cast<int>(n) - 1);
      const int z = zeros(rng);
      return {QuadForm(random_inertia(rng, 0, z, static_cast<int>(n) - z), gaussian_vec(rng, n), 0.0),
              pin(random_sym(rng, n), gaussian_vec(rng, n))};
    }
  }
}

inline constexpr int kProblemFamilies = 6;

}  // namespace sleq::testing
