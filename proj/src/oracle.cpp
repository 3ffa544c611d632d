#include "sleq/oracle.hpp"

#include <cmath>
#include <random>

#include "sleq/errors.hpp"

namespace sleq {

namespace {

Vector draw(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

}  // namespace

std::vector<Vector> sample_constraint(const QuadForm& h, int count, std::uint64_t seed,
                                      const SampleOptions& opt, const Tolerances& t) {
  const Index n = h.dim();
  std::vector<Vector> out;
  if (count <= 0 || n == 0) return out;
  out.reserve(static_cast<std::size_t>(count));
  const double tol = feas_tol(h, t);
  std::mt19937_64 rng(seed);
  const int max_lines = 8 * count + 64;
  for (int line = 0; line < max_lines && static_cast<int>(out.size()) < count; ++line) {
    Vector x0 = opt.anchor_scale * draw(rng, n);
    if (opt.center) x0 += *opt.center;
    if (opt.bias && opt.bias->cols() > 0) x0 += *opt.bias * (opt.bias_scale * draw(rng, opt.bias->cols()));
    Vector u = draw(rng, n);
    u /= u.norm();
    const double a2 = u.dot(h.A.mat() * u);
    const double a1 = u.dot(h.A.mat() * x0 + h.a);
    const double a0 = h(x0);
    for (const double root : quadratic_roots(a2, a1, a0)) {
      const Vector x = x0 + root * u;
      if (std::abs(h(x)) <= tol && static_cast<int>(out.size()) < count) out.push_back(x);
    }
  }
  return out;
}

E1Oracle oracle_e1(const QuadForm& f, const QuadForm& h, int samples, std::uint64_t seed,
                   const SampleOptions& opt, const Tolerances& t) {
  if (f.dim() != h.dim()) throw DimensionMismatch("oracle_e1: f and h dimensions differ");
  E1Oracle r;
  for (const Vector& x : sample_constraint(h, samples, seed, opt, t)) {
    ++r.samples;
    const double v = f(x);
    if (v < r.min_value) {
      r.min_value = v;
      r.argmin = x;
    }
    if (v < -1e-8 && !r.refuted) {
      r.refuted = true;
      r.witness = x;
    }
  }
  return r;
}

std::vector<double> mu_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto k = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  g.reserve(static_cast<std::size_t>(k + 1));
  for (long i = 0; i <= k; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

E2Oracle oracle_e2(const QuadForm& f, const QuadForm& h, const std::vector<double>& grid,
                   const Tolerances& t) {
  if (f.dim() != h.dim()) throw DimensionMismatch("oracle_e2: f and h dimensions differ");
  const SymMatrix lf = lift(f);
  const SymMatrix lh = lift(h);
  for (const double mu : grid) {
    const SymMatrix m = lf + mu * lh;
    if (lambda_min(m) >= -t.sign(m.norm_inf())) return {true, mu};
  }
  return {};
}

Vector joint_image(const NumrangeProblem& p, const Vector& x) {
  Vector img(static_cast<Index>(p.affines.size()) + 1);
  img(0) = p.f(x);
  for (std::size_t i = 0; i < p.affines.size(); ++i) {
    img(static_cast<Index>(i) + 1) = 2.0 * p.affines[i].b.dot(x) + p.affines[i].d;
  }
  return img;
}

bool in_joint_range(const NumrangeProblem& p, const Vector& point, double slack,
                    const Tolerances& t) {
  const Index n = p.f.dim();
  const auto m = static_cast<Index>(p.affines.size());
  if (point.size() != m + 1) throw DimensionMismatch("in_joint_range: point length");
  Matrix rows(m, n);
  Vector rhs(m);
  for (Index i = 0; i < m; ++i) {
    rows.row(i) = 2.0 * p.affines[static_cast<std::size_t>(i)].b.transpose();
    rhs(i) = point(i + 1) - p.affines[static_cast<std::size_t>(i)].d;
  }
  Vector x0 = Vector::Zero(n);
  if (m > 0) {
    x0 = rows.completeOrthogonalDecomposition().solve(rhs);
    if ((rows * x0 - rhs).norm() > slack * (1.0 + rhs.norm())) return false;
  }
  const Matrix v = null_basis(rows, t);
  const QuadForm g = v.cols() > 0 ? restrict_to_affine(p.f, x0, v)
                                  : QuadForm::constant(0, p.f(x0));
  const ValueRange r = value_range(g, t);
  return r.contains(point(0), slack * (1.0 + std::abs(point(0))));
}

MidpointOracle midpoint_oracle(const NumrangeProblem& p, int pairs, std::uint64_t seed,
                               const Tolerances& t) {
  const Index n = p.f.dim();
  std::mt19937_64 rng(seed);
  const double scales[] = {0.3, 1.0, 3.0, 10.0};
  MidpointOracle r;
  for (int k = 0; k < pairs; ++k) {
    const double s = scales[k % 4];
    const Vector x = s * draw(rng, n);
    // Every other pair is nearly antipodal, which probes curvature of f
    // across the affine directions.
    const Vector y = (k % 2 == 0) ? Vector(s * draw(rng, n))
                                  : Vector(-x + 0.1 * s * draw(rng, n));
    const Vector mid = 0.5 * (joint_image(p, x) + joint_image(p, y));
    if (!in_joint_range(p, mid, 1e-6, t)) {
      r.violation = true;
      r.pair = std::make_pair(x, y);
      return r;
    }
  }
  return r;
}

}  // namespace sleq
