#include "sleq/slemma.hpp"

#include <algorithm>
#include <cmath>

#include "sleq/errors.hpp"
#include "sleq/qp1eqc.hpp"

namespace sleq {

const char* to_string(Branch b) {
  switch (b) {
    case Branch::AssumptionFailsA: return "AssumptionFails-a";
    case Branch::AssumptionFailsB: return "AssumptionFails-b";
    case Branch::AssumptionFailsNeither: return "AssumptionFails-neither";
    case Branch::Thm3Generic: return "Thm3-generic";
    case Branch::Thm3Exception: return "Thm3-exception";
  }
  return "?";
}

namespace {

Matrix blkdiag(const Matrix& a, const Matrix& b) {
  Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

// (f, h) on (x, z) with f unchanged and h + z^2.
std::pair<QuadForm, QuadForm> add_slack(const QuadForm& f, const QuadForm& h) {
  const Index n = f.dim();
  Vector fa = Vector::Zero(n + 1);
  fa.head(n) = f.a;
  Vector ha = Vector::Zero(n + 1);
  ha.head(n) = h.a;
  return {QuadForm(SymMatrix(blkdiag(f.A.mat(), Matrix::Zero(1, 1))), fa, f.c),
          QuadForm(SymMatrix(blkdiag(h.A.mat(), Matrix::Identity(1, 1))), ha, h.c)};
}

QuadForm with_ridge(const QuadForm& f, double eps) {
  const Index n = f.dim();
  return f + QuadForm(eps * SymMatrix::identity(n), Vector::Zero(n), eps);
}

bool psd_by_tol(const SymMatrix& m, const Tolerances& t) {
  return lambda_min(m) >= -t.sign(m.norm_inf());
}

bool near_zero_b(const QuadForm& f, const QuadForm& h, const Tolerances& t) {
  return h.A.is_zero(t.zero_block * (1.0 + f.A.norm_inf()));
}

// N(W) = N(Zt^T At^2 Zt) reduces to At Zt N(W) = 0.
bool null_spaces_match(const SymMatrix& at, const Matrix& zt, const Spectrum& sw) {
  const Matrix n1 = sw.null_vectors();
  if (n1.cols() == 0) return true;
  return (at.mat() * zt * n1).norm() <= 1e-6 * (1.0 + at.norm_inf());
}

Branch assumption_branch(const Spectrum& sw, bool match) {
  if (sw.pd()) return Branch::AssumptionFailsA;
  if (sw.psd() && match) return Branch::AssumptionFailsB;
  return Branch::AssumptionFailsNeither;
}

// A point with g(y) below zero by a margin, tried from coarse to fine.
std::optional<Vector> strictly_negative(const QuadForm& g, const Tolerances& t) {
  for (const double target : {-1.0, -1e-3, -1e-6, -2e-8}) {
    if (auto y = point_below(g, target, t)) return y;
  }
  return std::nullopt;
}

}  // namespace

void require_feasible(const QuadForm& h, const Tolerances& t) {
  const ValueRange r = value_range(h, t);
  if (!r.contains(0.0, feas_tol(h, t))) {
    throw InfeasibleConstraint("h(x) = 0 has no solution: h ranges over [" + std::to_string(r.lo) +
                               ", " + std::to_string(r.hi) + "]");
  }
}

bool assumption1_holds(const QuadForm& h, const Tolerances& t) {
  require_feasible(h, t);
  return value_range(h, t).interior_contains(0.0, feas_tol(h, t));
}

bool certifies(const QuadForm& f, const QuadForm& h, double mu, const Tolerances& t) {
  if (!std::isfinite(mu)) return false;
  return psd_by_tol(lift(f) + mu * lift(h), t);
}

SLemmaVerdict homogeneous_equivalence(const SymMatrix& a, const SymMatrix& b,
                                      const Tolerances& t) {
  if (a.dim() != b.dim()) throw DimensionMismatch("homogeneous_equivalence: A and B differ in size");
  const Spectrum sb = spectrum(b, t);
  if (sb.indefinite()) throw PreconditionViolation("homogeneous_equivalence needs B semidefinite");
  SLemmaVerdict v;
  const Matrix z = sb.null_vectors();
  const SymMatrix w = a.congruence(z);
  const Spectrum sw = spectrum(w, t);
  v.e1_true = sw.psd();
  v.reduced_matrix = w.mat();
  const bool match = v.e1_true && null_spaces_match(a, z, sw);
  v.null_spaces_match = match;
  v.branch = assumption_branch(sw, match);

  const PencilInterval iv = pencil_interval(a, b, t);
  v.pencil = iv;
  if (!iv.empty) {
    const double mu = iv.interior_point();
    if (psd_by_tol(a + mu * b, t)) {
      v.certificate = mu;
    } else if (std::isfinite(iv.lo) && psd_by_tol(a + iv.lo * b, t)) {
      v.certificate = iv.lo;
    } else if (std::isfinite(iv.hi) && psd_by_tol(a + iv.hi * b, t)) {
      v.certificate = iv.hi;
    }
  }
  v.e2_true = v.certificate.has_value();
  if (!v.e1_true) {
    const Matrix neg = sw.negative_vectors();
    const double lam = sw.min();
    Vector x = z * neg.col(0);
    x *= std::sqrt(2.0 / std::abs(lam));
    v.counterexample = x;
  }
  v.equivalence_holds = v.e1_true == v.e2_true;
  return v;
}

SLemmaVerdict theorem1_verdict(const QuadForm& f, const QuadForm& h, const SolverOptions& opt) {
  const Tolerances& t = opt.tol;
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  if (assumption1_holds(h, t)) throw PreconditionViolation("h takes both signs; use the generic branch");
  const Index n = f.dim();
  const Vector x0 = -(pinv(h.A, t).mat() * h.a);
  const Matrix z = null_basis(h.A.mat(), t);

  // Shift x -> x + x0 so that h becomes x^T B x.
  Matrix shift = Matrix::Identity(n + 1, n + 1);
  shift.topRightCorner(n, 1) = x0;
  const SymMatrix at = lift(f).congruence(shift);
  const Matrix zt = blkdiag(z, Matrix::Identity(1, 1));
  const SymMatrix w = at.congruence(zt);
  const Spectrum sw = spectrum(w, t);

  SLemmaVerdict v;
  v.e1_true = sw.psd();
  v.reduced_matrix = w.mat();
  const bool match = v.e1_true && null_spaces_match(at, zt, sw);
  v.null_spaces_match = match;
  v.branch = assumption_branch(sw, match);

  const SymMatrix bt(blkdiag(h.A.mat(), Matrix::Zero(1, 1)));
  const PencilInterval iv = pencil_interval(at, bt, t);
  v.pencil = iv;
  if (!iv.empty) {
    for (const double mu : {iv.interior_point(), iv.lo, iv.hi}) {
      if (certifies(f, h, mu, t)) {
        v.certificate = mu;
        break;
      }
    }
    if (!v.certificate) {
      v.certificate = e2_certificate_search(f, h, MultiplierSign::Free, t);
      if (!v.certificate) v.notes.emplace_back("pencil nonempty but no multiplier verified on the lifted forms");
    }
  }
  v.e2_true = v.certificate.has_value();

  if (!v.e1_true) {
    const QuadForm g = z.cols() > 0 ? restrict_to_affine(f, x0, z) : QuadForm::constant(0, f(x0));
    if (const auto y = strictly_negative(g, t)) {
      v.counterexample = z.cols() > 0 ? Vector(x0 + z * *y) : x0;
    }
  }
  v.equivalence_holds = v.e1_true == v.e2_true;
  return v;
}

SLemmaVerdict theorem3_verdict(const QuadForm& f, const QuadForm& h, const SolverOptions& opt) {
  const Tolerances& t = opt.tol;
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  if (!assumption1_holds(h, t)) throw PreconditionViolation("h does not take both signs");
  SLemmaVerdict v;

  if (near_zero_b(f, h, t) && spectrum(f.A, t).n_neg == 1) {
    const double bb = h.a.squaredNorm();
    const Vector x0 = -(h.c / (2.0 * bb)) * h.a;
    const Matrix vb = null_basis(Matrix(h.a.transpose()), t);
    const QuadForm g = vb.cols() > 0 ? restrict_to_affine(f, x0, vb) : QuadForm::constant(0, f(x0));
    const SymMatrix m = lift(g);
    v.reduced_matrix = m.mat();
    if (spectrum(m, t).psd()) {
      v.branch = Branch::Thm3Exception;
      v.e1_true = true;
      v.e2_true = false;
      v.equivalence_holds = false;
      v.notes.emplace_back("f is nonnegative on the hyperplane but no multiplier exists");
      return v;
    }
  }

  v.branch = Branch::Thm3Generic;
  std::optional<double> mu = e2_certificate_search(f, h, MultiplierSign::Free, t);
  E1Result e;
  if (!mu) {
    e = e1_check(f, h, opt);
    if (e.holds && e.dual_multiplier && certifies(f, h, *e.dual_multiplier, t)) mu = e.dual_multiplier;
  }
  if (mu) {
    v.e1_true = v.e2_true = true;
    v.certificate = mu;
  } else {
    v.e1_true = e.holds;
    v.e2_true = false;
    v.counterexample = e.counterexample;
    if (e.holds) v.notes.emplace_back("f >= 0 on {h = 0} but multiplier search failed");
  }
  v.equivalence_holds = v.e1_true == v.e2_true;
  return v;
}

std::optional<double> e2_certificate_search(const QuadForm& f, const QuadForm& h,
                                            MultiplierSign sign, const Tolerances& t) {
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  const SymMatrix l0 = lift(f);
  const SymMatrix l1 = lift(h);
  const double lo = sign == MultiplierSign::Nonneg ? 0.0 : -kInf;
  if (l1.is_zero(0.0)) {
    if (certifies(f, h, 0.0, t)) return 0.0;
    return std::nullopt;
  }
  std::vector<double> candidates;
  const PencilInterval iv = pencil_interval(l0, l1, t);
  if (!iv.empty) {
    const double a = std::max(iv.lo, lo);
    const double b = iv.hi;
    if (a <= b + t.singleton * (1.0 + std::abs(b))) {
      const double bb = std::max(a, b);
      const ConcaveMax m = max_lambda_min_affine(l0, l1, a, bb, t);
      if (!m.unbounded) candidates.push_back(m.arg);
      candidates.push_back(std::clamp(iv.interior_point(), a, bb));
      if (std::isfinite(a)) candidates.push_back(a);
      if (std::isfinite(bb)) candidates.push_back(bb);
      if (m.unbounded) candidates.push_back(m.arg);
    }
  }
  const ConcaveMax g = max_lambda_min_affine(l0, l1, lo, kInf, t);
  candidates.push_back(g.arg);
  for (const double mu : candidates) {
    if (mu >= lo && certifies(f, h, mu, t)) return mu;
  }
  return std::nullopt;
}

E1Result e1_check(const QuadForm& f, const QuadForm& h, const SolverOptions& opt) {
  const Tolerances& t = opt.tol;
  const Qp1eqcProblem p{f, h};
  const SolveOutcome s = solve(p, opt);
  E1Result r;
  r.infimum = s.value;
  r.dual_multiplier = s.mu_star;
  if (s.value >= -t.sign(f.data_norm())) {
    r.holds = true;
    return r;
  }
  const double target = std::min(std::isfinite(s.value) ? 0.5 * s.value : -1.0, -2e-8);
  if (s.status == SolveStatus::Attained && s.x_star && f(*s.x_star) < -1e-8) {
    r.counterexample = s.x_star;
  } else if (const auto flat = constraint_flat(p, t)) {
    const QuadForm g = flat->basis.cols() > 0 ? restrict_to_affine(f, flat->x0, flat->basis)
                                               : QuadForm::constant(0, f(flat->x0));
    if (auto y = point_below(g, target, t)) {
      r.counterexample = flat->basis.cols() > 0 ? Vector(flat->x0 + flat->basis * *y) : flat->x0;
    }
  } else {
    std::optional<Matrix> bias;
    if (s.witness && s.witness->V.cols() > 0) bias = s.witness->V;
    r.counterexample = feasible_point_below(p, target, opt, bias);
  }
  return r;
}

SLemmaVerdict slemma_equality(const QuadForm& f, const QuadForm& h, const SolverOptions& opt) {
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  if (assumption1_holds(h, opt.tol)) return theorem3_verdict(f, h, opt);
  return theorem1_verdict(f, h, opt);
}

FinslerResult finsler(const SymMatrix& a, const SymMatrix& b, const Tolerances& t) {
  if (a.dim() != b.dim()) throw DimensionMismatch("finsler: A and B differ in size");
  const double tol = t.sign(a.norm_inf() + b.norm_inf());
  const auto strict_at = [&](double mu) { return lambda_min(a + mu * b) >= tol; };
  const PencilInterval iv = pencil_interval(a, b, t);
  if (!iv.empty) {
    const double mid = iv.interior_point();
    if (strict_at(mid)) return {true, mid};
    const ConcaveMax m = max_lambda_min_affine(a, b, iv.lo, iv.hi, t);
    if (m.value >= tol) return {true, m.arg};
  }
  const ConcaveMax m = max_lambda_min_affine(a, b, -kInf, kInf, t);
  if (m.value >= tol) return {true, m.arg};
  return {};
}

SLemmaVerdict slemma_inequality(const QuadForm& f, const QuadForm& h, const SolverOptions& opt) {
  const Tolerances& t = opt.tol;
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  const ValueRange r = value_range(h, t);
  if (!(r.lo < -feas_tol(h, t))) throw SlaterViolation("no point with h(x) < 0");
  const auto [fz, hz] = add_slack(f, h);
  SLemmaVerdict v = theorem3_verdict(fz, hz, opt);
  if (v.certificate) {
    const double mu = *v.certificate;
    if (mu < 0.0) {
      // A negative multiplier certifies the equality system only.
      if (mu >= -t.sign(f.data_norm() + h.data_norm()) && certifies(f, h, 0.0, t)) {
        v.certificate = 0.0;
      } else if (const auto nn = e2_certificate_search(fz, hz, MultiplierSign::Nonneg, t)) {
        v.certificate = *nn;
      }
    }
  }
  if (v.counterexample) v.counterexample = Vector(v.counterexample->head(f.dim()));
  return v;
}

RegularizedCertificate regularized_lambda(const QuadForm& f, const QuadForm& h, double eps,
                                          const SolverOptions& opt) {
  const Tolerances& t = opt.tol;
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  if (!(eps > 0.0)) throw PreconditionViolation("epsilon must be positive");
  if (!e1_check(f, h, opt).holds) throw E1Violated("f is negative somewhere on {h = 0}");
  const bool affine = near_zero_b(f, h, t);
  const QuadForm hp = affine ? square_affine(QuadForm::affine(h.a, h.c)) : h;
  const auto mu = e2_certificate_search(with_ridge(f, eps), hp, MultiplierSign::Free, t);
  if (!mu) throw Error("no multiplier found for the regularized system");
  return {eps, *mu, affine ? 2 : 1};
}

RegularizedCertificate regularized_inequality(const QuadForm& f, const QuadForm& h, double eps,
                                              const SolverOptions& opt) {
  const Tolerances& t = opt.tol;
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  if (!(eps > 0.0)) throw PreconditionViolation("epsilon must be positive");
  const ValueRange r = value_range(h, t);
  const double ftol = feas_tol(h, t);
  if (r.lo < -ftol) throw PreconditionViolation("h takes negative values; the plain S-lemma applies");
  if (r.lo > ftol) throw InfeasibleConstraint("h(x) <= 0 has no solution");
  if (!e1_check(f, h, opt).holds) throw E1Violated("f is negative somewhere on {h <= 0}");
  const auto [fz, hz] = add_slack(with_ridge(f, eps), h);
  const auto mu = e2_certificate_search(fz, hz, MultiplierSign::Nonneg, t);
  if (!mu) throw Error("no multiplier found for the regularized system");
  return {eps, std::max(*mu, 0.0), 1};
}

bool regularized_certifies(const QuadForm& f, const QuadForm& h, const RegularizedCertificate& r,
                           const Tolerances& t) {
  const QuadForm hp = r.exponent == 2 ? square_affine(QuadForm::affine(h.a, h.c)) : h;
  return certifies(with_ridge(f, r.epsilon), hp, r.lambda_eps, t);
}

}  // namespace sleq
