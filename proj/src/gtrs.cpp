#include "sleq/gtrs.hpp"

#include <algorithm>
#include <cmath>

#include "sleq/errors.hpp"
#include "sleq/slemma.hpp"

namespace sleq {

const char* to_string(GtrsSource s) {
  switch (s) {
    case GtrsSource::Interior: return "Interior";
    case GtrsSource::LowerBoundary: return "LowerBoundary";
    case GtrsSource::UpperBoundary: return "UpperBoundary";
  }
  return "?";
}

namespace {

constexpr double kNuCap = 1099511627776.0;  // 2^40

void check(const GtrsProblem& p) {
  if (p.objective.dim() != p.constraint.dim()) throw DimensionMismatch("objective and constraint dimensions differ");
  if (!(p.l <= p.u)) throw InfeasibleProblem("lower bound exceeds upper bound");
}

std::optional<SolveOutcome> boundary_solve(const GtrsProblem& p, double level, const SolverOptions& opt) {
  const Qp1eqcProblem q{p.objective, p.constraint.shifted(-level)};
  const ValueRange r = value_range(q.constraint, opt.tol);
  if (!r.contains(0.0, feas_tol(q.constraint, opt.tol))) return std::nullopt;
  return solve(q, opt);
}

// Whether candidate c should replace the incumbent i. Ties stay with i.
bool improves(const SolveOutcome& c, const SolveOutcome& i) {
  if (c.value == -kInf) return i.value != -kInf;
  if (i.value == -kInf) return false;
  const double gap = 1e-9 * (1.0 + std::abs(i.value));
  if (c.value < i.value - gap) return true;
  return c.value < i.value + gap && c.status == SolveStatus::Attained &&
         i.status == SolveStatus::Unattained;
}

bool nonneg(double v, const QuadForm& f, const Tolerances& t) { return v >= -t.sign(f.data_norm()); }

}  // namespace

bool strict_feasibility(const GtrsProblem& p, const Tolerances& t) {
  check(p);
  if (!(p.l < p.u)) return false;
  const ValueRange r = value_range(p.constraint, t);
  // Value ranges are intervals, so an open overlap is enough.
  return r.lo < p.u && r.hi > p.l && r.lo < r.hi;
}

GtrsOutcome solve_gtrs(const GtrsProblem& p, const SolverOptions& opt) {
  check(p);
  const Tolerances& t = opt.tol;
  const QuadForm& f = p.objective;
  const QuadForm& h = p.constraint;
  const double ftol = feas_tol(h, t);
  const ValueRange hr = value_range(h, t);
  // Finite ends of a value range are attained.
  if (hr.lo > p.u + ftol || hr.hi < p.l - ftol) {
    throw InfeasibleProblem("h never takes a value in [l, u]");
  }
  GtrsOutcome out;
  if (p.l == p.u) {
    const SolveOutcome s = solve({f, h.shifted(-p.l)}, opt);
    out.status = s.status;
    out.value = s.value;
    out.x_star = s.x_star;
    out.mu_star = s.mu_star;
    out.source = GtrsSource::LowerBoundary;
    out.lower = s;
    return out;
  }

  const Spectrum sa = spectrum(f.A, t);
  if (sa.psd() && in_range(f.A, f.a, t.feas, t)) {
    const Vector xh = -(pinv(f.A, t).mat() * f.a);
    const Matrix nv = sa.null_vectors();
    const QuadForm hn = nv.cols() > 0 ? restrict_to_affine(h, xh, nv) : QuadForm::constant(0, h(xh));
    const ValueRange sr = value_range(hn, t);
    const double lo = std::max(p.l, sr.lo);
    const double hi = std::min(p.u, sr.hi);
    if (lo <= hi && sr.contains(lo, ftol)) {
      std::optional<Vector> x;
      const double here = h(xh);
      if (here >= p.l - ftol && here <= p.u + ftol) {
        x = xh;
      } else if (nv.cols() > 0) {
        const double level = std::clamp(here, lo, hi);
        if (const auto y = level_point(hn, level, opt.seed, 64, t)) x = Vector(xh + nv * *y);
      }
      if (x) {
        out.status = SolveStatus::Attained;
        out.x_star = *x;
        out.value = f(*x);
        out.mu_star = 0.0;
        out.source = GtrsSource::Interior;
        return out;
      }
    }
  }

  out.lower = boundary_solve(p, p.l, opt);
  out.upper = boundary_solve(p, p.u, opt);
  if (!out.lower && !out.upper) {
    // h stays strictly inside (l, u): the problem is unconstrained.
    const UnconstrainedMin um = minimize_unconstrained(f, t);
    out.source = GtrsSource::Interior;
    if (um.bounded) {
      out.status = SolveStatus::Attained;
      out.value = um.value;
      out.x_star = um.argmin;
      out.mu_star = 0.0;
    }
    return out;
  }
  const bool take_upper = !out.lower || (out.upper && improves(*out.upper, *out.lower));
  const SolveOutcome& s = take_upper ? *out.upper : *out.lower;
  out.source = take_upper ? GtrsSource::UpperBoundary : GtrsSource::LowerBoundary;
  out.status = s.status;
  out.value = s.value;
  out.x_star = s.x_star;
  out.mu_star = s.mu_star;
  return out;
}

SymMatrix interval_exception_matrix(const GtrsProblem& p, double nu, const Tolerances& t) {
  check(p);
  const QuadForm& f = p.objective;
  const QuadForm& h = p.constraint;
  const Index n = f.dim();
  const double bb = h.a.squaredNorm();
  if (bb == 0.0) throw HypothesisViolation("exception matrix needs b != 0");
  Matrix map(n, n);
  map.leftCols(n - 1) = null_basis(Matrix(h.a.transpose()), t);
  map.col(n - 1) = h.a / (2.0 * bb);
  const QuadForm g = restrict_to_affine(f, Vector::Zero(n), map);
  const double lo = p.l - h.c;
  const double hi = p.u - h.c;
  Vector e = Vector::Zero(n);
  e(n - 1) = -0.5 * (lo + hi);
  Vector sq = Vector::Zero(n);
  sq(n - 1) = 1.0;
  const QuadForm band(SymMatrix::diagonal(sq), e, lo * hi);
  return lift(g + nu * band);
}

bool interval_certifies(const GtrsProblem& p, double mu, const Tolerances& t) {
  check(p);
  if (!std::isfinite(mu)) return false;
  const QuadForm& h = p.constraint;
  const QuadForm comb = mu >= 0.0 ? p.objective + mu * (QuadForm::constant(h.dim(), p.l) - h)
                                  : p.objective + (-mu) * h.shifted(-p.u);
  const SymMatrix m = lift(comb);
  return lambda_min(m) >= -t.sign(m.norm_inf());
}

IntervalSLemmaVerdict interval_slemma(const GtrsProblem& p, const SolverOptions& opt) {
  check(p);
  const Tolerances& t = opt.tol;
  const QuadForm& f = p.objective;
  const QuadForm& h = p.constraint;
  IntervalSLemmaVerdict v;

  if (p.l == p.u) {
    const SLemmaVerdict e = slemma_equality(f, h.shifted(-p.l), opt);
    v.equivalence_holds = e.equivalence_holds;
    v.i1_true = e.e1_true;
    v.i2_true = e.e2_true;
    if (e.certificate) v.mu = -*e.certificate;
    v.counterexample = e.counterexample;
    return v;
  }
  if (!strict_feasibility(p, t)) throw StrictFeasibilityViolation("no x with l < h(x) < u");

  // I2: mu >= 0 on l - h, or mu <= 0 on h - u.
  const auto search = [&]() -> std::optional<double> {
    const QuadForm below = QuadForm::constant(h.dim(), p.l) - h;
    if (const auto m = e2_certificate_search(f, below, MultiplierSign::Nonneg, t)) return *m;
    if (const auto m = e2_certificate_search(f, h.shifted(-p.u), MultiplierSign::Nonneg, t)) return -*m;
    return std::nullopt;
  };

  const bool affine = h.A.is_zero(t.zero_block * (1.0 + f.A.norm_inf()));
  if (affine && h.a.norm() > 0.0 && spectrum(f.A, t).n_neg == 1) {
    const SymMatrix m0 = interval_exception_matrix(p, 0.0, t);
    const SymMatrix m1 = interval_exception_matrix(p, 1.0, t) - m0;
    const ConcaveMax best = max_lambda_min_affine(m0, m1, 0.0, kNuCap, t);
    const SymMatrix at = m0 + best.arg * m1;
    if (best.value >= -t.sign(at.norm_inf())) {
      v.exception_nu = best.arg;
      v.exception_matrix = at.mat();
      v.i1_true = true;
      v.mu = search();
      v.i2_true = v.mu.has_value();
      v.equivalence_holds = v.i1_true == v.i2_true;
      return v;
    }
  }

  const GtrsOutcome g = solve_gtrs(p, opt);
  v.i1_true = nonneg(g.value, f, t);
  if (v.i1_true) {
    if (g.mu_star && interval_certifies(p, -*g.mu_star, t)) {
      v.mu = -*g.mu_star;
    } else {
      v.mu = search();
    }
  } else {
    v.mu = search();
    if (g.x_star && f(*g.x_star) < -1e-8) {
      v.counterexample = g.x_star;
    } else {
      const bool upper = g.source == GtrsSource::UpperBoundary;
      if (upper || g.lower) {
        v.counterexample = e1_check(f, h.shifted(upper ? -p.u : -p.l), opt).counterexample;
      } else {
        v.counterexample = point_below(f, -1.0, t);
      }
    }
  }
  v.i2_true = v.mu.has_value();
  v.equivalence_holds = v.i1_true == v.i2_true;
  return v;
}

}  // namespace sleq
