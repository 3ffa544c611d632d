#include "sleq/qp1eqc.hpp"

#include <algorithm>
#include <cmath>

#include "sleq/errors.hpp"
#include "sleq/oracle.hpp"
#include "sleq/slemma.hpp"

namespace sleq {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::Unattained: return "Unattained";
    case SolveStatus::Attained: return "Attained";
  }
  return "?";
}

bool constraint_is_affine(const Qp1eqcProblem& p, const Tolerances& t) {
  return p.constraint.A.is_zero(t.zero_block * (1.0 + p.objective.A.norm_inf()));
}

namespace {

void check_dims(const Qp1eqcProblem& p) {
  if (p.objective.dim() != p.constraint.dim()) {
    throw DimensionMismatch("objective and constraint dimensions differ");
  }
  if (p.objective.dim() < 1) throw DimensionMismatch("problem dimension must be at least 1");
}

// Stationary set y0 + V y of the Lagrangian at mu.
struct KktSet {
  Vector y0;
  Matrix V;
};

KktSet kkt_set(const Qp1eqcProblem& p, double mu, const Tolerances& t) {
  const SymMatrix m = p.objective.A + mu * p.constraint.A;
  const Vector r = p.objective.a + mu * p.constraint.a;
  const double cut = 10.0 * t.sign(m.norm_inf());
  const Spectrum s = spectrum(m, cut);
  return {-(pinv(m, cut).mat() * r), s.null_vectors()};
}

// Dual data restricted to the complement of the common null space of A, B.
struct ReducedDual {
  SymMatrix A, B;
  Vector a, b;
  double c = 0.0, d = 0.0;

  // Value of the dual at an interior point, with phi = h(x(mu)).
  double eval(double mu, double* phi) const {
    const Matrix m = (A + mu * B).mat();
    const Vector r = a + mu * b;
    const Eigen::LDLT<Matrix> ldlt(m);
    const Vector w = -ldlt.solve(r);
    if (phi) *phi = w.dot(B.mat() * w) + 2.0 * b.dot(w) + d;
    return c + mu * d + r.dot(w);
  }
  double phi(double mu) const {
    double v = 0.0;
    eval(mu, &v);
    return v;
  }
};

SolveOutcome solve_reduced(const Qp1eqcProblem& p, const SolverOptions& opt) {
  const Tolerances& t = opt.tol;
  const QuadForm& f = p.objective;
  const QuadForm& h = p.constraint;
  const Index n = f.dim();
  SolveOutcome out;
  out.route = "reduced";

  const bool affine = constraint_is_affine(p, t);
  const double bb = h.a.squaredNorm();
  const auto flat = constraint_flat(p, t);
  const Vector& x0 = flat->x0;
  const Matrix& v = flat->basis;
  const bool constant = affine && v.cols() == n;
  const QuadForm g = v.cols() > 0 ? restrict_to_affine(f, x0, v) : QuadForm::constant(0, f(x0));
  const UnconstrainedMin um = minimize_unconstrained(g, t);
  if (!um.bounded) return out;

  const Vector x = v.cols() > 0 ? Vector(x0 + v * *um.argmin) : x0;
  out.status = SolveStatus::Attained;
  out.x_star = x;
  out.value = f(x);
  const Vector grad = f.A.mat() * x + f.a;
  if (affine && bb > 0.0 && !constant) {
    out.mu_star = -h.a.dot(grad) / bb;
  } else if (grad.norm() <= 1e-6 * (1.0 + f.data_norm())) {
    // The gradient of h vanishes on {h = 0}: any mu in the pencil works.
    if (affine) {
      if (spectrum(f.A, t).psd()) out.mu_star = 0.0;
    } else {
      const PencilInterval pi = pencil_interval(f.A, h.A, t);
      if (!pi.empty) out.mu_star = pi.interior_point();
    }
  }
  return out;
}

SolveOutcome solve_dual(const Qp1eqcProblem& p, const SolverOptions& opt) {
  const Tolerances& t = opt.tol;
  const QuadForm& h = p.constraint;
  SolveOutcome out;
  out.route = "dual";
  const DualProfile dp = maximize_dual(p, t);
  out.pencil = dp.interval;
  if (!dp.finite()) return out;
  out.mu_star = dp.mu_star;
  out.dual_value = dp.value;

  if (dp.interval.singleton(t)) {
    const KktSet k = kkt_set(p, dp.mu_star, t);
    const QuadForm hk = k.V.cols() > 0 ? restrict_to_affine(h, k.y0, k.V)
                                       : QuadForm::constant(0, h(k.y0));
    if (!value_range(hk, t).contains(0.0, feas_tol(h, t))) {
      AttainabilityWitness w;
      w.y0 = k.y0;
      w.V = k.V;
      const Vector g = k.V.transpose() * (h.A.mat() * k.y0 + h.a);
      const SymMatrix vbv = h.A.congruence(k.V);
      w.scalar = h(k.y0) - g.dot(pinv(vbv, t).mat() * g);
      const Spectrum sv = spectrum(vbv, t);
      w.label = (w.scalar > 0.0 && sv.psd()) ? "soluset1" : (w.scalar < 0.0 && sv.nsd()) ? "soluset2" : "range";
      out.status = SolveStatus::Unattained;
      out.value = dp.value;
      out.witness = w;
      return out;
    }
  }
  const Vector x = recover_primal(p, dp.mu_star, opt);
  out.status = SolveStatus::Attained;
  out.x_star = x;
  out.value = p.objective(x);
  return out;
}

}  // namespace

std::optional<ConstraintFlat> constraint_flat(const Qp1eqcProblem& p, const Tolerances& t) {
  const QuadForm& h = p.constraint;
  const Index n = h.dim();
  if (constraint_is_affine(p, t)) {
    const ValueRange hr = value_range(QuadForm::affine(h.a, h.c), t);
    if (hr.lo_attained && hr.hi_attained) return ConstraintFlat{Vector::Zero(n), Matrix::Identity(n, n)};
    const double bb = h.a.squaredNorm();
    return ConstraintFlat{-(h.c / (2.0 * bb)) * h.a, null_basis(Matrix(h.a.transpose()), t)};
  }
  if (assumption1_holds(h, t)) return std::nullopt;
  return ConstraintFlat{-(pinv(h.A, t).mat() * h.a), null_basis(h.A.mat(), t)};
}

double dual_value(const Qp1eqcProblem& p, double mu, const Tolerances& t) {
  check_dims(p);
  const QuadForm& f = p.objective;
  const QuadForm& h = p.constraint;
  const SymMatrix m = f.A + mu * h.A;
  const Vector r = f.a + mu * h.a;
  if (lambda_min(m) < -t.sign(m.norm_inf())) return -kInf;
  if (!in_range(m, r, t.feas, t)) return -kInf;
  return f.c + mu * h.c - r.dot(pinv(m, t).mat() * r);
}

DualProfile maximize_dual(const Qp1eqcProblem& p, const Tolerances& t) {
  check_dims(p);
  const QuadForm& f = p.objective;
  const QuadForm& h = p.constraint;
  const Index n = f.dim();
  DualProfile out;
  out.interval = pencil_interval(f.A, h.A, t);
  if (out.interval.empty) return out;

  Matrix stacked(2 * n, n);
  stacked << f.A.mat(), h.A.mat();
  const Matrix k = null_basis(stacked, t.sign(f.A.norm_inf() + h.A.norm_inf()), t);
  const double vtol = t.feas * (1.0 + f.a.norm() + h.a.norm());
  if (k.cols() > 0) {
    const Vector kb = k.transpose() * h.a;
    const Vector ka = k.transpose() * f.a;
    if (kb.norm() > vtol) {
      // Range feasibility pins mu to the single value cancelling a + mu b on N(A) ∩ N(B).
      const double mu = -kb.dot(ka) / kb.squaredNorm();
      if ((ka + mu * kb).norm() > vtol) return out;
      if (!out.interval.contains(mu, t.singleton * (1.0 + std::abs(mu)))) return out;
      out.mu_star = mu;
      out.value = dual_value(p, mu, t);
      return out;
    }
    if (ka.norm() > vtol) return out;
  }
  const Matrix u = orthogonal_complement(k, n);
  if (u.cols() == 0) {
    if (std::abs(h.c) <= vtol) {
      out.mu_star = 0.0;
      out.value = f.c;
    }
    return out;
  }
  const ReducedDual rd{f.A.congruence(u), h.A.congruence(u), u.transpose() * f.a,
                       u.transpose() * h.a, f.c, h.c};

  const PencilInterval& iv = out.interval;
  if (iv.singleton(t)) {
    out.mu_star = 0.5 * (iv.lo + iv.hi);
    out.value = dual_value(p, out.mu_star, t);
    return out;
  }
  const double lo = iv.lo;
  const double hi = iv.hi;
  const double width = hi - lo;
  const auto delta = [&](double end) {
    double dl = 1e-8 * (1.0 + std::abs(end));
    if (std::isfinite(width)) dl = std::min(dl, 0.25 * width);
    return dl;
  };
  const auto at_end = [&](double end, double inner) {
    out.mu_star = end;
    const double v = dual_value(p, end, t);
    out.value = std::isfinite(v) ? v : rd.eval(inner, nullptr);
    return out;
  };
  if (std::isfinite(lo) && rd.phi(lo + delta(lo)) <= 0.0) return at_end(lo, lo + delta(lo));
  if (std::isfinite(hi) && rd.phi(hi - delta(hi)) >= 0.0) return at_end(hi, hi - delta(hi));

  const double start = iv.interior_point();
  double left = std::isfinite(lo) ? lo + delta(lo) : start;
  for (double step = 1.0; rd.phi(left) <= 0.0; step *= 2.0) {
    left = start - step;
    if (std::abs(left) > t.mu_cap) {
      out.mu_star = left;
      out.value = rd.eval(left, nullptr);
      return out;
    }
  }
  double right = std::isfinite(hi) ? hi - delta(hi) : std::max(start, left);
  for (double step = 1.0; rd.phi(right) >= 0.0; step *= 2.0) {
    right = std::max(start, left) + step;
    if (std::abs(right) > t.mu_cap) {
      out.mu_star = right;
      out.value = rd.eval(right, nullptr);
      return out;
    }
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (left + right);
    if (mid <= left || mid >= right) break;
    const double ph = rd.phi(mid);
    if (ph > 0.0) {
      left = mid;
    } else if (ph < 0.0) {
      right = mid;
    } else {
      left = right = mid;
      break;
    }
  }
  out.mu_star = std::abs(rd.phi(left)) <= std::abs(rd.phi(right)) ? left : right;
  out.value = rd.eval(out.mu_star, nullptr);
  return out;
}

SolveOutcome solve(const Qp1eqcProblem& p, const SolverOptions& opt) {
  check_dims(p);
  require_feasible(p.constraint, opt.tol);
  if (constraint_is_affine(p, opt.tol) || !assumption1_holds(p.constraint, opt.tol)) {
    return solve_reduced(p, opt);
  }
  return solve_dual(p, opt);
}

Vector recover_primal(const Qp1eqcProblem& p, double mu, const SolverOptions& opt) {
  check_dims(p);
  const Tolerances& t = opt.tol;
  const QuadForm& h = p.constraint;
  const KktSet k = kkt_set(p, mu, t);
  const double ftol = feas_tol(h, t);
  if (std::abs(h(k.y0)) <= ftol) return k.y0;
  if (k.V.cols() == 0) {
    throw HardCaseRecoveryFailed("stationary point is infeasible and A + mu B is nonsingular");
  }
  const QuadForm hv = restrict_to_affine(h, k.y0, k.V);
  const auto y = level_point(hv, 0.0, opt.seed, 64, t);
  if (!y) throw HardCaseRecoveryFailed("no root of h on the stationary set after 64 directions");
  const Vector x = k.y0 + k.V * *y;
  if (std::abs(h(x)) > feas_tol(h, x, t)) throw HardCaseRecoveryFailed("recovered point violates the constraint");
  return x;
}

bool verify_global_optimality(const Qp1eqcProblem& p, const Vector& x, double mu,
                              const Tolerances& t) {
  check_dims(p);
  if (constraint_is_affine(p, t)) throw HypothesisViolation("optimality test needs B != 0");
  if (!assumption1_holds(p.constraint, t)) {
    throw HypothesisViolation("optimality test needs h to take both signs");
  }
  const QuadForm& f = p.objective;
  const QuadForm& h = p.constraint;
  const SymMatrix m = f.A + mu * h.A;
  const double data = f.data_norm() + h.data_norm();
  const Vector res = m.mat() * x + f.a + mu * h.a;
  return std::abs(h(x)) <= feas_tol(h, x, t) && res.norm() <= 10.0 * t.feas * (1.0 + data) &&
         lambda_min(m) >= -t.sign(m.norm_inf());
}

double strong_duality_gap(const Qp1eqcProblem& p, const SolverOptions& opt) {
  const SolveOutcome s = solve(p, opt);
  if (!std::isfinite(s.value)) throw PreconditionViolation("duality gap needs a finite primal value");
  const DualProfile d = maximize_dual(p, opt.tol);
  if (!d.finite()) return kInf;
  return std::abs(s.value - d.value);
}

std::optional<Vector> feasible_point_below(const Qp1eqcProblem& p, double target,
                                           const SolverOptions& opt,
                                           const std::optional<Matrix>& bias) {
  const QuadForm& f = p.objective;
  const QuadForm& h = p.constraint;
  const double ftol = feas_tol(h, opt.tol);
  if (const auto flat = constraint_flat(p, opt.tol)) {
    if (flat->basis.cols() == 0) {
      if (f(flat->x0) < target) return flat->x0;
      return std::nullopt;
    }
    const auto y = point_below(restrict_to_affine(f, flat->x0, flat->basis), target, opt.tol);
    if (!y) return std::nullopt;
    return Vector(flat->x0 + flat->basis * *y);
  }

  std::vector<Vector> pts;
  const double scales[] = {1.0, 10.0, 100.0};
  for (int i = 0; i < 3; ++i) {
    SampleOptions so;
    so.anchor_scale = scales[i];
    if (bias) {
      so.bias = bias;
      so.bias_scale = 10.0 * scales[i];
    }
    const auto s = sample_constraint(h, 300, opt.seed + static_cast<std::uint64_t>(i), so, opt.tol);
    pts.insert(pts.end(), s.begin(), s.end());
  }
  if (pts.empty()) return std::nullopt;
  std::sort(pts.begin(), pts.end(), [&](const Vector& x, const Vector& y) { return f(x) < f(y); });
  if (f(pts.front()) < target) return pts.front();

  const std::size_t starts = std::min<std::size_t>(pts.size(), 5);
  for (std::size_t s = 0; s < starts; ++s) {
    Vector x = pts[s];
    double fx = f(x);
    double alpha = 1e-2 * (1.0 + x.norm());
    for (int it = 0; it < 1000; ++it) {
      const Vector g = f.gradient(x);
      const Vector nv = h.gradient(x);
      if (nv.norm() < 1e-12) break;
      Vector dir = -(g - (g.dot(nv) / nv.squaredNorm()) * nv);
      if (dir.norm() < 1e-14 * (1.0 + g.norm())) break;
      dir /= dir.norm();
      bool improved = false;
      for (int tries = 0; tries < 40 && !improved; ++tries) {
        const Vector xt = x + alpha * dir;
        const double a2 = nv.dot(h.A.mat() * nv);
        const double a1 = nv.dot(h.A.mat() * xt + h.a);
        std::vector<double> roots = quadratic_roots(a2, a1, h(xt));
        std::sort(roots.begin(), roots.end(),
                  [](double u, double v) { return std::abs(u) < std::abs(v); });
        if (!roots.empty()) {
          const Vector xn = xt + roots.front() * nv;
          if (std::abs(h(xn)) <= ftol && f(xn) < fx) {
            x = xn;
            fx = f(xn);
            alpha *= 2.0;
            improved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!improved) break;
      if (fx < target) return x;
    }
  }
  return std::nullopt;
}

}  // namespace sleq
