// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sleq/errors.hpp"
#include "sleq/gtrs.hpp"
#include "sleq/numrange.hpp"
#include "sleq/oracle.hpp"
#include "sleq/qp1eqc.hpp"
#include "sleq/scond.hpp"
#include "sleq/slemma.hpp"
#include "support.hpp"

using namespace sleq;
using sleq::testing::diag;
using sleq::testing::gaussian_vec;
using sleq::testing::random_problem;
using sleq::testing::sym;
using sleq::testing::vec;

namespace {

// Pinned tolerances.
constexpr double kExact = 1e-12;        // (m) = Diag(1, 0)
constexpr double kValue = 1e-8;         // value, mu*, witness scalar
constexpr double kSingleton = 1e-7;     // pencil interval width
constexpr double kPolyakTol = 1e-10;    // V^T A V, W^T A W
constexpr double kGap = 1e-6;           // |primal - dual| / (1 + |value|)
constexpr double kPsd = 1e-9;           // independent eigenvalue check, relative
constexpr double kResidual = 1e-6;      // |h(x)| of a reported counterexample, relative
constexpr double kSuiteOneSeconds = 1.0;
constexpr double kSuiteTwoSeconds = 60.0;

struct Result {
  bool pass = true;
  std::string detail;
};

class Failures {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && first_.empty()) first_ = what;
    ok_ = ok_ && ok;
    ++checks_;
  }
  Result result(const std::string& extra = "") const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (!extra.empty()) s << ", " << extra;
    if (!ok_) s << "; first failure: " << first_;
    return {ok_, s.str()};
  }

 private:
  bool ok_ = true;
  int checks_ = 0;
  std::string first_;
};

// Built entry by entry; does not go through lift() or the library spectrum.
Matrix lifted(const QuadForm& q) {
  const Index n = q.dim();
  Matrix m(n + 1, n + 1);
  m.topLeftCorner(n, n) = q.A.mat();
  m.topRightCorner(n, 1) = q.a;
  m.bottomLeftCorner(1, n) = q.a.transpose();
  m(n, n) = q.c;
  return m;
}

bool psd_independent(const Matrix& m) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -kPsd * (1.0 + m.cwiseAbs().rowwise().sum().maxCoeff());
}

bool counterexample_ok(const QuadForm& f, const QuadForm& h, const Vector& x) {
  return std::abs(h(x)) <= kResidual * (1.0 + h.data_norm()) && f(x) < 0.0;
}

const QuadForm kX1X2{sym({{0, 0.5}, {0.5, 0}}), vec({0, 0}), 0};
const QuadForm kX2 = QuadForm::affine(vec({0, 0.5}), 0);

std::string tag(int k) { return "instance " + std::to_string(k); }

// ---- 1. exact instances ------------------------------------------------------

Result c1a() {
  Failures f;
  const SLemmaVerdict v = slemma_equality(kX1X2, QuadForm{diag({-1, 0}), vec({0, 0}), 0});
  f.require(v.branch == Branch::AssumptionFailsA || v.branch == Branch::AssumptionFailsB ||
                v.branch == Branch::AssumptionFailsNeither,
            std::string("branch ") + to_string(v.branch));
  f.require(v.null_spaces_match && !*v.null_spaces_match, "null spaces reported equal");
  f.require(v.e1_true, "e1 false");
  f.require(!v.e2_true, "e2 true");
  f.require(!v.equivalence_holds, "equivalence holds");
  return f.result(std::string("branch ") + to_string(v.branch));
}

Result c1b() {
  Failures f;
  const SLemmaVerdict v = slemma_equality(QuadForm{diag({1, -1}), vec({0, 0}), 0}, kX2);
  f.require(v.branch == Branch::Thm3Exception, std::string("branch ") + to_string(v.branch));
  f.require(v.reduced_matrix.has_value(), "no reduced matrix");
  double err = kInf;
  if (v.reduced_matrix && v.reduced_matrix->rows() == 2) {
    err = (*v.reduced_matrix - Matrix(vec({1, 0}).asDiagonal())).cwiseAbs().maxCoeff();
  }
  f.require(err <= kExact, "matrix differs from Diag(1,0)");
  f.require(!v.equivalence_holds, "equivalence holds");
  std::ostringstream s;
  s << "max |(m) - Diag(1,0)| = " << err;
  return f.result(s.str());
}

Result c1c() {
  Failures f;
  const QuadForm fn{diag({-1, -1}), vec({0, 0}), 0};
  const SLemmaVerdict v = slemma_equality(fn, kX2);
  f.require(v.equivalence_holds, "equivalence fails");
  f.require(!v.e1_true && !v.e2_true, "flags");
  f.require(v.counterexample && counterexample_ok(fn, kX2, *v.counterexample), "counterexample");
  return f.result();
}

Result c1d() {
  Failures f;
  const Qp1eqcProblem p{QuadForm{diag({1, 0}), vec({0, 0}), 0}, QuadForm{sym({{0, 0.5}, {0.5, 0}}), vec({0, 0}), -1}};
  const SolveOutcome o = solve(p);
  f.require(o.status == SolveStatus::Unattained, std::string("status ") + to_string(o.status));
  f.require(std::abs(o.value) <= kValue, "value");
  f.require(o.mu_star && std::abs(*o.mu_star) <= kValue, "mu*");
  f.require(o.pencil && !o.pencil->empty && std::abs(o.pencil->lo) <= kSingleton &&
                std::abs(o.pencil->hi) <= kSingleton,
            "pencil interval not {0}");
  f.require(o.witness && o.witness->label == "soluset2" && std::abs(o.witness->scalar + 1.0) <= kValue,
            "witness scalar");
  return f.result();
}

Result c1e() {
  Failures f;
  const NumrangeProblem p{QuadForm{diag({2, -1}), vec({0, 0}), 0}, {AffineMap{vec({0.5, 0.5}), 0}}};
  const ConvexityVerdict v = classify_convexity(p);
  f.require(!v.convex, "convex");
  f.require(v.kase == ConvexityCase::A, "case");
  f.require(v.vav_eigenvalues.size() == 1 && std::abs(v.vav_eigenvalues(0) - 0.5) <= kPolyakTol, "V^T A V");
  f.require(v.witness_eig && std::abs(*v.witness_eig + 0.4) <= kPolyakTol, "W^T A W");
  return f.result();
}

// ---- 2. property suites ------------------------------------------------------

std::pair<QuadForm, QuadForm> exception_instance(std::mt19937_64& rng, Index n) {
  const Matrix g = sleq::testing::gaussian(rng, n + 1, n);
  const SymMatrix lq(Matrix(g * g.transpose()));
  const QuadForm q(SymMatrix(Matrix(lq.mat().topLeftCorner(n, n))), lq.mat().topRightCorner(n, 1).col(0), lq(n, n));
  const QuadForm h = QuadForm::affine(gaussian_vec(rng, n), gaussian_vec(rng, 1)(0));
  return {q - 50.0 * square_affine(h), h};
}

GtrsProblem random_gtrs(std::mt19937_64& rng, int k) {
  const Qp1eqcProblem p = random_problem(rng, k % sleq::testing::kProblemFamilies);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  const double a = -w(rng);
  return {p.objective, p.constraint, a, a + w(rng)};
}

Result c2_certificates() {
  Failures f;
  std::mt19937_64 rng(101);
  int mu = 0, lam = 0, interval = 0, nu = 0;
  for (int k = 0; k < 200; ++k) {
    const Qp1eqcProblem p = random_problem(rng, k % sleq::testing::kProblemFamilies);
    const SLemmaVerdict v = slemma_equality(p.objective, p.constraint);
    if (v.certificate) {
      ++mu;
      f.require(psd_independent(lifted(p.objective) + *v.certificate * lifted(p.constraint)), "mu " + tag(k));
    }
  }
  for (int k = 0; k < 30; ++k) {
    const auto [fq, h] = exception_instance(rng, 2 + k % 3);
    for (const double eps : {0.01, 0.1, 1.0}) {
      const RegularizedCertificate r = regularized_lambda(fq, h, eps);
      const QuadForm hp = r.exponent == 2 ? square_affine(h) : h;
      const QuadForm cushion(SymMatrix::identity(fq.dim()), Vector::Zero(fq.dim()), 1.0);
      ++lam;
      f.require(psd_independent(lifted(fq) + r.lambda_eps * lifted(hp) + eps * lifted(cushion)), "lambda " + tag(k));
    }
  }
  for (int k = 0; k < 200; ++k) {
    const GtrsProblem p = random_gtrs(rng, k);
    if (!strict_feasibility(p)) continue;
    const IntervalSLemmaVerdict v = interval_slemma(p);
    if (v.mu) {
      ++interval;
      const double pos = std::max(*v.mu, 0.0);
      const double neg = std::max(-*v.mu, 0.0);
      const Matrix m = lifted(p.objective) + neg * lifted(p.constraint.shifted(-p.u)) +
                       pos * lifted(QuadForm::constant(p.objective.dim(), p.l) - p.constraint);
      f.require(psd_independent(m), "interval mu " + tag(k));
    }
    if (v.exception_nu) {
      ++nu;
      f.require(psd_independent(interval_exception_matrix(p, *v.exception_nu).mat()), "nu " + tag(k));
    }
  }
  return f.result(std::to_string(mu) + " mu, " + std::to_string(lam) + " lambda_eps, " + std::to_string(interval) +
                  " interval mu, " + std::to_string(nu) + " nu");
}

Result c2_oracles() {
  Failures f;
  std::mt19937_64 rng(202);
  const auto grid = mu_grid(-100, 100, 0.05);
  int refuted = 0, found = 0;
  for (int k = 0; k < 200; ++k) {
    const Qp1eqcProblem p = random_problem(rng, k % sleq::testing::kProblemFamilies);
    const SLemmaVerdict v = slemma_equality(p.objective, p.constraint);
    const E1Oracle o = oracle_e1(p.objective, p.constraint, 2000, static_cast<std::uint64_t>(k));
    if (o.refuted) {
      ++refuted;
      f.require(!v.e1_true, "e1 asserted but refuted, " + tag(k));
    }
    const E2Oracle g = oracle_e2(p.objective, p.constraint, grid);
    if (g.found) {
      ++found;
      f.require(v.e2_true, "e2 denied but grid mu found, " + tag(k));
    }
    if (!v.e1_true) {
      f.require(v.counterexample && counterexample_ok(p.objective, p.constraint, *v.counterexample),
                "unverified counterexample, " + tag(k));
    }
  }
  return f.result(std::to_string(refuted) + " oracle refutations, " + std::to_string(found) + " grid multipliers");
}

Result c2_duality() {
  Failures f;
  std::mt19937_64 rng(303);
  int attained = 0, finite = 0;
  for (int k = 0; k < 300; ++k) {
    const Qp1eqcProblem p = random_problem(rng, k % sleq::testing::kProblemFamilies);
    const SolveOutcome o = solve(p);
    if (o.route != "dual" || !std::isfinite(o.value)) continue;
    ++finite;
    f.require(o.mu_star && std::isfinite(dual_value(p, *o.mu_star)), "dual not attained, " + tag(k));
    if (o.status == SolveStatus::Attained) {
      ++attained;
      f.require(o.mu_star && std::abs(o.value - dual_value(p, *o.mu_star)) <= kGap * (1.0 + std::abs(o.value)),
                "gap, " + tag(k));
    }
  }
  return f.result(std::to_string(finite) + " finite dual-route values, " + std::to_string(attained) + " attained");
}

Result c2_more() {
  Failures f;
  std::mt19937_64 rng(404);
  int verified = 0;
  for (int k = 0; k < 300; ++k) {
    const Qp1eqcProblem p = random_problem(rng, k % sleq::testing::kProblemFamilies);
    if (!assumption1_holds(p.constraint) || constraint_is_affine(p)) continue;
    const SolveOutcome o = solve(p);
    if (o.status != SolveStatus::Attained || !o.mu_star) continue;
    ++verified;
    f.require(verify_global_optimality(p, *o.x_star, *o.mu_star), "rejected, " + tag(k));
  }
  return f.result(std::to_string(verified) + " attained outcomes");
}

Result c2_scond() {
  Failures f;
  std::mt19937_64 rng(505);
  int any = 0;
  for (int k = 0; k < 300; ++k) {
    const Qp1eqcProblem p = random_problem(rng, k % sleq::testing::kProblemFamilies);
    QuadForm h = p.constraint;
    if (k % 4 == 1) h = QuadForm(h.A, Vector::Zero(h.dim()), 0.0);
    if (k % 4 == 2) h = QuadForm(sleq::testing::random_inertia(rng, 0, 0, static_cast<int>(h.dim())), h.a, k % 8 < 4 ? 0.0 : -1.0);
    const auto s = sconditions(p.objective, h);
    if (s[0]) f.require(s[1], "1 => 2, " + tag(k));
    if (s[0] && h.c == 0.0) f.require(s[3], "1 => 4, " + tag(k));
    if (s[2]) f.require(s[3], "3 => 4, " + tag(k));
    if ((s[0] || s[1] || s[2] || s[3]) && assumption1_holds(h)) {
      ++any;
      f.require(slemma_equality(p.objective, h).equivalence_holds, "sufficiency, " + tag(k));
    }
  }
  const QuadForm fn{diag({-1, -1}), vec({0, 0}), 0};
  const auto w = sconditions(fn, kX2);
  f.require(!w[0] && !w[1] && !w[2] && !w[3], "witness satisfies a condition");
  f.require(slemma_equality(fn, kX2).equivalence_holds, "witness equivalence");
  return f.result(std::to_string(any) + " instances with some condition");
}

Result c2_pd_objectives() {
  Failures f;
  std::mt19937_64 rng(606);
  const auto instance = [&](Index n, int p, bool independent) {
    NumrangeProblem out{QuadForm(sleq::testing::random_inertia(rng, 0, 0, static_cast<int>(n)), gaussian_vec(rng, n), 0.0), {}};
    for (int i = 0; i < p; ++i) {
      Vector b = gaussian_vec(rng, n);
      if (!independent && i >= n - 1) b = out.affines[0].b + 0.5 * out.affines[static_cast<std::size_t>(i % (n - 1))].b;
      out.affines.push_back({b, gaussian_vec(rng, 1)(0)});
    }
    return out;
  };
  for (int k = 0; k < 50; ++k) {
    const Index n = 2 + k % 3;
    const ConvexityVerdict v = classify_convexity(instance(n, 1 + k % static_cast<int>(n + 1), false));
    f.require(v.rank <= n - 1 && v.convex, "rank-deficient instance nonconvex, " + tag(k));
  }
  for (int k = 0; k < 50; ++k) {
    const Index n = 1 + k % 4;
    f.require(!classify_convexity(instance(n, static_cast<int>(n), true)).convex, "full-rank instance convex, " + tag(k));
  }
  return f.result();
}

// ---- 3. degenerate inputs ----------------------------------------------------

Result c3_point_interval() {
  Failures f;
  std::mt19937_64 rng(707);
  for (int k = 0; k < 40; ++k) {
    const Qp1eqcProblem p = random_problem(rng, k % sleq::testing::kProblemFamilies);
    const GtrsProblem g{p.objective, p.constraint, 0.0, 0.0};
    const SolveOutcome e = solve(p);
    const GtrsOutcome o = solve_gtrs(g);
    f.require(o.status == e.status, "status, " + tag(k));
    f.require(o.value == e.value || std::abs(o.value - e.value) <= kGap * (1.0 + std::abs(e.value)), "value, " + tag(k));
    f.require(interval_slemma(g).equivalence_holds == slemma_equality(p.objective, p.constraint).equivalence_holds,
              "verdict, " + tag(k));
  }
  return f.result();
}

Result c3_constant() {
  Failures f;
  const QuadForm fn{diag({1, -1}), vec({0, 0}), 0};
  for (const double c : {1.0, -2.5}) {
    const QuadForm h = QuadForm::constant(2, c);
    const auto throws_infeasible = [](const std::function<void()>& call) {
      try {
        call();
      } catch (const InfeasibleConstraint&) {
        return true;
      } catch (...) {
      }
      return false;
    };
    f.require(throws_infeasible([&] { solve({fn, h}); }), "solve");
    f.require(throws_infeasible([&] { slemma_equality(fn, h); }), "slemma_equality");
  }
  return f.result();
}

Result c3_affine() {
  Failures f;
  std::mt19937_64 rng(808);
  for (int k = 0; k < 100; ++k) {
    const Qp1eqcProblem p = random_problem(rng, 1);
    const SolveOutcome o = solve(p);
    f.require(o.route == "reduced" && !o.pencil, "pencil path used, " + tag(k));
  }
  return f.result();
}

struct Criterion {
  const char* id;
  const char* name;
  std::function<Result()> run;
};

double run_suite(const std::vector<Criterion>& cs, bool& all) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const Criterion& c : cs) {
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    all = all && r.pass;
    std::printf("%s %-4s %s (%s)\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str());
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void timing(const char* id, const char* name, double seconds, double limit, bool& all) {
  const bool ok = seconds < limit;
  all = all && ok;
  std::printf("%s %-4s %s (%.3f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", id, name, seconds, limit);
}

}  // namespace

int main() {
  bool all = true;
  const double t1 = run_suite({{"1a", "x1 x2 with -x1^2: assumption fails, null spaces differ", c1a},
                               {"1b", "x1^2 - x2^2 with x2: exception, (m) = Diag(1,0)", c1b},
                               {"1c", "-|x|^2 with x2: equivalence with both sides false", c1c},
                               {"1d", "x1^2 on x1 x2 = 1: unattained, singleton pencil", c1d},
                               {"1e", "Polyak instance: nonconvex, case a", c1e}},
                              all);
  timing("1t", "exact instances runtime", t1, kSuiteOneSeconds, all);
  const double t2 = run_suite({{"2.1", "certificate soundness", c2_certificates},
                               {"2.2", "oracle consistency", c2_oracles},
                               {"2.3", "strong duality", c2_duality},
                               {"2.4", "global optimality verification", c2_more},
                               {"2.5", "S-Condition implications and witness", c2_scond},
                               {"2.6", "convexity for positive definite objectives", c2_pd_objectives}},
                              all);
  timing("2t", "property suites runtime", t2, kSuiteTwoSeconds, all);
  run_suite({{"3a", "l = u interval problems follow the equality lemma", c3_point_interval},
             {"3b", "constant nonzero constraint is infeasible", c3_constant},
             {"3c", "affine constraints stay off the pencil path", c3_affine}},
            all);
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
