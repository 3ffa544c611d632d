#include <cmath>
#include <random>

#include "doctest.h"
#include "sleq/errors.hpp"
#include "sleq/oracle.hpp"
#include "sleq/qp1eqc.hpp"
#include "sleq/slemma.hpp"
#include "support.hpp"

using namespace sleq;
using sleq::testing::diag;
using sleq::testing::sym;
using sleq::testing::vec;

namespace {

const QuadForm kHyperbola{sym({{0, 0.5}, {0.5, 0}}), vec({0, 0}), -1};  // x1 x2 - 1
const Qp1eqcProblem kUnattained{QuadForm{diag({1, 0}), vec({0, 0}), 0}, kHyperbola};
const Qp1eqcProblem kSphere{QuadForm{diag({-1, -1}), vec({0, 0}), 0},
                            QuadForm{diag({1, 1}), vec({0, 0}), -1}};

double data_norm(const Qp1eqcProblem& p) {
  return p.objective.data_norm() + p.constraint.data_norm();
}

}  // namespace

TEST_CASE("dual_value examples") {
  CHECK(dual_value(kUnattained, 0.0) == doctest::Approx(0.0));

  // f = x^2, h = x - 1: d(mu) = -mu - mu^2/4.
  const Qp1eqcProblem line{QuadForm{diag({1}), vec({0}), 0}, QuadForm::affine(vec({0.5}), -1)};
  for (const double mu : {-4.0, -2.0, -1.0, 0.0, 0.5, 3.0}) {
    CHECK(dual_value(line, mu) == doctest::Approx(-mu - mu * mu / 4.0).epsilon(1e-12));
  }
  const DualProfile dp = maximize_dual(line);
  CHECK(dp.mu_star == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(dp.value == doctest::Approx(1.0).epsilon(1e-10));

  const Qp1eqcProblem outside{QuadForm{diag({1, 1}), vec({0, 0}), 0},
                              QuadForm{diag({1, -1}), vec({0, 0}), 0}};
  CHECK(dual_value(outside, 2.0) == -kInf);
  // a + mu b outside the range of A + mu B.
  const Qp1eqcProblem norange{QuadForm{diag({1, 0}), vec({0, 1}), 0}, QuadForm{diag({0, 0}), vec({0, 0}), 0}};
  CHECK(dual_value(norange, 0.0) == -kInf);
}

TEST_CASE("solve examples") {
  const SolveOutcome u = solve(kUnattained);
  CHECK(u.status == SolveStatus::Unattained);
  CHECK(u.value == doctest::Approx(0.0).epsilon(1e-9));
  REQUIRE(u.mu_star);
  CHECK(std::abs(*u.mu_star) <= 1e-7);
  REQUIRE(u.witness);
  CHECK(u.witness->scalar == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(u.witness->label == "soluset2");
  CHECK(u.witness->V.cols() == 1);
  CHECK(std::abs(u.witness->V(1, 0)) == doctest::Approx(1.0));

  const Qp1eqcProblem lin{QuadForm{diag({1, 1}), vec({0, 0}), 0}, QuadForm::affine(vec({0.5, 0}), -1)};
  const SolveOutcome a = solve(lin);
  CHECK(a.status == SolveStatus::Attained);
  CHECK(a.value == doctest::Approx(1.0));
  REQUIRE(a.x_star);
  CHECK((*a.x_star - vec({1, 0})).norm() <= 1e-12);

  const Qp1eqcProblem unb{QuadForm{diag({-1, 0}), vec({0, 0}), 0}, QuadForm::affine(vec({0, 0.5}), 0)};
  const SolveOutcome b = solve(unb);
  CHECK(b.status == SolveStatus::Unbounded);
  CHECK(b.value == -kInf);

  CHECK_THROWS_AS(solve({QuadForm{diag({1}), vec({0}), 0}, QuadForm{diag({1}), vec({0}), 1}}),
                  InfeasibleConstraint);
}

TEST_CASE("recover_primal") {
  // f = x1^2 - x2^2 on x2 = 0: minimizer at the origin.
  const Qp1eqcProblem p{QuadForm{diag({1, -1}), vec({0, 0}), 0}, QuadForm::affine(vec({0, 0.5}), 0)};
  const SolveOutcome s = solve(p);
  REQUIRE(s.status == SolveStatus::Attained);
  CHECK(s.value == doctest::Approx(0.0));
  CHECK_FALSE(oracle_e1(p.objective, p.constraint, 10000, 3).refuted);

  // Hard case: A + mu* B = 0.
  const Vector x = recover_primal(kSphere, 1.0);
  CHECK(std::abs(x.norm() - 1.0) <= 1e-9);
  CHECK(kSphere.objective(x) == doctest::Approx(-1.0));
  const SolveOutcome t = solve(kSphere);
  REQUIRE(t.status == SolveStatus::Attained);
  CHECK(t.value == doctest::Approx(-1.0));
  REQUIRE(t.mu_star);
  CHECK(*t.mu_star == doctest::Approx(1.0).epsilon(1e-8));

  // A nonsingular stationary point off the constraint cannot be repaired.
  const Qp1eqcProblem q{QuadForm{diag({1, 1}), vec({0, 0}), 0}, QuadForm{diag({1, 1}), vec({0, 0}), -1}};
  CHECK_THROWS_AS(recover_primal(q, 0.5), HardCaseRecoveryFailed);
}

TEST_CASE("verify_global_optimality") {
  CHECK(verify_global_optimality(kSphere, vec({1, 0}), 1.0));
  CHECK_FALSE(verify_global_optimality(kSphere, vec({1, 0}), 0.0));
  CHECK_FALSE(verify_global_optimality(kSphere, vec({std::sqrt(1.5), 0}), 1.0));
  const Qp1eqcProblem lin{QuadForm{diag({1, 1}), vec({0, 0}), 0}, QuadForm::affine(vec({0.5, 0}), -1)};
  CHECK_THROWS_AS(verify_global_optimality(lin, vec({1, 0}), -2.0), HypothesisViolation);
  const Qp1eqcProblem flat{QuadForm{diag({1, 1}), vec({0, 0}), 0}, QuadForm{diag({-1, 0}), vec({0, 0}), 0}};
  CHECK_THROWS_AS(verify_global_optimality(flat, vec({0, 1}), 0.0), HypothesisViolation);
}

TEST_CASE("strong_duality_gap") {
  CHECK(strong_duality_gap(kUnattained) <= 1e-9);
  CHECK(strong_duality_gap(kSphere) <= 1e-6);
  const Qp1eqcProblem lin{QuadForm{diag({1, 1}), vec({0, 0}), 0}, QuadForm::affine(vec({0.5, 0}), -1)};
  CHECK(strong_duality_gap(lin) <= 1e-6);
  // Without a sign change of h the dual can be unbounded: x1 x2 on x1 = 0.
  const Qp1eqcProblem flat{QuadForm{sym({{0, 0.5}, {0.5, 0}}), vec({0, 0}), 0},
                           QuadForm{diag({-1, 0}), vec({0, 0}), 0}};
  CHECK(strong_duality_gap(flat) == kInf);
}

TEST_CASE("weak duality and concavity on random instances") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int k = 0; k < 60; ++k) {
    const Qp1eqcProblem p = sleq::testing::random_problem(rng, k % sleq::testing::kProblemFamilies);
    const PencilInterval iv = pencil_interval(p.objective.A, p.constraint.A);
    if (iv.empty) continue;
    std::vector<double> mus;
    const double lo = std::isfinite(iv.lo) ? iv.lo : iv.interior_point() - 5.0;
    const double hi = std::isfinite(iv.hi) ? iv.hi : iv.interior_point() + 5.0;
    for (int i = 0; i <= 8; ++i) mus.push_back(lo + (hi - lo) * i / 8.0);
    const auto pts = sample_constraint(p.constraint, 100, static_cast<std::uint64_t>(k));
    for (const double mu : mus) {
      const double dv = dual_value(p, mu);
      if (!std::isfinite(dv)) continue;
      ++checked;
      for (const Vector& x : pts) {
        CHECK(dv <= p.objective(x) + 1e-6 * (1.0 + std::abs(p.objective(x))));
      }
    }
    for (std::size_t i = 0; i + 2 < mus.size(); ++i) {
      const double d0 = dual_value(p, mus[i]);
      const double d2 = dual_value(p, mus[i + 2]);
      const double d1 = dual_value(p, 0.5 * (mus[i] + mus[i + 2]));
      if (std::isfinite(d0) && std::isfinite(d2)) {
        CHECK(d1 >= 0.5 * (d0 + d2) - 1e-8 * (1.0 + std::abs(d0) + std::abs(d2)));
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("trichotomy on random instances") {
  std::mt19937_64 rng(2024);
  int counts[3] = {0, 0, 0};
  for (int k = 0; k < 300; ++k) {
    const Qp1eqcProblem p = sleq::testing::random_problem(rng, k % sleq::testing::kProblemFamilies);
    CAPTURE(k);
    SolveOutcome s;
    REQUIRE_NOTHROW(s = solve(p));
    ++counts[static_cast<int>(s.status)];
    const double ftol = feas_tol(p.constraint);
    const auto samples = sample_constraint(p.constraint, 500, static_cast<std::uint64_t>(k) + 7);
    switch (s.status) {
      case SolveStatus::Attained: {
        REQUIRE(s.x_star);
        CHECK(std::abs(p.constraint(*s.x_star)) <= feas_tol(p.constraint, *s.x_star));
        CHECK(std::abs(p.objective(*s.x_star) - s.value) <= 1e-6 * (1.0 + std::abs(s.value)));
        for (const Vector& x : samples) CHECK(p.objective(x) >= s.value - 1e-6 * (1.0 + std::abs(s.value)));
        if (s.route == "dual") {
          REQUIRE(s.mu_star);
          CHECK(verify_global_optimality(p, *s.x_star, *s.mu_star));
          const SymMatrix m = p.objective.A + *s.mu_star * p.constraint.A;
          const Vector res = m.mat() * *s.x_star + p.objective.a + *s.mu_star * p.constraint.a;
          CHECK(res.norm() <= 1e-6 * (1.0 + data_norm(p)));
          REQUIRE(s.dual_value);
          CHECK(std::abs(*s.dual_value - s.value) <= 1e-6 * (1.0 + std::abs(s.value)));
        }
        break;
      }
      case SolveStatus::Unattained:
        CHECK(std::isfinite(s.value));
        CHECK(s.witness);
        CHECK_FALSE(s.x_star);
        for (const Vector& x : samples) CHECK(p.objective(x) >= s.value - 1e-6 * (1.0 + std::abs(s.value)));
        break;
      case SolveStatus::Unbounded: {
        CHECK(s.value == -kInf);
        // A feasible point well below zero; far out, rounding in h exceeds feas_tol.
        const auto x = feasible_point_below(p, -10.0);
        REQUIRE(x);
        CHECK(std::abs(p.constraint(*x)) <= ftol);
        break;
      }
    }
  }
  MESSAGE("unbounded " << counts[0] << ", unattained " << counts[1] << ", attained " << counts[2]);
  CHECK(counts[0] > 0);
  CHECK(counts[1] > 0);
  CHECK(counts[2] > 0);
}

TEST_CASE("unattained infimum is approached along the witness directions") {
  const SolveOutcome s = solve(kUnattained);
  REQUIRE(s.witness);
  SampleOptions so;
  so.bias = s.witness->V;
  so.bias_scale = 1e3;
  const auto pts = sample_constraint(kHyperbola, 100000, 5, so);
  REQUIRE(pts.size() == 100000);
  double best = kInf;
  for (const Vector& x : pts) best = std::min(best, kUnattained.objective(x));
  CHECK(best >= s.value - 1e-6);
  CHECK(best <= s.value + 1e-2);
}
