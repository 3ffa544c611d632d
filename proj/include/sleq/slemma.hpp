#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sleq/model.hpp"
#include "sleq/tolerance.hpp"

namespace sleq {

enum class Branch {
  AssumptionFailsA,
  AssumptionFailsB,
  AssumptionFailsNeither,
  Thm3Generic,
  Thm3Exception,
};
const char* to_string(Branch b);

struct SLemmaVerdict {
  bool equivalence_holds = false;
  bool e1_true = false;
  bool e2_true = false;
  std::optional<double> certificate;
  std::optional<Vector> counterexample;
  Branch branch = Branch::Thm3Generic;
  // W for the Assumption-fails branches, the matrix (m) for the exception test.
  std::optional<Matrix> reduced_matrix;
  std::optional<bool> null_spaces_match;
  std::optional<PencilInterval> pencil;
  std::vector<std::string> notes;
};

struct RegularizedCertificate {
  double epsilon = 0.0;
  double lambda_eps = 0.0;
  int exponent = 1;
};

enum class MultiplierSign { Free, Nonneg };

bool assumption1_holds(const QuadForm& h, const Tolerances& t = {});

// Throws InfeasibleConstraint when h never vanishes.
void require_feasible(const QuadForm& h, const Tolerances& t = {});

bool certifies(const QuadForm& f, const QuadForm& h, double mu, const Tolerances& t = {});

SLemmaVerdict homogeneous_equivalence(const SymMatrix& a, const SymMatrix& b,
                                      const Tolerances& t = {});
SLemmaVerdict theorem1_verdict(const QuadForm& f, const QuadForm& h,
                               const SolverOptions& opt = {});
SLemmaVerdict theorem3_verdict(const QuadForm& f, const QuadForm& h,
                               const SolverOptions& opt = {});

std::optional<double> e2_certificate_search(const QuadForm& f, const QuadForm& h,
                                            MultiplierSign sign, const Tolerances& t = {});

struct E1Result {
  bool holds = false;
  std::optional<Vector> counterexample;
  double infimum = -kInf;
  std::optional<double> dual_multiplier;
};
E1Result e1_check(const QuadForm& f, const QuadForm& h, const SolverOptions& opt = {});

SLemmaVerdict slemma_equality(const QuadForm& f, const QuadForm& h,
                              const SolverOptions& opt = {});

struct FinslerResult {
  bool strict = false;
  std::optional<double> mu;
};
FinslerResult finsler(const SymMatrix& a, const SymMatrix& b, const Tolerances& t = {});

// Classical S-lemma through h(x) + z^2 = 0. e1/e2 then refer to the
// inequality statements.
SLemmaVerdict slemma_inequality(const QuadForm& f, const QuadForm& h,
                                const SolverOptions& opt = {});

RegularizedCertificate regularized_lambda(const QuadForm& f, const QuadForm& h, double eps,
                                          const SolverOptions& opt = {});
RegularizedCertificate regularized_inequality(const QuadForm& f, const QuadForm& h,
                                              double eps, const SolverOptions& opt = {});

// PSD check of lift(f + lambda*h^exponent + eps(x^T x + 1)).
bool regularized_certifies(const QuadForm& f, const QuadForm& h,
                           const RegularizedCertificate& r, const Tolerances& t = {});

}  // namespace sleq
