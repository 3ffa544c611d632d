#include "sleq/scond.hpp"

#include <cmath>

#include "sleq/errors.hpp"

namespace sleq {

bool scondition(int k, const QuadForm& f, const QuadForm& h, const Tolerances& t) {
  if (f.dim() != h.dim()) throw DimensionMismatch("f and h dimensions differ");
  const double zero = t.sign(h.data_norm());
  switch (k) {
    case 1: {
      const Spectrum s = spectrum(h.A, t);
      return s.pd() || s.nd();
    }
    case 2:
      return max_lambda_min_affine(f.A, -h.A, -kInf, kInf, t).value >= -t.sign(f.A.norm_inf() + h.A.norm_inf());
    case 3:
      return h.a.norm() <= zero && std::abs(h.c) <= zero;
    case 4: {
      if (std::abs(h.c) > zero) return false;
      if (!in_range(h.A, h.a, t.eig, t)) return false;
      const Spectrum s = spectrum(h.A, t);
      if (s.psd() || s.nsd()) return true;
      // Indefinite B: B zeta + b = 0 must hold at a root of h, and h equals
      // d - b^T B^+ b on that whole solution set.
      return std::abs(h.a.dot(pinv(h.A, t).mat() * h.a)) <= zero;
    }
    default:
      throw PreconditionViolation("S-Condition index must be 1..4");
  }
}

std::array<bool, 4> sconditions(const QuadForm& f, const QuadForm& h, const Tolerances& t) {
  return {scondition(1, f, h, t), scondition(2, f, h, t), scondition(3, f, h, t), scondition(4, f, h, t)};
}

}  // namespace sleq
