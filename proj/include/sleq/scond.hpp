#pragma once

#include <array>

#include "sleq/model.hpp"
#include "sleq/tolerance.hpp"

namespace sleq {

// Literature sufficient conditions for the equality S-lemma, k = 1..4:
// 1. B definite; 2. A - eta B PSD for some eta; 3. h homogeneous;
// 4. h(0) = 0 and some zeta with h(zeta) = 0 has x^T B x = 0 => (B zeta + b)^T x = 0.
bool scondition(int k, const QuadForm& f, const QuadForm& h, const Tolerances& t = {});

std::array<bool, 4> sconditions(const QuadForm& f, const QuadForm& h, const Tolerances& t = {});

}  // namespace sleq
