#pragma once

#include <cstdint>

namespace sleq {

// Absolute thresholds are always derived from a scale via sign().
struct Tolerances {
  double eig = 1e-9;         // eigenvalue sign classification, relative to 1+|M|
  double rank = 1e-10;       // singular value cutoff, relative to sigma_max
  double feas = 1e-7;        // constraint residual, relative to constraint data
  double singleton = 1e-7;   // pencil interval width treated as a point
  double zero_block = 1e-12; // B counts as zero when |B| <= zero_block*(1+|A|)
  double mu_cap = 1e8;       // expansion limit for pencil endpoints

  double sign(double scale) const { return eig * (1.0 + scale); }
};

struct SolverOptions {
  Tolerances tol{};
  std::uint64_t seed = 20240101;
};

}  // namespace sleq
