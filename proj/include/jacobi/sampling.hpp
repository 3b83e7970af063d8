#pragma once

#include <cstdint>
#include <random>

#include "jacobi/jacobigroup.hpp"

namespace jacobi {

// Deterministic across platforms: uniform variates are built from raw
// mt19937_64 bits rather than std::uniform_real_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int sign() { return (engine_() >> 63) != 0 ? -1 : 1; }
  Vec uniform_vec(Eigen::Index size, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Product of random (q_i,p_i) rotations, shears, squeezes and symmetric
/// cross-degree shears; symplectic by construction. Entries stay O(10).
SymplecticBlock random_symplectic(Dimension dim, Rng& rng);

/// Haar-ish random rotation (QR of a uniform matrix, sign-fixed to det +1).
Mat random_rotation(int n, Rng& rng);

/// sigma from random_symplectic, w and r uniform in [-scale, scale].
JacobiElement random_jacobi(Dimension dim, Rng& rng, double scale = 10.0, bool allow_reversal = false);

HeisenbergElement random_heisenberg(Dimension dim, Rng& rng, double scale = 10.0);

}  // namespace jacobi
