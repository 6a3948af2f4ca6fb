#pragma once

// Sign bookkeeping for Grassmann monomials indexed by bitmasks: bit i set
// means generator i is present, generators are kept in ascending order.

#include <bit>
#include <cstdint>
#include <vector>

namespace mcg::grassmann {

using Mask = std::uint32_t;

inline int degree(Mask s) { return std::popcount(s); }
inline int parity(Mask s) { return std::popcount(s) & 1; }

/// Sign of the permutation sorting the concatenation (I, J) of two disjoint
/// ascending index sets; 0 when they overlap.
inline int shuffle_sign(Mask i, Mask j) {
  if (i & j) return 0;
  int inversions = 0;
  for (Mask rest = j; rest; rest &= rest - 1) {
    const int b = std::countr_zero(rest);
    inversions += std::popcount(i >> (b + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

/// Sign of the left derivative ∂/∂θ^k applied to θ^S (k ∈ S): θ^k must be
/// moved past the generators of S below it.
inline int left_derivative_sign(Mask s, int k) {
  return (std::popcount(s & ((Mask{1} << k) - 1)) & 1) ? -1 : 1;
}

/// Product of two elements of Λ(θ¹..θᵐ) given by coefficient vectors of length 2^m.
inline std::vector<double> multiply(const std::vector<double>& u, const std::vector<double>& v) {
  std::vector<double> r(u.size(), 0.0);
  for (Mask s = 0; s < u.size(); ++s) {
    if (u[s] == 0.0) continue;
    for (Mask t = 0; t < v.size(); ++t) {
      if (v[t] == 0.0 || (s & t)) continue;
      r[s | t] += shuffle_sign(s, t) * u[s] * v[t];
    }
  }
  return r;
}

}  // namespace mcg::grassmann
