#pragma once

#include <cmath>

#include "mcgauge/error.hpp"

namespace mcg {

/// Exponential by scaling and squaring with a Taylor core.
///
/// `T` needs `T*T`, `T+T`, `double*T`; `bound` is an upper estimate of an
/// operator norm of `x` and `one` the unit of the algebra. A part of `x` that
/// squares to zero (first-order perturbations) may be bounded separately by
/// `nil_bound`: it enters the k-th Taylor term at most k times its own norm.
template <class T>
T scaled_exp(const T& x, double bound, const T& one, double nil_bound = 0.0) {
  if (!std::isfinite(bound) || !std::isfinite(nil_bound)) throw NumericError("exp: non-finite argument");
  int squarings = 0;
  double scale = 1.0;
  while (bound * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const T y = scale * x;
  const double b = bound * scale, e = nil_bound * scale;
  T term = one;
  T sum = one;
  // tail of Σ (b^k + k b^{k−1} e)/k! below double rounding
  double pure = 1.0, mixed = 0.0;
  for (int k = 1; k <= 30; ++k) {
    term = (1.0 / k) * (term * y);
    sum = sum + term;
    mixed = (mixed * b + pure * e) / k;
    pure *= b / k;
    if (pure + mixed < 1e-17) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace mcg
