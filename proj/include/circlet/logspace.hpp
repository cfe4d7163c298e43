#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <utility>

namespace circlet {

// Arithmetic width used by the batch query kernels. Parameters are always
// stored as doubles; kF32 evaluates with floats to mirror 32-bit benchmark
// conditions.
enum class Precision { kF32, kF64 };

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)). -inf is the additive identity: log_add(-inf, x) = x,
// and log_add(-inf, -inf) = -inf without producing a NaN from (-inf) - (-inf).
template <typename Real>
inline Real log_add(Real a, Real b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a)) return a;
  return a + std::log1p(std::exp(b - a));
}

// Max-shifted logsumexp over a span; returns -inf on an effectively empty sum.
template <typename Real>
inline Real log_sum_exp(std::span<const Real> xs) {
  Real m = -std::numeric_limits<Real>::infinity();
  for (Real x : xs) m = std::max(m, x);
  if (std::isinf(m)) return m;
  Real s = 0;
  for (Real x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace circlet
