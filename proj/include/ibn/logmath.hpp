#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace ibn {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Linear values below this are reported as zero with an underflow flag.
inline constexpr double kClampFloor = 1e-300;

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// log(sum exp(x_i)) with Neumaier-compensated accumulation.
inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double y = std::exp(x - m);
    const double t = sum + y;
    comp += std::abs(sum) >= y ? (sum - t) + y : (y - t) + sum;
    sum = t;
  }
  return m + std::log(sum + comp);
}

// log(1 - exp(x)) for x <= 0.
inline double log1m_exp(double x) {
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

inline double clamped_exp(double log_value, bool* underflow = nullptr) {
  const double v = std::exp(log_value);
  const bool tiny = !(v >= kClampFloor);
  if (underflow) *underflow = tiny;
  return tiny ? 0.0 : v;
}

}  // namespace ibn
