#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace torquant {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(e^a + e^b), stable for any magnitudes.
inline double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log(sum_i e^{x_i}), stable; empty input -> -inf.
inline double logsumexp(const std::vector<double>& xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Shortest round-trippable decimal rendering ("%.17g" trimmed through one
// precision-increasing pass). Used everywhere a double reaches a file so
// that identical runs produce identical bytes.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::stod(buf) == x) break;
  }
  return buf;
}

// ((1/v) * sum_i |x_i|^p)^{1/p}; p = inf -> max |x_i|. Rescaled by the max
// before exponentiation so large p cannot overflow.
inline double power_mean_abs(const std::vector<double>& xs, double p) {
  if (xs.empty()) return 0.0;
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  if (p == kInf) return m;
  double s = 0.0;
  for (double x : xs) s += std::pow(std::abs(x) / m, p);
  return m * std::pow(s / static_cast<double>(xs.size()), 1.0 / p);
}

} // namespace torquant
