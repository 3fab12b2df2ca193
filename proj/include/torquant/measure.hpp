#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "torquant/common.hpp"
#include "torquant/errors.hpp"

namespace torquant {

// A nonnegative measure on the line, stored as point atoms plus a histogram
// (mass uniform within each bin). Either part may be empty.
class Measure1D {
public:
  Measure1D(std::vector<std::pair<double, double>> atoms, std::vector<double> bin_edges,
            std::vector<double> bin_masses)
      : atoms_(std::move(atoms)), edges_(std::move(bin_edges)), masses_(std::move(bin_masses)) {
    if (!edges_.empty()) {
      if (edges_.size() < 2 || masses_.size() != edges_.size() - 1) {
        throw validation_error("Measure1D: histogram needs n+1 edges for n bins");
      }
      for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
        if (!(edges_[i] < edges_[i + 1])) {
          throw validation_error("Measure1D: bin edges must be strictly increasing");
        }
      }
    } else if (!masses_.empty()) {
      throw validation_error("Measure1D: bin masses without edges");
    }
    auto clip = [](double& m) {
      if (m < 0.0) {
        if (m < -1e-9) throw validation_error("Measure1D: negative mass");
        m = 0.0;
      }
      if (!std::isfinite(m)) throw validation_error("Measure1D: nonfinite mass");
    };
    for (auto& [loc, m] : atoms_) {
      if (!std::isfinite(loc)) throw validation_error("Measure1D: nonfinite atom location");
      clip(m);
    }
    for (auto& m : masses_) clip(m);
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    total_ = 0.0;
    for (const auto& [loc, m] : atoms_) total_ += m;
    for (double m : masses_) total_ += m;
  }

  static Measure1D point_mass(double location, double mass) {
    return Measure1D({{location, mass}}, {}, {});
  }

  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
  const std::vector<double>& bin_edges() const { return edges_; }
  const std::vector<double>& bin_masses() const { return masses_; }
  double total_mass() const { return total_; }
  bool is_probability(double tol = 1e-9) const { return std::abs(total_ - 1.0) <= tol; }

  // Integral of x^m, exact per bin (uniform density within bins).
  double moment(int m) const {
    if (m < 0) throw validation_error("Measure1D::moment: order must be >= 0");
    double s = 0.0;
    for (const auto& [loc, mass] : atoms_) s += mass * std::pow(loc, m);
    for (std::size_t i = 0; i < masses_.size(); ++i) {
      if (masses_[i] == 0.0) continue;
      const double a = edges_[i], b = edges_[i + 1];
      s += masses_[i] * (std::pow(b, m + 1) - std::pow(a, m + 1)) / ((m + 1) * (b - a));
    }
    return s;
  }

  // Right-continuous cumulative mass function.
  double cdf(double x) const {
    double s = 0.0;
    for (const auto& [loc, m] : atoms_) {
      if (loc <= x) s += m;
    }
    for (std::size_t i = 0; i < masses_.size(); ++i) {
      if (x >= edges_[i + 1]) {
        s += masses_[i];
      } else if (x > edges_[i]) {
        s += masses_[i] * (x - edges_[i]) / (edges_[i + 1] - edges_[i]);
      }
    }
    return s;
  }

  // Integral of |F_a - F_b| over the real line (the 1-Wasserstein distance
  // when the totals agree). Exact: both CDFs are piecewise linear between
  // the merged breakpoints, with jumps only at breakpoints.
  static double cdf_l1_distance(const Measure1D& a, const Measure1D& b) {
    std::vector<double> brk;
    auto add = [&](const Measure1D& m) {
      for (const auto& [loc, mass] : m.atoms_) brk.push_back(loc);
      for (double e : m.edges_) brk.push_back(e);
    };
    add(a);
    add(b);
    if (brk.empty()) return 0.0;
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
      const double x0 = brk[i], x1 = brk[i + 1];
      const double len = x1 - x0;
      if (len <= 0.0) continue;
      // Right limit at x0 and left limit at x1: evaluate just inside via the
      // piecewise-linear structure (jumps sit exactly on breakpoints).
      const double d0 = a.cdf(x0) - b.cdf(x0);
      const double d1 = (a.cdf(x1) - a.jump_at(x1)) - (b.cdf(x1) - b.jump_at(x1));
      if (d0 == 0.0 && d1 == 0.0) continue;
      if (d0 * d1 >= 0.0) {
        s += 0.5 * (std::abs(d0) + std::abs(d1)) * len;
      } else {
        s += 0.5 * len * (d0 * d0 + d1 * d1) / std::abs(d0 - d1);
      }
    }
    return s;
  }

private:
  double jump_at(double x) const {
    double s = 0.0;
    for (const auto& [loc, m] : atoms_) {
      if (loc == x) s += m;
    }
    return s;
  }

  std::vector<std::pair<double, double>> atoms_;
  std::vector<double> edges_;
  std::vector<double> masses_;
  double total_ = 0.0;
};

} // namespace torquant
