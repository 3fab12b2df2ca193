#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torquant/common.hpp"
#include "torquant/errors.hpp"
#include "torquant/grid.hpp"
#include "torquant/legendre.hpp"
#include "torquant/norms.hpp"
#include "torquant/polytope.hpp"
#include "torquant/toric.hpp"

namespace torquant {

enum class AuthoritativeSide { potential, symplectic };

// A line bundle metric on a toric model, carried on both classical sides:
// the potential phi on a log-coordinate box and its Legendre transform g on
// the moment polytope. Factories build the missing side so the pair is
// consistent by construction; the flag records which one the caller supplied
// (quantization weights are read from the authoritative side).
class ToricBundleModel {
public:
  static ToricBundleModel from_potential(std::shared_ptr<const LatticePolytope> p,
                                         GridFunction phi,
                                         std::array<int, 2> g_res = {0, 0}) {
    if (!p) throw validation_error("ToricBundleModel: null polytope");
    if (phi.box().dim != p->dim()) {
      throw validation_error("ToricBundleModel: potential dimension does not match polytope");
    }
    if (g_res[0] == 0) g_res = p->dim() == 1 ? std::array<int, 2>{2049, 0}
                                             : std::array<int, 2>{257, 257};
    GridFunction g = discrete_legendre(phi, p, g_res);
    return ToricBundleModel(std::move(p), std::move(phi), std::move(g),
                            AuthoritativeSide::potential);
  }

  static ToricBundleModel from_symplectic(std::shared_ptr<const LatticePolytope> p,
                                          GridFunction g,
                                          std::optional<Box> potential_box = std::nullopt) {
    if (!p) throw validation_error("ToricBundleModel: null polytope");
    if (g.box().dim != p->dim()) {
      throw validation_error("ToricBundleModel: symplectic side dimension does not match polytope");
    }
    for (int a = 0; a < p->dim(); ++a) {
      const auto [lo, hi] = p->bounds(a);
      if (std::abs(g.box().lo[a] - to_double(lo)) > 1e-9 ||
          std::abs(g.box().hi[a] - to_double(hi)) > 1e-9) {
        throw validation_error(
            "ToricBundleModel: symplectic grid must span the polytope's bounding box");
      }
    }
    GridFunction gp(g.box(), g.values(), p);
    Box box;
    if (potential_box) {
      box = *potential_box;
      if (box.dim != p->dim()) {
        throw validation_error("ToricBundleModel: potential box dimension mismatch");
      }
    } else {
      box = p->dim() == 1 ? Box::interval(-8.0, 8.0, 2048)
                          : Box::rect(-8.0, 8.0, 256, -8.0, 8.0, 256);
    }
    GridFunction phi = p->dim() == 1 ? conjugate_back_1d(gp, box)
                                     : detail::conjugate_to_box(gp, box);
    return ToricBundleModel(std::move(p), std::move(phi), std::move(gp),
                            AuthoritativeSide::symplectic);
  }

  const std::shared_ptr<const LatticePolytope>& polytope() const { return polytope_; }
  AuthoritativeSide side() const { return side_; }
  const GridFunction& potential() const { return phi_; }
  const GridFunction& symplectic() const { return g_; }

private:
  ToricBundleModel(std::shared_ptr<const LatticePolytope> p, GridFunction phi, GridFunction g,
                   AuthoritativeSide side)
      : polytope_(std::move(p)), phi_(std::move(phi)), g_(std::move(g)), side_(side) {}

  std::shared_ptr<const LatticePolytope> polytope_;
  GridFunction phi_;
  GridFunction g_;
  AuthoritativeSide side_;
};

namespace detail {

struct RatioAxis {
  long long first = 0;
  std::vector<double> ts;   // ts[i] = (first + i) / k, ascending
};

inline RatioAxis ratio_axis(const LatticePolytope& p, int axis, long long k) {
  const auto [lo, hi] = p.bounds(axis);
  RatioAxis out;
  out.first = ceil_rational(lo * k);
  for (long long a = out.first; a <= floor_rational(hi * k); ++a) {
    out.ts.push_back(static_cast<double>(a) / static_cast<double>(k));
  }
  return out;
}

inline bool ratio_in_collar(const LatticePolytope& p, int axis, double t) {
  const auto [lo, hi] = p.bounds(axis);
  const double l = to_double(lo), h = to_double(hi), w = h - l;
  return t < l + 0.1 * w || t > h - 0.1 * w;
}

// Discrete sup_x (<alpha/k, x> - phi(x)) at every lattice ratio of kP, with
// the same boundary-escape policy as discrete_legendre.
inline std::vector<double> conjugate_at_ratios(const GridFunction& phi, const LatticePolytope& p,
                                               long long k, const std::vector<Label>& labels) {
  const Box& src = phi.box();
  std::vector<double> out(labels.size());
  if (src.dim == 1) {
    const RatioAxis ax = ratio_axis(p, 0, k);
    const auto c = conjugate_1d(phi.values(), src.lo[0], src.step(0), ax.ts, false);
    for (std::size_t q = 0; q < ax.ts.size(); ++q) {
      if ((c.escape_lo[q] || c.escape_hi[q]) && !ratio_in_collar(p, 0, ax.ts[q])) {
        throw slope_coverage_error("ban weights: slope " + format_double(ax.ts[q]) +
                                   " attains its sup on the box boundary; enlarge the box");
      }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out[i] = c.values[std::size_t(labels[i][0] - ax.first)];
    }
    return out;
  }

  const RatioAxis axx = ratio_axis(p, 0, k), axy = ratio_axis(p, 1, k);
  const int nx = src.res[0];
  std::vector<std::vector<double>> h(nx);
  std::vector<std::vector<char>> hit1(nx);
  for (int i = 0; i < nx; ++i) {
    std::vector<double> row(src.res[1]);
    for (int j = 0; j < src.res[1]; ++j) row[j] = phi.at(i, j);
    auto c = conjugate_1d(row, src.lo[1], src.step(1), axy.ts, false);
    h[i] = std::move(c.values);
    hit1[i].resize(axy.ts.size());
    for (std::size_t q = 0; q < axy.ts.size(); ++q) {
      hit1[i][q] = (c.escape_lo[q] || c.escape_hi[q]) ? 1 : 0;
    }
  }
  std::vector<std::vector<double>> vals(axx.ts.size(),
                                        std::vector<double>(axy.ts.size()));
  std::vector<std::vector<char>> hits(axx.ts.size(), std::vector<char>(axy.ts.size()));
  for (std::size_t q = 0; q < axy.ts.size(); ++q) {
    std::vector<double> col(nx);
    for (int i = 0; i < nx; ++i) col[i] = -h[i][q];
    auto c = conjugate_1d(col, src.lo[0], src.step(0), axx.ts, false);
    for (std::size_t s = 0; s < axx.ts.size(); ++s) {
      vals[s][q] = c.values[s];
      hits[s][q] = (c.escape_lo[s] || c.escape_hi[s] || hit1[c.argmax[s]][q]) ? 1 : 0;
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t ia = std::size_t(labels[i][0] - axx.first);
    const std::size_t jb = std::size_t(labels[i][1] - axy.first);
    if (hits[ia][jb]) {
      const double pt[2] = {axx.ts[ia], axy.ts[jb]};
      if (p.contains_point(pt, -1e-12) && !ratio_in_collar(p, 0, pt[0]) &&
          !ratio_in_collar(p, 1, pt[1])) {
        throw slope_coverage_error("ban weights: slope (" + format_double(pt[0]) + "," +
                                   format_double(pt[1]) +
                                   ") attains its sup on the box boundary; enlarge the box");
      }
    }
    out[i] = vals[ia][jb];
  }
  return out;
}

// Node-based product-trapezoid quadrature weights over the box.
inline std::vector<double> box_trapezoid_weights(const Box& b) {
  auto line = [&](int axis) {
    std::vector<double> w(b.res[axis], b.step(axis));
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  };
  const auto wx = line(0);
  if (b.dim == 1) return wx;
  const auto wy = line(1);
  std::vector<double> w(b.size());
  for (int i = 0; i < b.res[0]; ++i) {
    for (int j = 0; j < b.res[1]; ++j) w[std::size_t(i) * b.res[1] + j] = wx[i] * wy[j];
  }
  return w;
}

inline double dot_label(const Label& a, const Box& b, int i, int j) {
  double s = static_cast<double>(a[0]) * b.node(0, i);
  if (b.dim == 2) s += static_cast<double>(a[1]) * b.node(1, j);
  return s;
}

} // namespace detail

// Level-k sup norm of the monomial sections, diagonal on the lattice basis:
// logWeight(alpha) = k * g_k(alpha/k) where g_k is the discrete transform of
// the potential (authoritative-potential models) or the interpolated
// symplectic potential itself (authoritative-symplectic models).
inline DiagonalSupNorm ban_norm(const ToricBundleModel& m, long long k) {
  if (k < 1) throw validation_error("ban_norm: level must be >= 1");
  const auto labels = m.polytope()->lattice_points(k);
  if (labels.empty()) throw validation_error("ban_norm: dilate has no lattice points");
  std::vector<double> w(labels.size());
  if (m.side() == AuthoritativeSide::symplectic) {
    const GridFunction& g = m.symplectic();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double xi = static_cast<double>(labels[i][0]) / static_cast<double>(k);
      const double eta =
          m.polytope()->dim() == 2 ? static_cast<double>(labels[i][1]) / static_cast<double>(k)
                                   : 0.0;
      w[i] = static_cast<double>(k) * g.eval(xi, eta);
    }
  } else {
    w = detail::conjugate_at_ratios(m.potential(), *m.polytope(), k, labels);
    for (double& x : w) x *= static_cast<double>(k);
  }
  return DiagonalSupNorm(labels, std::move(w));
}

// Level-k L^2 norm against the density rho on the box. Torus invariance makes
// the Gram diagonal; entries are computed in log space so levels with
// e^{O(k)} dynamic range stay exact:
//   log G(alpha,alpha) = logsumexp_i [ 2(<alpha,x_i> - k phi(x_i)) + log(rho_i w_i) ].
inline HermitianNorm hilb_norm(const ToricBundleModel& m, long long k, const GridFunction& rho) {
  if (k < 1) throw validation_error("hilb_norm: level must be >= 1");
  const GridFunction& phi = m.potential();
  if (!rho.box().same_grid(phi.box())) {
    throw validation_error("hilb_norm: density must live on the potential's grid");
  }
  for (double v : rho.values()) {
    if (v < 0.0) throw validation_error("hilb_norm: density must be nonnegative");
  }
  const auto qw = detail::box_trapezoid_weights(phi.box());
  double mass = 0.0;
  std::vector<double> logrw(qw.size(), -kInf);
  for (std::size_t i = 0; i < qw.size(); ++i) {
    const double rw = rho.values()[i] * qw[i];
    mass += rw;
    if (rw > 0.0) logrw[i] = std::log(rw);
  }
  if (!(mass > 0.0)) throw validation_error("hilb_norm: density has zero mass");

  const auto labels = m.polytope()->lattice_points(k);
  const Box& b = phi.box();
  std::vector<double> w(labels.size());
  std::vector<double> terms;
  terms.reserve(qw.size());
  for (std::size_t a = 0; a < labels.size(); ++a) {
    terms.clear();
    for (int i = 0; i < b.res[0]; ++i) {
      const int jmax = b.dim == 2 ? b.res[1] : 1;
      for (int j = 0; j < jmax; ++j) {
        const std::size_t idx = b.dim == 2 ? std::size_t(i) * b.res[1] + j : std::size_t(i);
        if (logrw[idx] == -kInf) continue;
        const double expo =
            2.0 * (detail::dot_label(labels[a], b, i, j) - double(k) * phi.values()[idx]);
        terms.push_back(expo + logrw[idx]);
      }
    }
    w[a] = 0.5 * logsumexp(terms);
  }
  return HermitianNorm::from_log_diagonal(std::move(w));
}

// Smoothed potential of a diagonal norm at level k:
//   phi_k(x) = (1/2k) log sum_alpha exp(2(<alpha,x> - logWeight(alpha))),
// evaluated with a max shift. Convex in x as a log-sum-exp of affine maps.
inline GridFunction fs_potential(const std::vector<Label>& labels,
                                 const std::vector<double>& log_weights, long long k,
                                 const Box& box) {
  if (labels.empty() || labels.size() != log_weights.size()) {
    throw validation_error("fs_potential: empty or mismatched label set");
  }
  if (k < 1) throw validation_error("fs_potential: level must be >= 1");
  box.validate();
  for (const auto& a : labels) {
    if (static_cast<int>(a.size()) != box.dim) {
      throw validation_error("fs_potential: label arity does not match box dimension");
    }
  }
  std::vector<double> values(box.size());
  std::vector<double> terms(labels.size());
  for (int i = 0; i < box.res[0]; ++i) {
    const int jmax = box.dim == 2 ? box.res[1] : 1;
    for (int j = 0; j < jmax; ++j) {
      for (std::size_t a = 0; a < labels.size(); ++a) {
        terms[a] = 2.0 * (detail::dot_label(labels[a], box, i, j) - log_weights[a]);
      }
      const std::size_t idx = box.dim == 2 ? std::size_t(i) * box.res[1] + j : std::size_t(i);
      values[idx] = logsumexp(terms) / (2.0 * static_cast<double>(k));
    }
  }
  return GridFunction(box, std::move(values));
}

inline GridFunction fs_potential(const DiagonalSupNorm& n, long long k, const Box& box) {
  return fs_potential(n.labels(), n.log_weights(), k, box);
}

inline GridFunction fs_potential(const HermitianNorm& h, const std::vector<Label>& labels,
                                 long long k, const Box& box) {
  if (!h.is_log_diagonal()) {
    throw validation_error("fs_potential: Hermitian input must be diagonal in the lattice basis");
  }
  if (h.dim() != static_cast<int>(labels.size())) {
    throw validation_error("fs_potential: label count does not match norm dimension");
  }
  return fs_potential(labels, h.log_diagonal(), k, box);
}

// Largest per-label discrepancy between the sup and L^2 log-weights at level
// k, normalized by k. Tends to 0 for densities with enough mass everywhere
// on the gradient image.
inline double bernstein_markov_gap(const DiagonalSupNorm& ban, const HermitianNorm& hilb) {
  if (!hilb.is_log_diagonal() || hilb.dim() != ban.dim()) {
    throw validation_error("bernstein_markov_gap: norms do not share a lattice basis");
  }
  double gap = 0.0;
  for (int i = 0; i < ban.dim(); ++i) {
    gap = std::max(gap, std::abs(ban.log_weights()[i] - hilb.log_diagonal()[i]));
  }
  return gap;
}

inline double bernstein_markov_gap(const ToricBundleModel& m, long long k,
                                   const GridFunction& rho) {
  return bernstein_markov_gap(ban_norm(m, k), hilb_norm(m, k, rho)) /
         static_cast<double>(k);
}

// The level-k quantization of a model: sup and L^2 norms on the same lattice
// labels plus the recorded discrepancy between them.
struct QuantumNorms {
  long long k = 0;
  DiagonalSupNorm ban;
  HermitianNorm hilb;
  double bm_gap = 0.0;   // (1/k) max_alpha |log w_ban - log w_hilb|
};

inline QuantumNorms quantum_norms(const ToricBundleModel& m, long long k,
                                  const GridFunction& rho) {
  DiagonalSupNorm ban = ban_norm(m, k);
  HermitianNorm hilb = hilb_norm(m, k, rho);
  const double gap = bernstein_markov_gap(ban, hilb) / static_cast<double>(k);
  return QuantumNorms{k, std::move(ban), std::move(hilb), gap};
}

// Discrete curvature density of a 1-D potential (second differences over h^2),
// normalized to unit mass. The natural integration weight for hilb_norm.
inline GridFunction curvature_density(const GridFunction& phi) {
  const Box& b = phi.box();
  if (b.dim != 1) throw validation_error("curvature_density: one-dimensional potential required");
  const double h = b.step(0);
  std::vector<double> rho(b.size(), 0.0);
  for (int i = 1; i + 1 < b.res[0]; ++i) {
    rho[i] = std::max(0.0, (phi.at(i + 1) - 2.0 * phi.at(i) + phi.at(i - 1)) / (h * h));
  }
  double mass = 0.0;
  const auto w = detail::box_trapezoid_weights(b);
  for (std::size_t i = 0; i < rho.size(); ++i) mass += rho[i] * w[i];
  if (!(mass > 0.0)) throw validation_error("curvature_density: flat potential has no curvature");
  for (double& v : rho) v /= mass;
  return GridFunction(b, std::move(rho));
}

struct ExperimentRow {
  long long k = 0;
  double value = 0.0;
  double limit = 0.0;
  double gap = 0.0;
};

namespace detail {

inline void check_common_polytope(const ToricBundleModel& a, const ToricBundleModel& b,
                                  const char* who) {
  if (a.polytope() == b.polytope()) return;
  if (a.polytope()->vertices() != b.polytope()->vertices()) {
    throw validation_error(std::string(who) + ": models live on different polytopes");
  }
}

} // namespace detail

// Per-level distance between the two quantized sup norms, normalized by k,
// against the classical distance of the symplectic sides. The gap column is
// the quantity that must vanish as k grows.
inline std::vector<ExperimentRow> isometry_experiment(const ToricBundleModel& m0,
                                                      const ToricBundleModel& m1, double p,
                                                      long long kmax) {
  detail::check_common_polytope(m0, m1, "isometry_experiment");
  if (kmax < 1) throw validation_error("isometry_experiment: kmax must be >= 1");
  const double limit = mabuchi_dp(m0.symplectic(), m1.symplectic(), p);
  std::vector<ExperimentRow> rows;
  rows.reserve(std::size_t(kmax));
  for (long long k = 1; k <= kmax; ++k) {
    const DiagonalSupNorm b0 = ban_norm(m0, k);
    const DiagonalSupNorm b1 = ban_norm(m1, k);
    const double value = dp_distance(b0, b1, p) / static_cast<double>(k);
    rows.push_back({k, value, limit, std::abs(value - limit)});
  }
  return rows;
}

namespace detail {

inline bool deep_inside(const LatticePolytope& p, const double* pt, double margin) {
  for (const auto& h : p.half_spaces()) {
    double lhs = static_cast<double>(h.a) * pt[0];
    double nn = static_cast<double>(h.a) * static_cast<double>(h.a);
    if (p.dim() == 2) {
      lhs += static_cast<double>(h.b) * pt[1];
      nn += static_cast<double>(h.b) * static_cast<double>(h.b);
    }
    if (to_double(h.c) - lhs < margin * std::sqrt(nn)) return false;
  }
  return true;
}

} // namespace detail

// Quantized geodesic check at one (k, t): the Hermitian geodesic between the
// two level-k L^2 norms is pushed through the smoothed potential back to the
// symplectic side and compared with the affine path (1-t) g0 + t g1. Returns
// the sup deviation over nodes at least 5% (of the smallest bounding-box
// width) inside the polytope; convergence at the boundary is not expected.
inline double geodesic_quantization_experiment(const ToricBundleModel& m0,
                                               const ToricBundleModel& m1, long long k, double t,
                                               const GridFunction& rho0,
                                               const GridFunction& rho1) {
  detail::check_common_polytope(m0, m1, "geodesic_quantization_experiment");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw validation_error("geodesic_quantization_experiment: t must lie in [0, 1]");
  }
  if (!m0.potential().box().same_grid(m1.potential().box())) {
    throw validation_error("geodesic_quantization_experiment: potential grids differ");
  }
  if (!m0.symplectic().box().same_grid(m1.symplectic().box())) {
    throw validation_error("geodesic_quantization_experiment: symplectic grids differ");
  }
  const HermitianNorm h0 = hilb_norm(m0, k, rho0);
  const HermitianNorm h1 = hilb_norm(m1, k, rho1);
  const HermitianNorm ht = geodesic(h0, h1, t);
  const auto labels = m0.polytope()->lattice_points(k);
  const GridFunction phi_t = fs_potential(ht, labels, k, m0.potential().box());
  const Box& gb = m0.symplectic().box();
  const GridFunction g_t =
      discrete_legendre(phi_t, m0.polytope(), {gb.res[0], gb.dim == 2 ? gb.res[1] : 0});

  double width = gb.hi[0] - gb.lo[0];
  if (gb.dim == 2) width = std::min(width, gb.hi[1] - gb.lo[1]);
  const double margin = 0.05 * width;
  double dev = 0.0;
  for (int i = 0; i < gb.res[0]; ++i) {
    const int jmax = gb.dim == 2 ? gb.res[1] : 1;
    for (int j = 0; j < jmax; ++j) {
      const double pt[2] = {gb.node(0, i), gb.dim == 2 ? gb.node(1, j) : 0.0};
      if (!detail::deep_inside(*m0.polytope(), pt, margin)) continue;
      const std::size_t idx = gb.dim == 2 ? std::size_t(i) * gb.res[1] + j : std::size_t(i);
      const double ref =
          (1.0 - t) * m0.symplectic().values()[idx] + t * m1.symplectic().values()[idx];
      dev = std::max(dev, std::abs(g_t.values()[idx] - ref));
    }
  }
  return dev;
}

// Distance of each family member to the quantization of the family's own
// limit potential, normalized by level. The limit is the finest convexified
// weight profile along the doubling chain k0, 2 k0, ..., <= kmax; nested
// dyadic lattices make the profiles monotone along the chain, so the finest
// one is the infimum. One-dimensional polytopes only.
inline std::vector<ExperimentRow> char_experiment(
    const std::function<DiagonalSupNorm(long long)>& family, const LatticePolytope& p,
    double pnorm, long long k0, long long kmax) {
  if (p.dim() != 1) {
    throw validation_error("char_experiment: one-dimensional polytopes only");
  }
  if (k0 < 1 || kmax < 2 * k0) {
    throw validation_error("char_experiment: need at least two doubling levels");
  }
  std::vector<long long> chain;
  for (long long k = k0; k <= kmax; k *= 2) chain.push_back(k);

  std::vector<DiagonalSupNorm> norms;
  norms.reserve(chain.size());
  for (long long k : chain) {
    DiagonalSupNorm n = family(k);
    const auto expect = p.lattice_points(k);
    if (n.labels() != expect) {
      throw validation_error("char_experiment: level " + std::to_string(k) +
                             " labels do not enumerate the dilate");
    }
    norms.push_back(std::move(n));
  }

  // Submultiplicativity screen: w_{k+l}(a+b) <= w_k(a) + w_l(b) across chain
  // pairs, reported with the witness triple on failure.
  auto weight_of = [&](const DiagonalSupNorm& n, const Label& a) {
    const auto it = std::lower_bound(n.labels().begin(), n.labels().end(), a);
    if (it == n.labels().end() || *it != a) {
      throw validation_error("char_experiment: label missing from a level");
    }
    return n.log_weights()[std::size_t(it - n.labels().begin())];
  };
  for (std::size_t ia = 0; ia < chain.size(); ++ia) {
    for (std::size_t ib = ia; ib < chain.size(); ++ib) {
      const long long ksum = chain[ia] + chain[ib];
      if (ksum > kmax) continue;
      const DiagonalSupNorm nsum = family(ksum);
      for (std::size_t i = 0; i < norms[ia].labels().size(); ++i) {
        for (std::size_t j = 0; j < norms[ib].labels().size(); ++j) {
          const Label sum = {norms[ia].labels()[i][0] + norms[ib].labels()[j][0]};
          const double lhs = weight_of(nsum, sum);
          const double rhs = norms[ia].log_weights()[i] + norms[ib].log_weights()[j];
          if (lhs > rhs + 1e-9) {
            throw submultiplicativity_error(
                "char_experiment: weights are not submultiplicative: w_" +
                std::to_string(ksum) + "(" + label_to_string(sum) + ") = " +
                format_double(lhs) + " > " + format_double(rhs) + " = w_" +
                std::to_string(chain[ia]) + "(" + label_to_string(norms[ia].labels()[i]) +
                ") + w_" + std::to_string(chain[ib]) + "(" +
                label_to_string(norms[ib].labels()[j]) + ")");
          }
        }
      }
    }
  }

  // Convexified normalized profile per level, on the level's ratio lattice.
  auto profile = [&](std::size_t idx) {
    const long long k = chain[idx];
    const auto ax = detail::ratio_axis(p, 0, k);
    if (ax.ts.size() < 2) {
      throw validation_error("char_experiment: finest level has too few lattice points");
    }
    std::vector<double> v(ax.ts.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = norms[idx].log_weights()[i] / static_cast<double>(k);
    }
    const Box b = Box::interval(ax.ts.front(), ax.ts.back(), static_cast<int>(ax.ts.size()));
    GridFunction raw(b, std::move(v));
    return GridFunction(b, detail::lower_hull_values(raw));
  };
  const GridFunction limit = profile(chain.size() - 1);

  std::vector<ExperimentRow> rows;
  rows.reserve(chain.size());
  for (std::size_t idx = 0; idx < chain.size(); ++idx) {
    const long long k = chain[idx];
    std::vector<double> w(norms[idx].labels().size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double xi =
          static_cast<double>(norms[idx].labels()[i][0]) / static_cast<double>(k);
      w[i] = static_cast<double>(k) * limit.eval(xi);
    }
    const DiagonalSupNorm ban_limit(norms[idx].labels(), std::move(w));
    const double value = dp_distance(norms[idx], ban_limit, pnorm) / static_cast<double>(k);
    rows.push_back({k, value, 0.0, value});
  }
  return rows;
}

} // namespace torquant
