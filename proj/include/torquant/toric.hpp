#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "torquant/common.hpp"
#include "torquant/errors.hpp"
#include "torquant/grid.hpp"
#include "torquant/legendre.hpp"
#include "torquant/measure.hpp"
#include "torquant/polytope.hpp"

namespace torquant {

struct QuadraturePoint {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
};

// Deterministic quadrature over the function's domain. 1-D: composite
// trapezoid on the grid (for polytope-domain functions the grid IS the
// interval). 2-D: per-cell clipped polygons against the polytope, weight =
// clipped area, node = clipped centroid; exact for affine integrands. Without
// a polytope the full cell is used.
inline std::vector<QuadraturePoint> domain_quadrature(const GridFunction& f) {
  const Box& b = f.box();
  std::vector<QuadraturePoint> out;
  if (b.dim == 1) {
    const double h = b.step(0);
    out.reserve(b.res[0]);
    for (int i = 0; i < b.res[0]; ++i) {
      const double w = (i == 0 || i == b.res[0] - 1) ? 0.5 * h : h;
      out.push_back({b.node(0, i), 0.0, w});
    }
    return out;
  }
  const auto& poly = f.polytope();
  out.reserve(std::size_t(b.res[0] - 1) * (b.res[1] - 1));
  for (int i = 0; i + 1 < b.res[0]; ++i) {
    const double x0 = b.node(0, i), x1 = b.node(0, i + 1);
    for (int j = 0; j + 1 < b.res[1]; ++j) {
      const double y0 = b.node(1, j), y1 = b.node(1, j + 1);
      if (poly) {
        const PolygonPiece piece = clip_cell(*poly, x0, x1, y0, y1);
        if (piece.area > 0.0) out.push_back({piece.cx, piece.cy, piece.area});
      } else {
        out.push_back({0.5 * (x0 + x1), 0.5 * (y0 + y1), (x1 - x0) * (y1 - y0)});
      }
    }
  }
  return out;
}

namespace detail {

inline void check_common_domain(const GridFunction& a, const GridFunction& c, const char* who) {
  if (!a.box().same_grid(c.box())) {
    throw validation_error(std::string(who) + ": functions live on different grids");
  }
  const auto& pa = a.polytope();
  const auto& pb = c.polytope();
  if (static_cast<bool>(pa) != static_cast<bool>(pb)) {
    throw validation_error(std::string(who) + ": one function has a polytope domain, the other not");
  }
  if (pa && pb && pa != pb) {
    const auto va = pa->vertices_double(), vb = pb->vertices_double();
    bool same = va.size() == vb.size();
    for (std::size_t i = 0; same && i < va.size(); ++i) {
      same = std::abs(va[i][0] - vb[i][0]) < 1e-12 && std::abs(va[i][1] - vb[i][1]) < 1e-12;
    }
    if (!same) throw validation_error(std::string(who) + ": polytope domains differ");
  }
}

} // namespace detail

// d_p(g0, g1) = ( (1/vol) \int |g1 - g0|^p )^{1/p} over the polytope domain;
// p = inf gives the sup over quadrature nodes. An L^p metric: the axioms hold
// to rounding, with no discretization asymmetry.
inline double mabuchi_dp(const GridFunction& g0, const GridFunction& g1, double p) {
  detail::check_common_domain(g0, g1, "mabuchi_dp");
  if (!(p >= 1.0)) throw validation_error("mabuchi_dp: p must be >= 1 (or inf)");
  if (g0.box().dim == 1) {
    // Node values directly: the interval grid is the domain.
    const auto q = domain_quadrature(g0);
    double wsum = 0.0, m = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      m = std::max(m, std::abs(g1.at(int(i)) - g0.at(int(i))));
      wsum += q[i].w;
    }
    if (p == kInf || m == 0.0) return m;
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      s += q[i].w * std::pow(std::abs(g1.at(int(i)) - g0.at(int(i))) / m, p);
    }
    return m * std::pow(s / wsum, 1.0 / p);
  }
  const auto q = domain_quadrature(g0);
  if (q.empty()) throw validation_error("mabuchi_dp: empty quadrature domain");
  double wsum = 0.0, m = 0.0;
  std::vector<double> diff(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    diff[i] = std::abs(g1.eval(q[i].x, q[i].y) - g0.eval(q[i].x, q[i].y));
    m = std::max(m, diff[i]);
    wsum += q[i].w;
  }
  if (p == kInf || m == 0.0) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q[i].w * std::pow(diff[i] / m, p);
  return m * std::pow(s / wsum, 1.0 / p);
}

// Mean of g1 - g0 over the domain; equals d_1 for ordered pairs.
inline double energy_difference(const GridFunction& g0, const GridFunction& g1) {
  detail::check_common_domain(g0, g1, "energy_difference");
  const auto q = domain_quadrature(g0);
  double wsum = 0.0, s = 0.0;
  if (g0.box().dim == 1) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      s += q[i].w * (g1.at(int(i)) - g0.at(int(i)));
      wsum += q[i].w;
    }
  } else {
    for (const auto& pt : q) {
      s += pt.w * (g1.eval(pt.x, pt.y) - g0.eval(pt.x, pt.y));
      wsum += pt.w;
    }
  }
  if (wsum <= 0.0) throw validation_error("energy_difference: empty quadrature domain");
  return s / wsum;
}

// Second-derivative measure of a 1-D convex potential: atoms where the slope
// jumps sharply (mass = jump), absolutely continuous part from the remaining
// second differences. Total mass telescopes to the slope range, the length
// of the gradient image.
inline Measure1D ma_measure_1d(const ConvexGridFunction& f) {
  const Box& b = f.box();
  if (b.dim != 1) throw validation_error("ma_measure_1d: one-dimensional input required");
  const int n = b.res[0];
  const double h = b.step(0);
  std::vector<double> slope(n - 1);
  for (int i = 0; i + 1 < n; ++i) slope[i] = (f.values()[i + 1] - f.values()[i]) / h;
  const double range = slope[n - 2] - slope[0];

  // A node's curvature mass is the local slope jump; calling it an atom when
  // it exceeds range * sqrt(h) separates genuine kinks (mass O(1)) from
  // smooth curvature (mass O(h)) at any of the supported resolutions.
  const double atom_threshold = std::max(range, 0.0) * std::sqrt(h);

  std::vector<std::pair<double, double>> atoms;
  std::vector<double> edges(n + 1);
  edges[0] = b.node(0, 0);
  for (int i = 0; i + 1 < n; ++i) edges[i + 1] = b.node(0, i) + 0.5 * h;
  edges[n] = b.node(0, n - 1);
  std::vector<double> masses(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    double m = slope[i] - slope[i - 1];
    if (m < 0.0) m = 0.0;   // certified convex; clip rounding residue
    if (m > atom_threshold && atom_threshold > 0.0) {
      atoms.push_back({b.node(0, i), m});
    } else {
      masses[i] = m;
    }
  }
  return Measure1D(std::move(atoms), std::move(edges), std::move(masses));
}

// Distribution of g under normalized Lebesgue measure on the domain.
// Constant functions collapse to a point mass; otherwise a histogram over
// [min, max] with the requested number of bins.
inline Measure1D pushforward(const GridFunction& g, int bins) {
  if (bins < 1) throw validation_error("pushforward: bins must be >= 1");
  const auto q = domain_quadrature(g);
  if (q.empty()) throw validation_error("pushforward: empty quadrature domain");
  std::vector<double> vals(q.size());
  double wsum = 0.0, lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < q.size(); ++i) {
    vals[i] = g.box().dim == 1 ? g.at(int(i)) : g.eval(q[i].x, q[i].y);
    lo = std::min(lo, vals[i]);
    hi = std::max(hi, vals[i]);
    wsum += q[i].w;
  }
  if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
    return Measure1D::point_mass(0.5 * (lo + hi), 1.0);
  }
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i) edges[i] = lo + (hi - lo) * i / bins;
  std::vector<double> masses(bins, 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    int idx = static_cast<int>((vals[i] - lo) / (hi - lo) * bins);
    idx = std::max(0, std::min(bins - 1, idx));
    masses[idx] += q[i].w / wsum;
  }
  return Measure1D({}, std::move(edges), std::move(masses));
}

} // namespace torquant
