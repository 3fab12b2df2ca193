#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "torquant/errors.hpp"
#include "torquant/grid.hpp"
#include "torquant/polytope.hpp"

namespace torquant {

namespace detail {

struct Conj1D {
  std::vector<double> values;
  std::vector<int> argmax;
  // Per target: the sup is attained only at the first/last source node, with
  // the neighbor strictly worse. A plateau that reaches the boundary but is
  // also attained inside (affine pieces) does not escape.
  std::vector<char> escape_lo;
  std::vector<char> escape_hi;
};

// g(t) = max_i (t * x_i - f_i) over the uniform source grid x_i = x0 + i h,
// for ascending targets t. The leftmost argmax is nondecreasing in t, so a
// divide-and-conquer over the target list costs O((N+M) log M); when the
// source is known convex a two-pointer sweep does it in O(N+M).
inline Conj1D conjugate_1d(const std::vector<double>& f, double x0, double h,
                           const std::vector<double>& ts, bool source_convex) {
  const int n = static_cast<int>(f.size());
  const int m = static_cast<int>(ts.size());
  Conj1D out;
  out.values.resize(m);
  out.argmax.resize(m);
  out.escape_lo.assign(m, 0);
  out.escape_hi.assign(m, 0);
  auto score = [&](double t, int i) { return t * (x0 + i * h) - f[i]; };
  auto flag = [&](int q, int best, double bestv) {
    const double tol = 1e-12 * (1.0 + std::abs(bestv));
    if (best == 0 && n > 1 && score(ts[q], 1) < bestv - tol) out.escape_lo[q] = 1;
    if (best == n - 1 && n > 1 && score(ts[q], n - 2) < bestv - tol) out.escape_hi[q] = 1;
  };

  if (source_convex) {
    int j = 0;
    for (int q = 0; q < m; ++q) {
      while (j + 1 < n && score(ts[q], j + 1) >= score(ts[q], j)) ++j;
      out.values[q] = score(ts[q], j);
      out.argmax[q] = j;
      flag(q, j, out.values[q]);
    }
    return out;
  }

  // Explicit stack of (target range, admissible argmax range).
  struct Frame {
    int tlo, thi, alo, ahi;
  };
  std::vector<Frame> stack;
  stack.push_back({0, m - 1, 0, n - 1});
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    if (fr.tlo > fr.thi) continue;
    const int mid = fr.tlo + (fr.thi - fr.tlo) / 2;
    int best = fr.alo;
    double bestv = score(ts[mid], fr.alo);
    for (int i = fr.alo + 1; i <= fr.ahi; ++i) {
      const double v = score(ts[mid], i);
      if (v > bestv) {
        bestv = v;
        best = i;
      }
    }
    out.values[mid] = bestv;
    out.argmax[mid] = best;
    flag(mid, best, bestv);
    stack.push_back({fr.tlo, mid - 1, fr.alo, best});
    stack.push_back({mid + 1, fr.thi, best, fr.ahi});
  }
  return out;
}

inline std::vector<double> grid_nodes(const Box& b, int axis) {
  std::vector<double> out(b.res[axis]);
  for (int i = 0; i < b.res[axis]; ++i) out[i] = b.node(axis, i);
  return out;
}

} // namespace detail

// Discrete slope range of f along an axis (min and max consecutive-difference
// quotients).
inline std::pair<double, double> slope_range(const GridFunction& f, int axis) {
  const Box& b = f.box();
  if (axis < 0 || axis >= b.dim) throw validation_error("slope_range: bad axis");
  double lo = kInf, hi = -kInf;
  const double h = b.step(axis);
  if (b.dim == 1) {
    for (int i = 0; i + 1 < b.res[0]; ++i) {
      const double s = (f.at(i + 1) - f.at(i)) / h;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  } else {
    for (int i = 0; i < b.res[0]; ++i) {
      for (int j = 0; j < b.res[1]; ++j) {
        if (axis == 0 && i + 1 < b.res[0]) {
          const double s = (f.at(i + 1, j) - f.at(i, j)) / h;
          lo = std::min(lo, s);
          hi = std::max(hi, s);
        }
        if (axis == 1 && j + 1 < b.res[1]) {
          const double s = (f.at(i, j + 1) - f.at(i, j)) / h;
          lo = std::min(lo, s);
          hi = std::max(hi, s);
        }
      }
    }
  }
  return {lo, hi};
}

// Legendre transform of a box function onto the uniform grid over the
// polytope's bounding box: g(xi) = max_x (<xi, x> - f(x)).
//
// Coverage policy: an argmax pinned to the source-box boundary means the true
// supremum may live outside the sampled box. That is tolerated for slope
// targets within a 10% collar of the polytope's bounding box (extreme slopes
// are reached only in the limit) and for targets outside the polytope, and is
// an error for targets deeper inside.
inline GridFunction discrete_legendre(const GridFunction& f,
                                      std::shared_ptr<const LatticePolytope> p,
                                      std::array<int, 2> res) {
  if (!p) throw validation_error("discrete_legendre: null polytope");
  const Box& src = f.box();
  if (src.dim != p->dim()) throw validation_error("discrete_legendre: dimension mismatch");

  Box target;
  target.dim = src.dim;
  for (int a = 0; a < src.dim; ++a) {
    const auto [lo, hi] = p->bounds(a);
    target.lo[a] = to_double(lo);
    target.hi[a] = to_double(hi);
    target.res[a] = res[a];
  }
  target.validate();

  auto in_collar = [&](int axis, double t) {
    const double w = target.hi[axis] - target.lo[axis];
    return t < target.lo[axis] + 0.1 * w || t > target.hi[axis] - 0.1 * w;
  };

  if (src.dim == 1) {
    const auto ts = detail::grid_nodes(target, 0);
    auto c = detail::conjugate_1d(f.values(), src.lo[0], src.step(0), ts, false);
    for (int q = 0; q < target.res[0]; ++q) {
      const bool hit = c.escape_lo[q] || c.escape_hi[q];
      if (hit && !in_collar(0, ts[q])) {
        throw slope_coverage_error("discrete_legendre: slope " + format_double(ts[q]) +
                                   " attains its sup on the box boundary; enlarge the box");
      }
    }
    return GridFunction(target, std::move(c.values), std::move(p));
  }

  // Axis-1 pass: conjugate each source row onto the eta grid.
  const auto etas = detail::grid_nodes(target, 1);
  const int nx = src.res[0], meta = target.res[1], mxi = target.res[0];
  std::vector<std::vector<double>> h(nx);
  std::vector<std::vector<char>> hit1(nx);
  for (int i = 0; i < nx; ++i) {
    std::vector<double> row(src.res[1]);
    for (int j = 0; j < src.res[1]; ++j) row[j] = f.at(i, j);
    auto c = detail::conjugate_1d(row, src.lo[1], src.step(1), etas, false);
    h[i] = std::move(c.values);
    hit1[i].resize(meta);
    for (int q = 0; q < meta; ++q) hit1[i][q] = (c.escape_lo[q] || c.escape_hi[q]) ? 1 : 0;
  }

  // Axis-0 pass: for each eta, conjugate -h(., eta) onto the xi grid.
  const auto xis = detail::grid_nodes(target, 0);
  std::vector<double> values(std::size_t(mxi) * meta);
  for (int q = 0; q < meta; ++q) {
    std::vector<double> col(nx);
    for (int i = 0; i < nx; ++i) col[i] = -h[i][q];
    auto c = detail::conjugate_1d(col, src.lo[0], src.step(0), xis, false);
    for (int s = 0; s < mxi; ++s) {
      values[std::size_t(s) * meta + q] = c.values[s];
      const bool hit = c.escape_lo[s] || c.escape_hi[s] || hit1[c.argmax[s]][q];
      if (hit) {
        const double pt[2] = {xis[s], etas[q]};
        const bool interior =
            p->contains_point(pt, -1e-12) && !in_collar(0, pt[0]) && !in_collar(1, pt[1]);
        if (interior) {
          throw slope_coverage_error("discrete_legendre: slope (" + format_double(pt[0]) + "," +
                                     format_double(pt[1]) +
                                     ") attains its sup on the box boundary; enlarge the box");
        }
      }
    }
  }
  return GridFunction(target, std::move(values), std::move(p));
}

// Inverse-direction transform: phi(x) = max_xi (<xi, x> - g(xi)) over the
// slope-side grid (1-D; the slope grid is the interval polytope itself).
inline GridFunction conjugate_back_1d(const GridFunction& g, const Box& target) {
  if (g.box().dim != 1 || target.dim != 1) {
    throw validation_error("conjugate_back_1d: one-dimensional inputs required");
  }
  const auto xs = detail::grid_nodes(target, 0);
  auto c = detail::conjugate_1d(g.values(), g.box().lo[0], g.box().step(0), xs, false);
  return GridFunction(target, std::move(c.values));
}

namespace detail {

// Full-rectangle conjugate onto an explicit target box (no polytope, no
// coverage policy): the envelope path controls its own slope grid.
inline GridFunction conjugate_to_box(const GridFunction& f, const Box& target) {
  const Box& src = f.box();
  if (src.dim != target.dim) throw validation_error("conjugate_to_box: dimension mismatch");
  if (src.dim == 1) {
    const auto ts = grid_nodes(target, 0);
    auto c = conjugate_1d(f.values(), src.lo[0], src.step(0), ts, false);
    return GridFunction(target, std::move(c.values));
  }
  const auto etas = grid_nodes(target, 1);
  const int nx = src.res[0];
  std::vector<std::vector<double>> h(nx);
  for (int i = 0; i < nx; ++i) {
    std::vector<double> row(src.res[1]);
    for (int j = 0; j < src.res[1]; ++j) row[j] = f.at(i, j);
    h[i] = conjugate_1d(row, src.lo[1], src.step(1), etas, false).values;
  }
  const auto xis = grid_nodes(target, 0);
  std::vector<double> values(target.size());
  for (int q = 0; q < target.res[1]; ++q) {
    std::vector<double> col(nx);
    for (int i = 0; i < nx; ++i) col[i] = -h[i][q];
    auto c = conjugate_1d(col, src.lo[0], src.step(0), xis, false);
    for (int s = 0; s < target.res[0]; ++s) values[std::size_t(s) * target.res[1] + q] = c.values[s];
  }
  return GridFunction(target, std::move(values));
}

// Exact lower convex hull values at the grid nodes (1-D), via the monotone
// chain over the graph points.
inline std::vector<double> lower_hull_values(const GridFunction& f) {
  const int n = f.box().res[0];
  std::vector<int> hull;
  auto removes = [&](int a, int b, int c) {
    // true when b lies on or above segment (a, c): drop it.
    const double xa = f.box().node(0, a), xb = f.box().node(0, b), xc = f.box().node(0, c);
    return (f.at(b) - f.at(a)) * (xc - xa) >= (f.at(c) - f.at(a)) * (xb - xa);
  };
  for (int i = 0; i < n; ++i) {
    while (hull.size() >= 2 && removes(hull[hull.size() - 2], hull.back(), i)) hull.pop_back();
    hull.push_back(i);
  }
  std::vector<double> out(n);
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const int a = hull[s], b = hull[s + 1];
    const double xa = f.box().node(0, a), xb = f.box().node(0, b);
    for (int i = a; i <= b; ++i) {
      const double t = (b == a) ? 0.0 : (f.box().node(0, i) - xa) / (xb - xa);
      out[i] = (1.0 - t) * f.at(a) + t * f.at(b);
    }
  }
  if (hull.size() == 1) out[hull[0]] = f.at(hull[0]);
  return out;
}

} // namespace detail

// Largest convex minorant sampled on the same grid. 1-D: the exact lower
// convex hull of the graph (which is what the double Legendre transform with
// unrestricted slopes converges to). 2-D: the double per-axis transform over
// a slope grid covering the discrete slope range with a 10% margin;
// grid-accurate rather than exact.
inline ConvexGridFunction convex_envelope(const GridFunction& f) {
  const Box& b = f.box();
  if (b.dim == 1) {
    return ConvexGridFunction(GridFunction(b, detail::lower_hull_values(f), f.polytope()));
  }
  Box slopes;
  slopes.dim = 2;
  for (int a = 0; a < 2; ++a) {
    auto [lo, hi] = slope_range(f, a);
    double w = hi - lo;
    if (w <= 0.0) w = std::max(1.0, std::abs(lo));
    slopes.lo[a] = lo - 0.1 * w;
    slopes.hi[a] = hi + 0.1 * w;
    slopes.res[a] = b.res[a];
  }
  slopes.validate();
  GridFunction g = detail::conjugate_to_box(f, slopes);
  GridFunction env = detail::conjugate_to_box(g, b);
  return ConvexGridFunction(GridFunction(b, env.values(), f.polytope()));
}

} // namespace torquant
