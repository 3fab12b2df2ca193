#pragma once

#include <boost/rational.hpp>

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "torquant/errors.hpp"
#include "torquant/norms.hpp"

namespace torquant {

using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline long long floor_rational(const Rational& r) {
  const long long n = r.numerator(), d = r.denominator();   // d > 0 by normalization
  long long q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q;
}

inline long long ceil_rational(const Rational& r) { return -floor_rational(-r); }

// a*x + b*y <= c with primitive integer normal (b = 0 in one dimension).
struct HalfSpace {
  long long a = 0;
  long long b = 0;
  Rational c;
};

namespace detail {

inline long long gcd_ll(long long x, long long y) {
  x = x < 0 ? -x : x;
  y = y < 0 ? -y : y;
  while (y) {
    const long long t = x % y;
    x = y;
    y = t;
  }
  return x;
}

inline Rational cross(const std::vector<Rational>& o, const std::vector<Rational>& a,
                      const std::vector<Rational>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

} // namespace detail

// A full-dimensional rational polytope in dimension 1 or 2, the model's
// lattice data: level-k sections correspond to integer points of kP.
class LatticePolytope {
public:
  LatticePolytope(int dim, std::vector<std::vector<Rational>> vertices,
                  std::optional<std::vector<HalfSpace>> half_spaces = std::nullopt)
      : dim_(dim) {
    if (dim_ != 1 && dim_ != 2) throw validation_error("LatticePolytope: dimension must be 1 or 2");
    if (vertices.empty()) throw validation_error("LatticePolytope: no vertices");
    for (const auto& v : vertices) {
      if (static_cast<int>(v.size()) != dim_) {
        throw validation_error("LatticePolytope: vertex arity does not match dimension");
      }
    }
    if (dim_ == 1) {
      Rational lo = vertices[0][0], hi = vertices[0][0];
      for (const auto& v : vertices) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      if (lo == hi) throw validation_error("LatticePolytope: zero-length interval is not full-dimensional");
      hull_ = {{lo}, {hi}};
      hs_ = {HalfSpace{-1, 0, -lo}, HalfSpace{1, 0, hi}};
    } else {
      hull_ = convex_hull(vertices);
      if (hull_.size() < 3) {
        throw validation_error("LatticePolytope: vertices are collinear, polytope has zero area");
      }
      hs_ = edges_to_half_spaces(hull_);
    }
    if (half_spaces) {
      check_half_space_agreement(*half_spaces);
    }
  }

  int dim() const { return dim_; }

  // Hull vertices in canonical order (ascending in 1-D, counterclockwise
  // from the lexicographic minimum in 2-D).
  const std::vector<std::vector<Rational>>& vertices() const { return hull_; }
  const std::vector<HalfSpace>& half_spaces() const { return hs_; }

  Rational volume_rational() const {
    if (dim_ == 1) return hull_[1][0] - hull_[0][0];
    Rational twice(0);
    const std::size_t m = hull_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = hull_[i];
      const auto& q = hull_[(i + 1) % m];
      twice += p[0] * q[1] - q[0] * p[1];
    }
    return twice / 2;
  }

  double volume() const { return to_double(volume_rational()); }

  std::pair<Rational, Rational> bounds(int axis) const {
    if (axis < 0 || axis >= dim_) throw validation_error("LatticePolytope: bad axis");
    Rational lo = hull_[0][axis], hi = hull_[0][axis];
    for (const auto& v : hull_) {
      lo = std::min(lo, v[axis]);
      hi = std::max(hi, v[axis]);
    }
    return {lo, hi};
  }

  bool contains_lattice_scaled(const Label& pt, long long k) const {
    for (const auto& h : hs_) {
      Rational lhs(h.a * pt[0]);
      if (dim_ == 2) lhs += Rational(h.b * pt[1]);
      if (lhs > h.c * k) return false;
    }
    return true;
  }

  // Integer points of the dilate kP, lexicographic.
  std::vector<Label> lattice_points(long long k) const {
    if (k < 1) throw validation_error("lattice_points: k must be >= 1");
    std::vector<Label> out;
    if (dim_ == 1) {
      const auto [lo, hi] = bounds(0);
      for (long long x = ceil_rational(lo * k); x <= floor_rational(hi * k); ++x) {
        out.push_back({x});
      }
      return out;
    }
    const auto [lox, hix] = bounds(0);
    const auto [loy, hiy] = bounds(1);
    for (long long x = ceil_rational(lox * k); x <= floor_rational(hix * k); ++x) {
      for (long long y = ceil_rational(loy * k); y <= floor_rational(hiy * k); ++y) {
        if (contains_lattice_scaled({x, y}, k)) out.push_back({x, y});
      }
    }
    return out;
  }

  bool contains_point(const double* pt, double tol) const {
    for (const auto& h : hs_) {
      double lhs = static_cast<double>(h.a) * pt[0];
      if (dim_ == 2) lhs += static_cast<double>(h.b) * pt[1];
      if (lhs > to_double(h.c) + tol) return false;
    }
    return true;
  }

  std::vector<std::array<double, 2>> vertices_double() const {
    std::vector<std::array<double, 2>> out;
    for (const auto& v : hull_) {
      out.push_back({to_double(v[0]), dim_ == 2 ? to_double(v[1]) : 0.0});
    }
    return out;
  }

private:
  static std::vector<std::vector<Rational>> convex_hull(std::vector<std::vector<Rational>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<std::vector<Rational>> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (k >= 2 && detail::cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
      h[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
      while (k >= lower && detail::cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
      h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;   // counterclockwise, starting at the lexicographic minimum
  }

  static std::vector<HalfSpace> edges_to_half_spaces(
      const std::vector<std::vector<Rational>>& hull) {
    std::vector<HalfSpace> out;
    const std::size_t m = hull.size();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = hull[i];
      const auto& q = hull[(i + 1) % m];
      // Counterclockwise edge p -> q: outward normal (dy, -dx).
      Rational na = q[1] - p[1];
      Rational nb = p[0] - q[0];
      // Scale to a primitive integer normal.
      const long long den = std::lcm(na.denominator(), nb.denominator());
      long long ia = na.numerator() * (den / na.denominator());
      long long ib = nb.numerator() * (den / nb.denominator());
      const long long g = detail::gcd_ll(ia, ib);
      ia /= g;
      ib /= g;
      out.push_back(HalfSpace{ia, ib, Rational(ia) * p[0] + Rational(ib) * p[1]});
    }
    return out;
  }

  void check_half_space_agreement(const std::vector<HalfSpace>& given) const {
    auto norm_key = [](const HalfSpace& h) {
      return std::tuple<long long, long long, long long, long long>(
          h.a, h.b, h.c.numerator(), h.c.denominator());
    };
    auto canon = hs_;
    auto user = given;
    for (auto& h : user) {
      const long long g = detail::gcd_ll(h.a, h.b);
      if (g == 0) throw validation_error("LatticePolytope: half-space with zero normal");
      h.a /= g;
      h.b /= g;
      h.c /= g;
    }
    auto key_less = [&](const HalfSpace& x, const HalfSpace& y) { return norm_key(x) < norm_key(y); };
    std::sort(canon.begin(), canon.end(), key_less);
    std::sort(user.begin(), user.end(), key_less);
    bool ok = canon.size() == user.size();
    for (std::size_t i = 0; ok && i < canon.size(); ++i) {
      ok = norm_key(canon[i]) == norm_key(user[i]);
    }
    if (!ok) {
      throw validation_error("LatticePolytope: provided half-spaces disagree with the vertex hull");
    }
  }

  int dim_;
  std::vector<std::vector<Rational>> hull_;
  std::vector<HalfSpace> hs_;
};

// --- double-precision polygon helpers for quadrature cells ---------------

struct PolygonPiece {
  double area = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

namespace detail {

inline std::vector<std::array<double, 2>> clip_halfplane(
    const std::vector<std::array<double, 2>>& poly, double a, double b, double c) {
  std::vector<std::array<double, 2>> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % m];
    const double fp = a * p[0] + b * p[1] - c;
    const double fq = a * q[0] + b * q[1] - c;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double t = fp / (fp - fq);
      out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
    }
  }
  return out;
}

} // namespace detail

// Clip an axis-aligned rectangle against the polytope (2-D) and return the
// area and centroid of the intersection; zero area when disjoint.
inline PolygonPiece clip_cell(const LatticePolytope& p, double x0, double x1, double y0,
                              double y1) {
  std::vector<std::array<double, 2>> poly = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  for (const auto& h : p.half_spaces()) {
    poly = detail::clip_halfplane(poly, static_cast<double>(h.a), static_cast<double>(h.b),
                                  to_double(h.c));
    if (poly.size() < 3) return PolygonPiece{};
  }
  double twice_a = 0.0, sx = 0.0, sy = 0.0;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& u = poly[i];
    const auto& v = poly[(i + 1) % m];
    const double w = u[0] * v[1] - v[0] * u[1];
    twice_a += w;
    sx += (u[0] + v[0]) * w;
    sy += (u[1] + v[1]) * w;
  }
  if (twice_a <= 0.0) return PolygonPiece{};
  PolygonPiece piece;
  piece.area = 0.5 * twice_a;
  piece.cx = sx / (3.0 * twice_a);
  piece.cy = sy / (3.0 * twice_a);
  return piece;
}

} // namespace torquant
