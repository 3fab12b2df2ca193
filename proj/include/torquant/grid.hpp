#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "torquant/errors.hpp"
#include "torquant/polytope.hpp"

namespace torquant {

// Uniform axis-aligned grid domain in 1 or 2 dimensions.
struct Box {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  std::array<int, 2> res{2, 2};

  static Box interval(double a, double b, int n) {
    Box box;
    box.dim = 1;
    box.lo[0] = a;
    box.hi[0] = b;
    box.res[0] = n;
    box.validate();
    return box;
  }

  static Box rect(double ax, double bx, int nx, double ay, double by, int ny) {
    Box box;
    box.dim = 2;
    box.lo = {ax, ay};
    box.hi = {bx, by};
    box.res = {nx, ny};
    box.validate();
    return box;
  }

  void validate() const {
    if (dim != 1 && dim != 2) throw validation_error("Box: dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
      if (!(lo[a] < hi[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a])) {
        throw validation_error("Box: need finite lo < hi per axis");
      }
      if (res[a] < 2) throw validation_error("Box: resolution must be >= 2 per axis");
    }
  }

  double step(int axis) const { return (hi[axis] - lo[axis]) / (res[axis] - 1); }
  double node(int axis, int i) const { return lo[axis] + i * step(axis); }
  std::size_t size() const { return dim == 1 ? std::size_t(res[0]) : std::size_t(res[0]) * res[1]; }

  bool same_grid(const Box& o) const {
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a) {
      if (res[a] != o.res[a]) return false;
      if (std::abs(lo[a] - o.lo[a]) > 1e-12 * std::max(1.0, std::abs(lo[a]))) return false;
      if (std::abs(hi[a] - o.hi[a]) > 1e-12 * std::max(1.0, std::abs(hi[a]))) return false;
    }
    return true;
  }
};

// Grid-sampled scalar function. For polytope-domain functions the box is the
// polytope's bounding box and the polytope rides along for quadrature; node
// values outside the polytope are still finite (conjugates extend naturally)
// but carry no quadrature weight.
class GridFunction {
public:
  GridFunction(Box box, std::vector<double> values,
               std::shared_ptr<const LatticePolytope> polytope = nullptr)
      : box_(box), values_(std::move(values)), polytope_(std::move(polytope)) {
    box_.validate();
    if (values_.size() != box_.size()) {
      throw validation_error("GridFunction: value count does not match grid size");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw validation_error("GridFunction: nonfinite value");
    }
    if (polytope_ && polytope_->dim() != box_.dim) {
      throw validation_error("GridFunction: polytope dimension does not match grid");
    }
  }

  static GridFunction sample(const Box& box, const std::function<double(double)>& f) {
    std::vector<double> v(box.size());
    for (int i = 0; i < box.res[0]; ++i) v[i] = f(box.node(0, i));
    return GridFunction(box, std::move(v));
  }

  static GridFunction sample2(const Box& box,
                              const std::function<double(double, double)>& f) {
    std::vector<double> v(box.size());
    for (int i = 0; i < box.res[0]; ++i) {
      for (int j = 0; j < box.res[1]; ++j) {
        v[std::size_t(i) * box.res[1] + j] = f(box.node(0, i), box.node(1, j));
      }
    }
    return GridFunction(box, std::move(v));
  }

  const Box& box() const { return box_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  const std::shared_ptr<const LatticePolytope>& polytope() const { return polytope_; }

  double at(int i) const { return values_[i]; }
  double at(int i, int j) const { return values_[std::size_t(i) * box_.res[1] + j]; }

  // Multilinear interpolation, clamped to the box.
  double eval(double x, double y = 0.0) const {
    auto locate = [&](int axis, double t) {
      const double s = (t - box_.lo[axis]) / box_.step(axis);
      int i = static_cast<int>(std::floor(s));
      i = std::max(0, std::min(i, box_.res[axis] - 2));
      const double frac = std::min(1.0, std::max(0.0, s - i));
      return std::pair<int, double>(i, frac);
    };
    const auto [i, fx] = locate(0, x);
    if (box_.dim == 1) return (1 - fx) * values_[i] + fx * values_[i + 1];
    const auto [j, fy] = locate(1, y);
    return (1 - fx) * (1 - fy) * at(i, j) + (1 - fx) * fy * at(i, j + 1) +
           fx * (1 - fy) * at(i + 1, j) + fx * fy * at(i + 1, j + 1);
  }

private:
  Box box_;
  std::vector<double> values_;
  std::shared_ptr<const LatticePolytope> polytope_;
};

// GridFunction whose discrete convexity has been certified on construction.
// 1-D: the values coincide with their own lower convex hull. 2-D: directional
// second differences along the axes and both diagonals are nonnegative (a
// necessary condition; the full 2-D hull is out of scope at these grids).
class ConvexGridFunction {
public:
  explicit ConvexGridFunction(GridFunction f) : f_(std::move(f)) { certify(); }

  const GridFunction& grid() const { return f_; }
  const Box& box() const { return f_.box(); }
  const std::vector<double>& values() const { return f_.values(); }

private:
  void certify() const {
    const Box& b = f_.box();
    double scale = 1.0;
    for (double v : f_.values()) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * scale;
    if (b.dim == 1) {
      for (int i = 1; i + 1 < b.res[0]; ++i) {
        if (f_.at(i - 1) + f_.at(i + 1) - 2.0 * f_.at(i) < -tol) {
          throw validation_error("ConvexGridFunction: value dips below the hull at node " +
                                 std::to_string(i));
        }
      }
      return;
    }
    const int nx = b.res[0], ny = b.res[1];
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        if (i >= 1 && i + 1 < nx &&
            f_.at(i - 1, j) + f_.at(i + 1, j) - 2.0 * f_.at(i, j) < -tol) {
          throw validation_error("ConvexGridFunction: concavity along axis 0");
        }
        if (j >= 1 && j + 1 < ny &&
            f_.at(i, j - 1) + f_.at(i, j + 1) - 2.0 * f_.at(i, j) < -tol) {
          throw validation_error("ConvexGridFunction: concavity along axis 1");
        }
        if (i >= 1 && i + 1 < nx && j >= 1 && j + 1 < ny) {
          if (f_.at(i - 1, j - 1) + f_.at(i + 1, j + 1) - 2.0 * f_.at(i, j) < -tol ||
              f_.at(i - 1, j + 1) + f_.at(i + 1, j - 1) - 2.0 * f_.at(i, j) < -tol) {
            throw validation_error("ConvexGridFunction: concavity along a diagonal");
          }
        }
      }
    }
  }

  GridFunction f_;
};

} // namespace torquant
