#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <map>
#include <random>
#include <vector>

#include "torquant/common.hpp"
#include "torquant/errors.hpp"
#include "torquant/norms.hpp"

namespace torquant {

// An element of V1 (x) V2 by its coefficient matrix in the chosen bases:
// T = sum_ij M_ij e_i (x) f_j.
struct Tensor2 {
  Eigen::MatrixXd coefficients;

  explicit Tensor2(Eigen::MatrixXd m) : coefficients(std::move(m)) {
    if (coefficients.size() == 0 || !coefficients.allFinite()) {
      throw validation_error("Tensor2: coefficients must be nonempty and finite");
    }
  }
};

// A degree-k element of Sym^k(V) in monomial form: P(y) = sum_a c_a y^a,
// keyed by exponent vectors a with |a| = k.
class SymPoly {
public:
  SymPoly(int degree, int dim, std::map<std::vector<int>, double> coeffs)
      : degree_(degree), dim_(dim), coeffs_(std::move(coeffs)) {
    if (degree_ < 1 || dim_ < 1) throw validation_error("SymPoly: degree and dim must be positive");
    for (const auto& [a, c] : coeffs_) {
      if (static_cast<int>(a.size()) != dim_) {
        throw validation_error("SymPoly: exponent vector length must equal dim");
      }
      int total = 0;
      for (int e : a) {
        if (e < 0) throw validation_error("SymPoly: negative exponent");
        total += e;
      }
      if (total != degree_) throw validation_error("SymPoly: exponents must sum to the degree");
      if (!std::isfinite(c)) throw validation_error("SymPoly: nonfinite coefficient");
    }
  }

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  const std::map<std::vector<int>, double>& coefficients() const { return coeffs_; }

  double eval(const Eigen::VectorXd& y) const {
    double s = 0.0;
    for (const auto& [a, c] : coeffs_) {
      double t = c;
      for (int i = 0; i < dim_; ++i)
        for (int e = 0; e < a[i]; ++e) t *= y[i];
      s += t;
    }
    return s;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
    for (const auto& [a, c] : coeffs_) {
      for (int i = 0; i < dim_; ++i) {
        if (a[i] == 0) continue;
        double t = c * a[i];
        for (int j = 0; j < dim_; ++j) {
          const int e = (j == i) ? a[j] - 1 : a[j];
          for (int r = 0; r < e; ++r) t *= y[j];
        }
        g[i] += t;
      }
    }
    return g;
  }

private:
  int degree_;
  int dim_;
  std::map<std::vector<int>, double> coeffs_;
};

namespace detail {

// Whitened coefficient matrix L1^T M L2 for Gram factors G_i = L_i L_i^T.
// Rank-1 check: x (x) y whitens to (L1^T x)(L2^T y)^T, whose only singular
// value is ||x||_1 ||y||_2, so both tensor norms reproduce the product.
inline Eigen::MatrixXd whitened(const Tensor2& t, const HermitianNorm& n1,
                                const HermitianNorm& n2) {
  if (t.coefficients.rows() != n1.dim() || t.coefficients.cols() != n2.dim()) {
    throw validation_error("tensor norm: coefficient dims do not match the factor norms");
  }
  return n1.cholesky_lower().transpose() * t.coefficients * n2.cholesky_lower();
}

} // namespace detail

// Projective (nuclear) tensor norm: infimum of sum ||a_r|| ||b_r|| over
// decompositions, which for Hermitian factors equals the singular value sum
// of the whitened matrix (validated against the decomposition infimum by
// brute force in the tests).
inline double projective_norm2(const Tensor2& t, const HermitianNorm& n1,
                               const HermitianNorm& n2) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::whitened(t, n1, n2));
  return svd.singularValues().sum();
}

// Injective tensor norm: sup of |(xi (x) eta)(T)| over dual unit vectors,
// the top singular value of the whitened matrix.
inline double injective_norm2(const Tensor2& t, const HermitianNorm& n1,
                              const HermitianNorm& n2) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::whitened(t, n1, n2));
  return svd.singularValues().maxCoeff();
}

// Norm induced on the target of a surjection: ||q|| = min{ ||g|| : pi g = q }.
// The minimizer lives on the Gram-orthogonal complement of ker pi; the lift
// L = G^{-1} pi^T (pi G^{-1} pi^T)^{-1} maps q to it, and the quotient Gram
// is L^T G L.
inline HermitianNorm quotient_norm(const HermitianNorm& n, const Eigen::MatrixXd& surjection) {
  const int v = n.dim();
  const int q = static_cast<int>(surjection.rows());
  if (surjection.cols() != v || q < 1 || q > v) {
    throw validation_error("quotient_norm: surjection must be q x dim with 1 <= q <= dim");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(surjection.transpose());
  if (qr.rank() < q) {
    throw validation_error("quotient_norm: surjection is rank deficient");
  }
  Eigen::MatrixXd gram = n.gram();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw ill_conditioned_error("quotient_norm: gram Cholesky failed");
  }
  Eigen::MatrixXd w = llt.solve(surjection.transpose());        // v x q
  Eigen::MatrixXd lift = w * (surjection * w).inverse();        // v x q, pi * lift = I
  Eigen::MatrixXd gq = lift.transpose() * gram * lift;
  return HermitianNorm(((gq + gq.transpose()) * 0.5).eval());
}

// Best value, dispersion across restarts, and an independent sampled lower
// bound for the evaluation norm.
struct SymEvResult {
  double value = 0.0;
  double restart_spread = 0.0;
  double mc_lower_bound = 0.0;
};

// sup over the dual unit sphere { y : y^T G^{-1} y = 1 } of |P(y)|.
// Substituting y = L u turns the constraint into |u| = 1; projected gradient
// ascent on the sphere with random restarts, plus a Monte-Carlo certificate.
inline SymEvResult sym_ev_norm(const SymPoly& p, const HermitianNorm& n, int restarts = 32,
                               unsigned seed = 2026) {
  if (p.dim() != n.dim()) throw validation_error("sym_ev_norm: dimension mismatch");
  if (restarts < 1) throw validation_error("sym_ev_norm: need at least one restart");
  const int v = p.dim();
  const Eigen::MatrixXd l = n.cholesky_lower();

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_unit = [&]() {
    Eigen::VectorXd u(v);
    double s;
    do {
      for (int i = 0; i < v; ++i) u[i] = gauss(rng);
      s = u.norm();
    } while (s < 1e-12);
    return (u / s).eval();
  };

  auto objective = [&](const Eigen::VectorXd& u) { return std::abs(p.eval(l * u)); };

  double best = -kInf, worst = kInf;
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd u = random_unit();
    double f = objective(u);
    double step = 1e-2;
    for (int iter = 0; iter < 10000; ++iter) {
      const Eigen::VectorXd y = l * u;
      const double val = p.eval(y);
      const double sgn = (val >= 0.0) ? 1.0 : -1.0;
      Eigen::VectorXd g = sgn * (l.transpose() * p.gradient(y));
      g -= g.dot(u) * u;
      if (g.norm() < 1e-8) break;
      // Backtracking: halve until the step does not decrease |P|.
      bool moved = false;
      while (step >= 1e-14) {
        Eigen::VectorXd cand = (u + step * g).normalized();
        const double fc = objective(cand);
        if (fc >= f) {
          u = cand;
          f = fc;
          moved = true;
          step = std::min(step * 2.0, 1e-2);
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    best = std::max(best, f);
    worst = std::min(worst, f);
  }

  double mc = 0.0;
  for (int i = 0; i < 100000; ++i) mc = std::max(mc, objective(random_unit()));

  // The sampled max is reported as an independent certificate, not folded
  // into the answer: value >= mc_lower_bound is a real check on the ascent.
  SymEvResult out;
  out.value = best;
  out.restart_spread = best - worst;
  out.mc_lower_bound = mc;
  return out;
}

} // namespace torquant
