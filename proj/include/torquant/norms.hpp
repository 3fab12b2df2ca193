#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "torquant/common.hpp"
#include "torquant/errors.hpp"

namespace torquant {

// Monomial exponent tuple (or a bare index wrapped in a 1-vector). Labels
// are kept sorted lexicographically so every downstream iteration order is
// reproducible.
using Label = std::vector<long>;

inline std::string label_to_string(const Label& l) {
  std::ostringstream os;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i) os << ',';
    os << l[i];
  }
  return os.str();
}

// Log-eigenvalues of one norm relative to another, descending. For norms at
// scale k, entries are typically O(k); callers divide by k themselves.
struct LogRelativeSpectrum {
  std::vector<double> lambda;
};

// A distance together with a certified half-width: |true - value| is at
// most `uncertainty`. Exact computations report 0.
struct DpResult {
  double value = 0.0;
  double uncertainty = 0.0;
};

namespace detail {

inline void check_dim_match(int a, int b, const char* who) {
  if (a != b) {
    throw validation_error(std::string(who) + ": dimension mismatch (" +
                           std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

} // namespace detail

// A Hermitian (L2) norm given by its Gram matrix in a fixed basis. Two
// storage forms share the interface:
//   * dense: an explicit symmetric positive definite matrix. Construction
//     validates symmetry (1e-12 relative), positivity, and condition
//     (rejected above 1e12 with a distinct error).
//   * log-diagonal: Gram = diag(e^{2 w_j}) with the w_j kept in log space.
//     Quantization produces these with |w| in the hundreds, where the
//     materialized matrix would be unusable; every operation that meets a
//     log-diagonal norm works on the w_j directly and stays exact.
class HermitianNorm {
public:
  explicit HermitianNorm(Eigen::MatrixXd gram) {
    const int v = static_cast<int>(gram.rows());
    if (v == 0 || gram.cols() != v) {
      throw validation_error("HermitianNorm: gram must be square and nonempty");
    }
    if (!gram.allFinite()) {
      throw validation_error("HermitianNorm: gram has nonfinite entries");
    }
    const double scale = gram.cwiseAbs().maxCoeff();
    const double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1e-300)) {
      throw validation_error("HermitianNorm: gram not symmetric within 1e-12 relative tolerance");
    }
    gram = ((gram + gram.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0) {
      throw validation_error("HermitianNorm: gram not positive definite (min eigenvalue " +
                             format_double(lo) + ")");
    }
    if (hi / lo > 1e12) {
      throw ill_conditioned_error("HermitianNorm: gram condition " + format_double(hi / lo) +
                                  " exceeds 1e12");
    }
    dense_ = std::move(gram);
    // A dense gram that is numerically diagonal also gets the exact
    // log-diagonal view, so pairs of such norms take the fast paths.
    double offdiag = 0.0;
    for (int i = 0; i < v; ++i)
      for (int j = 0; j < v; ++j)
        if (i != j) offdiag = std::max(offdiag, std::abs((*dense_)(i, j)));
    if (offdiag == 0.0) {
      std::vector<double> w(v);
      for (int i = 0; i < v; ++i) w[i] = 0.5 * std::log((*dense_)(i, i));
      logdiag_ = std::move(w);
    }
  }

  // Gram = diag(e^{2 w_j}); no conditioning gate, the representation is
  // exact at any scale.
  static HermitianNorm from_log_diagonal(std::vector<double> w) {
    if (w.empty()) throw validation_error("HermitianNorm: empty log-diagonal");
    for (double x : w) {
      if (!std::isfinite(x)) throw validation_error("HermitianNorm: nonfinite log-diagonal entry");
    }
    return HermitianNorm(std::move(w), private_tag{});
  }

  int dim() const {
    return logdiag_ ? static_cast<int>(logdiag_->size()) : static_cast<int>(dense_->rows());
  }

  bool is_log_diagonal() const { return logdiag_.has_value(); }

  // Defined when is_log_diagonal(); gram_jj = e^{2 w_j}.
  const std::vector<double>& log_diagonal() const {
    if (!logdiag_) throw validation_error("HermitianNorm: not log-diagonal");
    return *logdiag_;
  }

  // Materialized matrix. For a log-diagonal norm with |2w| beyond double
  // range this would quietly over/underflow, so it refuses instead.
  Eigen::MatrixXd gram() const {
    if (dense_) return *dense_;
    const int v = dim();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(v, v);
    for (int i = 0; i < v; ++i) {
      const double e = 2.0 * (*logdiag_)[i];
      if (std::abs(e) > 600.0) {
        throw ill_conditioned_error("HermitianNorm: log-diagonal entries too large to materialize");
      }
      g(i, i) = std::exp(e);
    }
    return g;
  }

  // Lower Cholesky factor of the Gram.
  Eigen::MatrixXd cholesky_lower() const {
    if (!dense_) {
      const int v = dim();
      Eigen::MatrixXd l = Eigen::MatrixXd::Zero(v, v);
      for (int i = 0; i < v; ++i) {
        const double w = (*logdiag_)[i];
        if (std::abs(w) > 300.0) {
          throw ill_conditioned_error("HermitianNorm: log-diagonal entries too large to factor");
        }
        l(i, i) = std::exp(w);
      }
      return l;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(*dense_);
    if (llt.info() != Eigen::Success) {
      throw ill_conditioned_error("HermitianNorm: Cholesky factorization failed");
    }
    return llt.matrixL();
  }

  double norm(const Eigen::VectorXd& x) const {
    detail::check_dim_match(static_cast<int>(x.size()), dim(), "HermitianNorm::norm");
    if (logdiag_) {
      // sqrt(sum e^{2 w_j} x_j^2), factored so huge weights cannot overflow.
      double m = -kInf;
      for (int i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) m = std::max(m, (*logdiag_)[i] + std::log(std::abs(x[i])));
      }
      if (m == -kInf) return 0.0;
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) s += std::exp(2.0 * ((*logdiag_)[i] + std::log(std::abs(x[i])) - m));
      }
      return std::exp(m) * std::sqrt(s);
    }
    return std::sqrt(x.dot(*dense_ * x));
  }

  double log_det_gram() const {
    if (logdiag_) {
      double s = 0.0;
      for (double w : *logdiag_) s += 2.0 * w;
      return s;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(*dense_);
    if (llt.info() != Eigen::Success) {
      throw ill_conditioned_error("HermitianNorm: Cholesky factorization failed");
    }
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += std::log(llt.matrixLLT()(i, i));
    return 2.0 * s;
  }

private:
  struct private_tag {};
  HermitianNorm(std::vector<double> w, private_tag) : logdiag_(std::move(w)) {}

  std::optional<Eigen::MatrixXd> dense_;
  std::optional<std::vector<double>> logdiag_;
};

// A weighted sup norm: ||x|| = max_j e^{w_j} |x_j| over labeled axes.
// Labels are sorted lexicographically on construction; all pairwise
// operations require identical label sets.
class DiagonalSupNorm {
public:
  DiagonalSupNorm(std::vector<Label> labels, std::vector<double> log_weights) {
    if (labels.empty() || labels.size() != log_weights.size()) {
      throw validation_error("DiagonalSupNorm: labels and weights must be nonempty and equal length");
    }
    for (double w : log_weights) {
      if (!std::isfinite(w)) throw validation_error("DiagonalSupNorm: nonfinite log weight");
    }
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
    labels_.reserve(order.size());
    logw_.reserve(order.size());
    for (std::size_t i : order) {
      if (!labels_.empty() && labels_.back() == labels[i]) {
        throw validation_error("DiagonalSupNorm: duplicate label " + label_to_string(labels[i]));
      }
      labels_.push_back(labels[i]);
      logw_.push_back(log_weights[i]);
    }
  }

  int dim() const { return static_cast<int>(labels_.size()); }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<double>& log_weights() const { return logw_; }

  double norm(const Eigen::VectorXd& x) const {
    detail::check_dim_match(static_cast<int>(x.size()), dim(), "DiagonalSupNorm::norm");
    double m = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      if (x[i] != 0.0) m = std::max(m, std::exp(logw_[i] + std::log(std::abs(x[i]))));
    }
    return m;
  }

  void check_same_labels(const DiagonalSupNorm& other, const char* who) const {
    detail::check_dim_match(dim(), other.dim(), who);
    if (labels_ != other.labels_) {
      throw validation_error(std::string(who) + ": label sets differ");
    }
  }

private:
  std::vector<Label> labels_;
  std::vector<double> logw_;
};

namespace detail {

// Log-eigenvalues (1/2) log mu_j of the pencil (G1, G0), descending.
// Whitened form: G0 = L L^T, Atil = L^{-1} G1 L^{-T}, eigenvalues of Atil
// are the generalized eigenvalues mu_j.
inline std::vector<double> dense_pair_spectrum(const Eigen::MatrixXd& g0,
                                               const Eigen::MatrixXd& g1) {
  Eigen::LLT<Eigen::MatrixXd> llt(g0);
  if (llt.info() != Eigen::Success) {
    throw ill_conditioned_error("pair spectrum: base gram Cholesky failed");
  }
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd w = l.triangularView<Eigen::Lower>().solve(g1);
  Eigen::MatrixXd atil =
      l.triangularView<Eigen::Lower>().solve(w.transpose()).transpose();
  atil = ((atil + atil.transpose()) * 0.5).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(atil, Eigen::EigenvaluesOnly);
  std::vector<double> lam(es.eigenvalues().size());
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double mu = es.eigenvalues()[i];
    if (mu <= 0.0) throw ill_conditioned_error("pair spectrum: nonpositive generalized eigenvalue");
    lam[i] = 0.5 * std::log(mu);
  }
  std::stable_sort(lam.begin(), lam.end(), std::greater<double>());
  return lam;
}

// Whitening data for geodesic/rooftop: columns of (L Q) form the basis in
// which both grams are diagonal (I and D).
struct PairEigenbasis {
  Eigen::MatrixXd lq;       // L * Q
  Eigen::VectorXd mu;       // generalized eigenvalues, ascending
};

inline PairEigenbasis dense_pair_eigenbasis(const Eigen::MatrixXd& g0,
                                            const Eigen::MatrixXd& g1) {
  Eigen::LLT<Eigen::MatrixXd> llt(g0);
  if (llt.info() != Eigen::Success) {
    throw ill_conditioned_error("pair eigenbasis: base gram Cholesky failed");
  }
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd w = l.triangularView<Eigen::Lower>().solve(g1);
  Eigen::MatrixXd atil =
      l.triangularView<Eigen::Lower>().solve(w.transpose()).transpose();
  atil = ((atil + atil.transpose()) * 0.5).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(atil);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw ill_conditioned_error("pair eigenbasis: nonpositive generalized eigenvalue");
  }
  return PairEigenbasis{l * es.eigenvectors(), es.eigenvalues()};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Pure-pair operations (exact).

inline LogRelativeSpectrum log_relative_spectrum(const HermitianNorm& n0,
                                                 const HermitianNorm& n1) {
  detail::check_dim_match(n0.dim(), n1.dim(), "log_relative_spectrum");
  if (n0.is_log_diagonal() && n1.is_log_diagonal()) {
    std::vector<double> lam(n0.dim());
    for (int i = 0; i < n0.dim(); ++i) {
      lam[i] = n1.log_diagonal()[i] - n0.log_diagonal()[i];
    }
    std::stable_sort(lam.begin(), lam.end(), std::greater<double>());
    return LogRelativeSpectrum{std::move(lam)};
  }
  return LogRelativeSpectrum{detail::dense_pair_spectrum(n0.gram(), n1.gram())};
}

inline LogRelativeSpectrum log_relative_spectrum(const DiagonalSupNorm& n0,
                                                 const DiagonalSupNorm& n1) {
  n0.check_same_labels(n1, "log_relative_spectrum");
  std::vector<double> lam(n0.dim());
  for (int i = 0; i < n0.dim(); ++i) {
    lam[i] = n1.log_weights()[i] - n0.log_weights()[i];
  }
  std::stable_sort(lam.begin(), lam.end(), std::greater<double>());
  return LogRelativeSpectrum{std::move(lam)};
}

// Transfer map G0^{-1} G1: the positive G0-self-adjoint map whose
// eigenvalues e^{2 lambda_j} carry the relative spectrum.
inline Eigen::MatrixXd transfer_map(const HermitianNorm& n0, const HermitianNorm& n1) {
  detail::check_dim_match(n0.dim(), n1.dim(), "transfer_map");
  if (n0.is_log_diagonal() && n1.is_log_diagonal()) {
    const int v = n0.dim();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(v, v);
    for (int i = 0; i < v; ++i) {
      const double e = 2.0 * (n1.log_diagonal()[i] - n0.log_diagonal()[i]);
      if (std::abs(e) > 600.0) {
        throw ill_conditioned_error("transfer_map: relative weights too large to materialize");
      }
      a(i, i) = std::exp(e);
    }
    return a;
  }
  Eigen::MatrixXd g0 = n0.gram();
  Eigen::LLT<Eigen::MatrixXd> llt(g0);
  if (llt.info() != Eigen::Success) {
    throw ill_conditioned_error("transfer_map: base gram Cholesky failed");
  }
  return llt.solve(n1.gram());
}

inline double dp_from_spectrum(const LogRelativeSpectrum& s, double p) {
  if (p < 1.0) throw validation_error("dp distance: p must be >= 1 (or inf)");
  return power_mean_abs(s.lambda, p);
}

inline double dp_distance(const HermitianNorm& n0, const HermitianNorm& n1, double p) {
  return dp_from_spectrum(log_relative_spectrum(n0, n1), p);
}

inline double dp_distance(const DiagonalSupNorm& n0, const DiagonalSupNorm& n1, double p) {
  return dp_from_spectrum(log_relative_spectrum(n0, n1), p);
}

// log( vol(unit ball of n0) / vol(unit ball of n1) ); for Hermitian norms
// this is (1/2)(log det G1 - log det G0), and d_1 = ratio / dim for ordered
// pairs.
inline double log_volume_ratio(const HermitianNorm& n0, const HermitianNorm& n1) {
  detail::check_dim_match(n0.dim(), n1.dim(), "log_volume_ratio");
  return 0.5 * (n1.log_det_gram() - n0.log_det_gram());
}

inline double log_volume_ratio(const DiagonalSupNorm& n0, const DiagonalSupNorm& n1) {
  n0.check_same_labels(n1, "log_volume_ratio");
  double s = 0.0;
  for (int i = 0; i < n0.dim(); ++i) s += n1.log_weights()[i] - n0.log_weights()[i];
  return s;
}

// Point t on the geodesic from n0 to n1: gram_t = L Atil^t L^T. Endpoints
// reproduce the inputs exactly; t outside [0,1] is rejected.
inline HermitianNorm geodesic(const HermitianNorm& n0, const HermitianNorm& n1, double t) {
  detail::check_dim_match(n0.dim(), n1.dim(), "geodesic");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw validation_error("geodesic: t must lie in [0,1], got " + format_double(t));
  }
  if (n0.is_log_diagonal() && n1.is_log_diagonal()) {
    std::vector<double> w(n0.dim());
    for (int i = 0; i < n0.dim(); ++i) {
      w[i] = (1.0 - t) * n0.log_diagonal()[i] + t * n1.log_diagonal()[i];
    }
    return HermitianNorm::from_log_diagonal(std::move(w));
  }
  if (t == 0.0) return n0;
  if (t == 1.0) return n1;
  auto eb = detail::dense_pair_eigenbasis(n0.gram(), n1.gram());
  Eigen::VectorXd d(eb.mu.size());
  for (int i = 0; i < d.size(); ++i) d[i] = std::pow(eb.mu[i], t);
  Eigen::MatrixXd g = eb.lq * d.asDiagonal() * eb.lq.transpose();
  return HermitianNorm(((g + g.transpose()) * 0.5).eval());
}

// Smallest Hermitian norm dominating both inputs among norms diagonal in
// the joint eigenbasis: eigenvalues max(1, mu_j) in the whitened frame.
// Satisfies the exact Pythagorean split
//   d_2(n0,n1)^2 = d_2(n0,roof)^2 + d_2(roof,n1)^2.
inline HermitianNorm rooftop(const HermitianNorm& n0, const HermitianNorm& n1) {
  detail::check_dim_match(n0.dim(), n1.dim(), "rooftop");
  if (n0.is_log_diagonal() && n1.is_log_diagonal()) {
    std::vector<double> w(n0.dim());
    for (int i = 0; i < n0.dim(); ++i) {
      w[i] = std::max(n0.log_diagonal()[i], n1.log_diagonal()[i]);
    }
    return HermitianNorm::from_log_diagonal(std::move(w));
  }
  auto eb = detail::dense_pair_eigenbasis(n0.gram(), n1.gram());
  Eigen::VectorXd d(eb.mu.size());
  for (int i = 0; i < d.size(); ++i) d[i] = std::max(1.0, eb.mu[i]);
  Eigen::MatrixXd g = eb.lq * d.asDiagonal() * eb.lq.transpose();
  return HermitianNorm(((g + g.transpose()) * 0.5).eval());
}

// ---------------------------------------------------------------------------
// General norm handles.

class NormHandle;

// Pointwise maximum of two norms on the same space.
struct MaxCombination {
  std::shared_ptr<const NormHandle> a;
  std::shared_ptr<const NormHandle> b;
};

// A norm evaluated through a linear embedding: ||y|| = ||basis * y||_base.
// This is what restricting a sup norm to a non-axis subspace produces.
struct RestrictedNorm {
  std::shared_ptr<const NormHandle> base;
  Eigen::MatrixXd basis;    // (base dim) x (subspace dim), full column rank
};

// Hermitian surrogate h with certified d_inf(n, h) <= uncertainty.
struct JohnSurrogate {
  HermitianNorm h;
  double uncertainty = 0.0;
};

class NormHandle {
public:
  using Alt = std::variant<HermitianNorm, DiagonalSupNorm, MaxCombination, RestrictedNorm>;

  NormHandle(HermitianNorm n) : alt_(std::move(n)) {}
  NormHandle(DiagonalSupNorm n) : alt_(std::move(n)) {}
  NormHandle(MaxCombination n) : alt_(std::move(n)) {}
  NormHandle(RestrictedNorm n) : alt_(std::move(n)) {}

  const Alt& alt() const { return alt_; }
  bool is_hermitian() const { return std::holds_alternative<HermitianNorm>(alt_); }
  bool is_diagonal_sup() const { return std::holds_alternative<DiagonalSupNorm>(alt_); }

  const HermitianNorm& hermitian() const { return std::get<HermitianNorm>(alt_); }
  const DiagonalSupNorm& diagonal_sup() const { return std::get<DiagonalSupNorm>(alt_); }

  int dim() const {
    return std::visit(
        [](const auto& n) -> int {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, HermitianNorm> || std::is_same_v<T, DiagonalSupNorm>) {
            return n.dim();
          } else if constexpr (std::is_same_v<T, MaxCombination>) {
            return n.a->dim();
          } else {
            return static_cast<int>(n.basis.cols());
          }
        },
        alt_);
  }

  double norm(const Eigen::VectorXd& x) const {
    return std::visit(
        [&](const auto& n) -> double {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, HermitianNorm> || std::is_same_v<T, DiagonalSupNorm>) {
            return n.norm(x);
          } else if constexpr (std::is_same_v<T, MaxCombination>) {
            return std::max(n.a->norm(x), n.b->norm(x));
          } else {
            return n.base->norm(n.basis * x);
          }
        },
        alt_);
  }

private:
  Alt alt_;
};

inline NormHandle max_norm(NormHandle a, NormHandle b) {
  detail::check_dim_match(a.dim(), b.dim(), "max_norm");
  return NormHandle(MaxCombination{std::make_shared<NormHandle>(std::move(a)),
                                   std::make_shared<NormHandle>(std::move(b))});
}

// Hermitian surrogate with a certified two-sided bound.
//   Hermitian: itself, uncertainty 0.
//   DiagonalSup: the same-log-weights Hermitian H satisfies N <= H <= sqrt(v) N
//     (sampled and asserted in the tests; the evaluation at a standard basis
//     vector gives equality on the left, the all-ones vector saturates the
//     right). Recentering by v^{-1/4} balances the bound to (1/4) log v.
//   Max: the rooftop of the operand surrogates, recentred by 2^{-1/4}; the
//     rooftop sits within [max, sqrt(2) max] of the operand surrogates.
//   Restricted: the restriction of the base surrogate (d_inf only shrinks
//     on a subspace).
inline JohnSurrogate john_ellipsoid(const NormHandle& n);

namespace detail {

inline HermitianNorm restrict_hermitian(const HermitianNorm& n, const Eigen::MatrixXd& basis) {
  if (n.is_log_diagonal()) {
    // Axis-aligned selection keeps the exact log-space form.
    bool axis = true;
    std::vector<double> w;
    for (int j = 0; j < basis.cols() && axis; ++j) {
      int nz = -1;
      for (int i = 0; i < basis.rows(); ++i) {
        if (basis(i, j) != 0.0) {
          if (nz >= 0 || std::abs(basis(i, j)) != 1.0) {
            axis = false;
            break;
          }
          nz = i;
        }
      }
      if (axis && nz >= 0) w.push_back(n.log_diagonal()[nz]);
      if (nz < 0) axis = false;
    }
    if (axis) return HermitianNorm::from_log_diagonal(std::move(w));
  }
  Eigen::MatrixXd g = basis.transpose() * n.gram() * basis;
  return HermitianNorm(((g + g.transpose()) * 0.5).eval());
}

inline void check_basis(const Eigen::MatrixXd& basis, int ambient_dim) {
  if (basis.rows() != ambient_dim || basis.cols() < 1 || basis.cols() > basis.rows()) {
    throw validation_error("restrict: basis must be (ambient dim) x e with 1 <= e <= dim");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  if (qr.rank() < basis.cols()) {
    throw validation_error("restrict: basis columns are not linearly independent");
  }
}

} // namespace detail

// Restriction of a norm to the column span of `basis`, expressed in the
// basis coordinates.
inline NormHandle restrict_norm(const NormHandle& n, const Eigen::MatrixXd& basis) {
  detail::check_basis(basis, n.dim());
  return std::visit(
      [&](const auto& alt) -> NormHandle {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, HermitianNorm>) {
          return NormHandle(detail::restrict_hermitian(alt, basis));
        } else if constexpr (std::is_same_v<T, DiagonalSupNorm>) {
          // Axis-aligned selection stays a sup norm on the surviving labels.
          std::vector<Label> labels;
          std::vector<double> w;
          bool axis = true;
          for (int j = 0; j < basis.cols() && axis; ++j) {
            int nz = -1;
            for (int i = 0; i < basis.rows(); ++i) {
              if (basis(i, j) != 0.0) {
                if (nz >= 0 || std::abs(basis(i, j)) != 1.0) {
                  axis = false;
                  break;
                }
                nz = i;
              }
            }
            if (nz < 0) axis = false;
            if (axis) {
              labels.push_back(alt.labels()[nz]);
              w.push_back(alt.log_weights()[nz]);
            }
          }
          if (axis) return NormHandle(DiagonalSupNorm(std::move(labels), std::move(w)));
          return NormHandle(RestrictedNorm{std::make_shared<NormHandle>(alt), basis});
        } else if constexpr (std::is_same_v<T, MaxCombination>) {
          return max_norm(restrict_norm(*alt.a, basis), restrict_norm(*alt.b, basis));
        } else {
          return NormHandle(RestrictedNorm{alt.base, (alt.basis * basis).eval()});
        }
      },
      n.alt());
}

inline JohnSurrogate john_ellipsoid(const NormHandle& n) {
  return std::visit(
      [&](const auto& alt) -> JohnSurrogate {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, HermitianNorm>) {
          return JohnSurrogate{alt, 0.0};
        } else if constexpr (std::is_same_v<T, DiagonalSupNorm>) {
          const double v = static_cast<double>(alt.dim());
          std::vector<double> w(alt.log_weights());
          const double shift = 0.25 * std::log(v);
          for (double& x : w) x -= shift;
          return JohnSurrogate{HermitianNorm::from_log_diagonal(std::move(w)), shift};
        } else if constexpr (std::is_same_v<T, MaxCombination>) {
          JohnSurrogate ja = john_ellipsoid(*alt.a);
          JohnSurrogate jb = john_ellipsoid(*alt.b);
          HermitianNorm roof = rooftop(ja.h, jb.h);
          const double quarter_log2 = 0.25 * std::log(2.0);
          HermitianNorm centred = [&]() {
            if (roof.is_log_diagonal()) {
              std::vector<double> w(roof.log_diagonal());
              for (double& x : w) x -= quarter_log2;
              return HermitianNorm::from_log_diagonal(std::move(w));
            }
            return HermitianNorm((roof.gram() * std::exp(-2.0 * quarter_log2)).eval());
          }();
          return JohnSurrogate{std::move(centred),
                               std::max(ja.uncertainty, jb.uncertainty) + quarter_log2};
        } else {
          JohnSurrogate jb = john_ellipsoid(*alt.base);
          return JohnSurrogate{detail::restrict_hermitian(jb.h, alt.basis), jb.uncertainty};
        }
      },
      n.alt());
}

// d_p between arbitrary norms. Pure Hermitian or same-label sup pairs are
// exact; anything else goes through the John surrogates and reports the
// accumulated two-sided bound (|d_p(N0,N1) - d_p(H0,H1)| <= u0 + u1, by one
// perturbation step per side).
inline DpResult dp_distance(const NormHandle& n0, const NormHandle& n1, double p) {
  detail::check_dim_match(n0.dim(), n1.dim(), "dp_distance");
  if (n0.is_hermitian() && n1.is_hermitian()) {
    return DpResult{dp_distance(n0.hermitian(), n1.hermitian(), p), 0.0};
  }
  if (n0.is_diagonal_sup() && n1.is_diagonal_sup()) {
    return DpResult{dp_distance(n0.diagonal_sup(), n1.diagonal_sup(), p), 0.0};
  }
  JohnSurrogate j0 = john_ellipsoid(n0);
  JohnSurrogate j1 = john_ellipsoid(n1);
  return DpResult{dp_distance(j0.h, j1.h, p), j0.uncertainty + j1.uncertainty};
}

} // namespace torquant
