#pragma once

#include "qhgeo/core.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace qhgeo {

enum class NormKind { P, Sup, C0Renorm, Table };

// A norm on R^n. Immutable after construction; cheap to copy for the
// closed-form kinds.
//
// C0Renorm is the strictly convex renorming of c0 truncated to `dim`
// coordinates:  |||x|||^2 = ||x||_inf^2 + sum_{n=1..dim} 2^{-n} x_n^2.
//
// Table is a polyhedral gauge ||x|| = max_i |a_i . x| built from the rows of
// a matrix; the rows must span R^n. It exists for tests and may carry its own
// dual table (max_j |b_j . f|).
class NormSpec {
 public:
  static NormSpec p_norm(int dim, double p);
  static NormSpec sup(int dim);
  static NormSpec c0_renorm(int dim);
  static NormSpec table(Matrix rows, std::optional<Matrix> dual_rows = std::nullopt);

  int dimension() const { return dim_; }
  NormKind kind() const { return kind_; }
  /// Exponent of a P norm (infinity for the sup norm).
  double exponent() const { return p_; }
  bool strictly_convex() const { return strictly_convex_; }
  bool uniformly_convex() const { return uniformly_convex_; }
  bool has_exact_dual() const;

  const Matrix& table_rows() const { return rows_; }
  const std::optional<Matrix>& dual_table_rows() const { return dual_rows_; }
  const Vector& renorm_weights() const { return weights_; }

  std::string describe() const;

  bool operator==(const NormSpec& other) const;

 private:
  NormSpec() = default;

  int dim_ = 0;
  NormKind kind_ = NormKind::P;
  double p_ = 2.0;
  bool strictly_convex_ = false;
  bool uniformly_convex_ = false;
  Matrix rows_;
  std::optional<Matrix> dual_rows_;
  Vector weights_;
};

namespace detail {

template <typename Derived>
double p_norm_value(const Eigen::MatrixBase<Derived>& x, double p) {
  if (p == 1.0) return x.template lpNorm<1>();
  if (p == 2.0) return x.norm();
  if (std::isinf(p)) return x.template lpNorm<Eigen::Infinity>();
  const double scale = x.template lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x[i]) / scale, p);
  return scale * std::pow(sum, 1.0 / p);
}

}  // namespace detail

/// ||x|| under `norm`. Accepts any Eigen vector expression.
template <typename Derived>
double evaluate(const NormSpec& norm, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != norm.dimension())
    throw InputError("norms::evaluate: vector of length " + std::to_string(x.size()) +
                     " for a norm of dimension " + std::to_string(norm.dimension()));
  switch (norm.kind()) {
    case NormKind::P:
      return detail::p_norm_value(x, norm.exponent());
    case NormKind::Sup:
      return x.template lpNorm<Eigen::Infinity>();
    case NormKind::C0Renorm: {
      const double s = x.template lpNorm<Eigen::Infinity>();
      const double q = (x.array().square() * norm.renorm_weights().array()).sum();
      return std::sqrt(s * s + q);
    }
    case NormKind::Table:
      return (norm.table_rows() * x).template lpNorm<Eigen::Infinity>();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct DualNorm {
  double value = 0.0;
  /// True when `value` is a numerical upper estimate rather than exact.
  bool approximate = false;
};

/// ||f||_* = sup{ f.x : ||x|| <= 1 }.
///
/// Exact for P, Sup and Table-with-dual norms. For the c0 renorming the dual
/// is not closed form; the returned value is an upper estimate obtained from
/// the splitting f = g + h with ||f||_* <= sqrt(||g||_1^2 + sum_n 2^n h_n^2),
/// optimized over g, and is flagged approximate.
DualNorm dual_evaluate(const NormSpec& norm, const Eigen::Ref<const Vector>& f);

}  // namespace qhgeo
