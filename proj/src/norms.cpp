#include "qhgeo/norms.hpp"

#include <sstream>

namespace qhgeo {

NormSpec NormSpec::p_norm(int dim, double p) {
  require(dim >= 1, "norms: dimension must be positive");
  require(p >= 1.0, "norms: p-norm exponent must lie in [1, inf]");
  if (std::isinf(p)) return sup(dim);
  NormSpec n;
  n.dim_ = dim;
  n.kind_ = NormKind::P;
  n.p_ = p;
  n.strictly_convex_ = p > 1.0;
  n.uniformly_convex_ = p > 1.0;
  return n;
}

NormSpec NormSpec::sup(int dim) {
  require(dim >= 1, "norms: dimension must be positive");
  NormSpec n;
  n.dim_ = dim;
  n.kind_ = NormKind::Sup;
  n.p_ = std::numeric_limits<double>::infinity();
  return n;
}

NormSpec NormSpec::c0_renorm(int dim) {
  require(dim >= 1, "norms: dimension must be positive");
  NormSpec n;
  n.dim_ = dim;
  n.kind_ = NormKind::C0Renorm;
  n.weights_.resize(dim);
  for (int i = 0; i < dim; ++i) n.weights_[i] = std::ldexp(1.0, -(i + 1));
  // Strictly convex; in a finite truncation also uniformly convex.
  n.strictly_convex_ = true;
  n.uniformly_convex_ = true;
  return n;
}

NormSpec NormSpec::table(Matrix rows, std::optional<Matrix> dual_rows) {
  require(rows.rows() >= 1 && rows.cols() >= 1, "norms: empty norm table");
  Eigen::FullPivLU<Matrix> lu(rows);
  require(lu.rank() == rows.cols(), "norms: table rows must span R^n to define a norm");
  if (dual_rows) require(dual_rows->cols() == rows.cols(), "norms: dual table has wrong width");
  NormSpec n;
  n.dim_ = static_cast<int>(rows.cols());
  n.kind_ = NormKind::Table;
  n.rows_ = std::move(rows);
  n.dual_rows_ = std::move(dual_rows);
  return n;
}

bool NormSpec::has_exact_dual() const {
  switch (kind_) {
    case NormKind::P:
    case NormKind::Sup:
      return true;
    case NormKind::C0Renorm:
      return false;
    case NormKind::Table:
      return dual_rows_.has_value();
  }
  return false;
}

std::string NormSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case NormKind::P:
      os << "p-norm(p=" << p_ << ", dim=" << dim_ << ")";
      break;
    case NormKind::Sup:
      os << "sup-norm(dim=" << dim_ << ")";
      break;
    case NormKind::C0Renorm:
      os << "c0-renorm(dim=" << dim_ << ")";
      break;
    case NormKind::Table:
      os << "table-norm(rows=" << rows_.rows() << ", dim=" << dim_ << ")";
      break;
  }
  return os.str();
}

bool NormSpec::operator==(const NormSpec& other) const {
  if (dim_ != other.dim_ || kind_ != other.kind_) return false;
  switch (kind_) {
    case NormKind::P:
      return p_ == other.p_;
    case NormKind::Sup:
    case NormKind::C0Renorm:
      return true;
    case NormKind::Table:
      return rows_ == other.rows_ && dual_rows_.has_value() == other.dual_rows_.has_value() &&
             (!dual_rows_ || *dual_rows_ == *other.dual_rows_);
  }
  return false;
}

namespace {

// Upper estimate of the dual of |||.|||. For a fixed multiplier lam the split
// g_n = sign(f_n) max(0, |f_n| - lam w_n) is optimal; the self-consistent lam
// (lam = ||g||_1) is found by bisection. Any lam yields a valid upper bound.
double c0_renorm_dual(const Vector& w, const Eigen::Ref<const Vector>& f) {
  const Vector a = f.cwiseAbs();
  auto excess = [&](double lam) { return (a - lam * w).cwiseMax(0.0).sum() - lam; };
  double lo = 0.0, hi = a.sum();
  if (hi == 0.0) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  const double lam = 0.5 * (lo + hi);
  const Vector g = (a - lam * w).cwiseMax(0.0);
  const Vector h = a - g;
  const double g1 = g.sum();
  const double h2 = (h.array().square() / w.array()).sum();
  return std::sqrt(g1 * g1 + h2);
}

}  // namespace

DualNorm dual_evaluate(const NormSpec& norm, const Eigen::Ref<const Vector>& f) {
  if (f.size() != norm.dimension())
    throw InputError("norms::dual_evaluate: covector length does not match the norm dimension");
  switch (norm.kind()) {
    case NormKind::P: {
      const double p = norm.exponent();
      if (p == 1.0) return {f.lpNorm<Eigen::Infinity>(), false};
      const double q = p / (p - 1.0);
      return {detail::p_norm_value(f, q), false};
    }
    case NormKind::Sup:
      return {f.lpNorm<1>(), false};
    case NormKind::C0Renorm:
      return {c0_renorm_dual(norm.renorm_weights(), f), true};
    case NormKind::Table:
      if (!norm.dual_table_rows())
        throw UnsupportedError("norms::dual_evaluate: table norm has no dual table");
      return {(*norm.dual_table_rows() * f).lpNorm<Eigen::Infinity>(), false};
  }
  throw UnsupportedError("norms::dual_evaluate: unknown norm kind");
}

}  // namespace qhgeo
