#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bmms/errors.hpp"

namespace bmms {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class CoarsenMode { Sum, Average };

struct ResolutionGrid {
  Index level = 1;
  Index size = 1;
};

// Column-aggregation operator between two resolutions, stored in sparse
// assignment form: every fine column maps to exactly one coarse group with
// one weight, i.e. a matrix with a single nonzero per row. Right-multiplying
// a design by the dense form merges column groups.
class CoarseningOperator {
 public:
  CoarseningOperator(Index fine_size, Index coarse_size,
                     std::vector<Index> group_of, std::vector<double> weight)
      : rows_(fine_size),
        cols_(coarse_size),
        group_of_(std::move(group_of)),
        weight_(std::move(weight)) {
    if (rows_ < 1 || cols_ < 1 || cols_ > rows_) {
      throw InvalidDimension("coarsening operator: need 1 <= coarse <= fine");
    }
    if (static_cast<Index>(group_of_.size()) != rows_ ||
        static_cast<Index>(weight_.size()) != rows_) {
      throw InvalidDimension("coarsening operator: assignment size mismatch");
    }
    group_size_.assign(static_cast<std::size_t>(cols_), 0);
    for (Index g : group_of_) {
      if (g < 0 || g >= cols_) {
        throw InvalidDimension("coarsening operator: group index out of range");
      }
      ++group_size_[static_cast<std::size_t>(g)];
    }
    for (Index s : group_size_) {
      if (s == 0) throw InvalidPartition("coarsening operator: empty group");
    }
  }

  static CoarseningOperator from_groups(Index fine_size, Index coarse_size,
                                        std::vector<Index> group_of,
                                        CoarsenMode mode) {
    std::vector<Index> counts(static_cast<std::size_t>(coarse_size), 0);
    for (Index g : group_of) {
      if (g >= 0 && g < coarse_size) ++counts[static_cast<std::size_t>(g)];
    }
    std::vector<double> w(group_of.size(), 1.0);
    if (mode == CoarsenMode::Average) {
      for (std::size_t i = 0; i < group_of.size(); ++i) {
        const Index c = counts[static_cast<std::size_t>(group_of[i])];
        w[i] = c > 0 ? 1.0 / static_cast<double>(c) : 1.0;
      }
    }
    return CoarseningOperator(fine_size, coarse_size, std::move(group_of),
                              std::move(w));
  }

  static CoarseningOperator identity(Index p) {
    std::vector<Index> g(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) g[static_cast<std::size_t>(i)] = i;
    return from_groups(p, p, std::move(g), CoarsenMode::Sum);
  }

  Index rows() const { return rows_; }  // fine size
  Index cols() const { return cols_; }  // coarse size
  Index group(Index fine_col) const {
    return group_of_[static_cast<std::size_t>(fine_col)];
  }
  double weight(Index fine_col) const {
    return weight_[static_cast<std::size_t>(fine_col)];
  }
  Index group_size(Index g) const {
    return group_size_[static_cast<std::size_t>(g)];
  }

  bool is_identity() const {
    if (rows_ != cols_) return false;
    for (Index i = 0; i < rows_; ++i) {
      if (group(i) != i || weight(i) != 1.0) return false;
    }
    return true;
  }

  template <typename Scalar = double>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows_,
                                                                    cols_);
    for (Index i = 0; i < rows_; ++i) {
      m(i, group(i)) = static_cast<Scalar>(weight(i));
    }
    return m;
  }

  friend bool operator==(const CoarseningOperator& a,
                         const CoarseningOperator& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.group_of_ == b.group_of_ && a.weight_ == b.weight_;
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<Index> group_of_;
  std::vector<double> weight_;
  std::vector<Index> group_size_;
};

// Contiguous near-equal blocks; block sizes differ by at most one and the
// larger blocks come first.
inline CoarseningOperator build_dyadic_operator(
    Index fine_size, Index coarse_size, CoarsenMode mode = CoarsenMode::Sum) {
  if (coarse_size < 1 || coarse_size > fine_size) {
    throw InvalidDimension("build_dyadic_operator: need 1 <= coarse <= fine");
  }
  const Index base = fine_size / coarse_size;
  const Index rem = fine_size % coarse_size;
  std::vector<Index> group_of(static_cast<std::size_t>(fine_size));
  Index col = 0;
  for (Index g = 0; g < coarse_size; ++g) {
    const Index block = base + (g < rem ? 1 : 0);
    for (Index k = 0; k < block; ++k) {
      group_of[static_cast<std::size_t>(col++)] = g;
    }
  }
  return CoarseningOperator::from_groups(fine_size, coarse_size,
                                         std::move(group_of), mode);
}

// Matrix product of two operators: `fine_to_mid` maps resolution a -> b and
// `mid_to_coarse` maps b -> c; the result maps a -> c and equals
// dense(fine_to_mid) * dense(mid_to_coarse) entry for entry.
inline CoarseningOperator compose(const CoarseningOperator& fine_to_mid,
                                  const CoarseningOperator& mid_to_coarse) {
  if (fine_to_mid.cols() != mid_to_coarse.rows()) {
    throw InvalidDimension("compose: operator sizes do not chain");
  }
  std::vector<Index> group_of(static_cast<std::size_t>(fine_to_mid.rows()));
  std::vector<double> weight(static_cast<std::size_t>(fine_to_mid.rows()));
  for (Index i = 0; i < fine_to_mid.rows(); ++i) {
    const Index mid = fine_to_mid.group(i);
    group_of[static_cast<std::size_t>(i)] = mid_to_coarse.group(mid);
    weight[static_cast<std::size_t>(i)] =
        fine_to_mid.weight(i) * mid_to_coarse.weight(mid);
  }
  return CoarseningOperator(fine_to_mid.rows(), mid_to_coarse.cols(),
                            std::move(group_of), std::move(weight));
}

// X (n x fine) -> X * L (n x coarse).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
downsample(const Eigen::MatrixBase<Derived>& X, const CoarseningOperator& op) {
  if (X.cols() != op.rows()) {
    throw InvalidDimension("downsample: column count does not match operator");
  }
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic,
                            Eigen::Dynamic>;
  Mat out = Mat::Zero(X.rows(), op.cols());
  for (Index i = 0; i < op.rows(); ++i) {
    out.col(op.group(i)) +=
        static_cast<typename Derived::Scalar>(op.weight(i)) * X.col(i);
  }
  return out;
}

// Coarse coefficient vector -> fine vector L * v: each coarse entry is
// replicated across its fine block scaled by the operator weight, so that
// X_fine * lift(v) == downsample(X_fine) * v exactly.
template <typename Derived>
Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic> lift(
    const Eigen::MatrixBase<Derived>& coarse, const CoarseningOperator& op) {
  if (coarse.size() != op.cols()) {
    throw InvalidDimension("lift: vector length does not match operator");
  }
  Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic> out(op.rows());
  for (Index i = 0; i < op.rows(); ++i) {
    out(i) = static_cast<typename Derived::Scalar>(op.weight(i)) *
             coarse(op.group(i));
  }
  return out;
}

struct ScaleContribution {
  Index level = 1;
  VectorXd theta;
};

// Finest-scale design plus the ordered operator chain [L_1, ..., L_{K-1}],
// with every intermediate design cached. Immutable after construction.
class MultiscaleDesign {
 public:
  MultiscaleDesign(MatrixXd finest, std::vector<CoarseningOperator> ops)
      : ops_(std::move(ops)) {
    const Index levels = static_cast<Index>(ops_.size()) + 1;
    designs_.resize(static_cast<std::size_t>(levels));
    designs_[static_cast<std::size_t>(levels - 1)] = std::move(finest);
    for (Index j = levels - 1; j >= 1; --j) {
      const auto& op = ops_[static_cast<std::size_t>(j - 1)];
      const auto& fine = designs_[static_cast<std::size_t>(j)];
      if (fine.cols() != op.rows()) {
        throw InvalidDimension("multiscale design: operator chain mismatch");
      }
      designs_[static_cast<std::size_t>(j - 1)] = downsample(fine, op);
    }
  }

  explicit MultiscaleDesign(MatrixXd single_scale)
      : MultiscaleDesign(std::move(single_scale), {}) {}

  Index levels() const { return static_cast<Index>(designs_.size()); }
  Index n() const { return designs_.front().rows(); }
  Index p(Index level) const { return design(level).cols(); }

  // X_j, 1-based level.
  const MatrixXd& design(Index level) const {
    check_level(level);
    return designs_[static_cast<std::size_t>(level - 1)];
  }

  // L_j mapping level j+1 to level j, for j in 1..K-1.
  const CoarseningOperator& op(Index level) const {
    if (level < 1 || level > static_cast<Index>(ops_.size())) {
      throw InvalidDimension("multiscale design: no operator at this level");
    }
    return ops_[static_cast<std::size_t>(level - 1)];
  }

  // Composite operator mapping the finest level K down to `level`.
  CoarseningOperator composite(Index level) const {
    check_level(level);
    const Index K = levels();
    CoarseningOperator acc = CoarseningOperator::identity(p(K));
    for (Index h = K - 1; h >= level; --h) acc = compose(acc, op(h));
    return acc;
  }

  // Lift a level-j contribution up to the finest resolution.
  VectorXd lift_to_finest(const VectorXd& theta, Index level) const {
    check_level(level);
    VectorXd v = theta;
    for (Index h = level; h <= levels() - 1; ++h) v = lift(v, op(h));
    return v;
  }

 private:
  void check_level(Index level) const {
    if (level < 1 || level > levels()) {
      throw InvalidDimension("multiscale design: level out of range");
    }
  }

  std::vector<MatrixXd> designs_;
  std::vector<CoarseningOperator> ops_;
};

// Accumulate contributions for levels 1..up_to into a level-`up_to`
// coefficient vector: theta_up_to + L_{up_to-1}(theta_{up_to-1} + ...).
inline VectorXd accumulate(const std::vector<ScaleContribution>& contributions,
                           const MultiscaleDesign& design, Index up_to) {
  if (up_to < 1 || up_to > design.levels()) {
    throw InvalidDimension("accumulate: level out of range");
  }
  std::vector<const VectorXd*> theta(static_cast<std::size_t>(up_to), nullptr);
  for (const auto& c : contributions) {
    if (c.level >= 1 && c.level <= up_to) {
      theta[static_cast<std::size_t>(c.level - 1)] = &c.theta;
    }
  }
  for (Index j = 1; j <= up_to; ++j) {
    if (theta[static_cast<std::size_t>(j - 1)] == nullptr) {
      throw IncompleteChain("accumulate: missing contribution for level " +
                            std::to_string(j));
    }
    if (theta[static_cast<std::size_t>(j - 1)]->size() != design.p(j)) {
      throw InvalidDimension("accumulate: contribution length mismatch");
    }
  }
  VectorXd acc = *theta[0];
  for (Index j = 2; j <= up_to; ++j) {
    acc = lift(acc, design.op(j - 1)) + *theta[static_cast<std::size_t>(j - 1)];
  }
  return acc;
}

}  // namespace bmms
