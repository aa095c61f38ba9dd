#pragma once

#include <Eigen/Core>

namespace gkcp {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Time-ordered multivariate observations, one row per time point.
/// Requires at least four rows (the null moments divide by n-3) and finite
/// entries.
class Sequence {
 public:
  explicit Sequence(RowMatrix values);

  Index n() const noexcept { return values_.rows(); }
  Index d() const noexcept { return values_.cols(); }
  const RowMatrix& values() const noexcept { return values_; }

  /// Rows [begin, end).
  Sequence slice(Index begin, Index end) const;

 private:
  RowMatrix values_;
};

}  // namespace gkcp
