#pragma once

#include <Eigen/Core>

#include "gkcp/sequence.hpp"

namespace gkcp {

/// Median of the n(n-1)/2 pairwise Euclidean distances between rows. Zero
/// distances take part in the median; only a zero median is an error.
double median_heuristic(const RowMatrix& rows);
double median_heuristic(const Sequence& seq);

/// Sums over the centered kernel that the exact permutation moments are built
/// from. With k~_ij = k_ij - kbar (i != j) the centered kernel splits into a
/// row part and a doubly-centered remainder,
///
///   k~_ij = h_i + h_j + e_ij,   h_i = k~_i. / (n-2),   sum_j e_ij = 0,
///
/// so that within-group sums decompose into a linear permutation statistic
/// in h plus a degenerate quadratic one in e, and the two are uncorrelated.
struct CenteredAggregates {
  double m2 = 0.0;   ///< sum_i h_i^2
  double m3 = 0.0;   ///< sum_i h_i^3
  double q = 0.0;    ///< sum_{i,j} e_ij^2
  double t3 = 0.0;   ///< sum_{i,j} e_ij^3
  double tri = 0.0;  ///< trace(e^3)
  double b1 = 0.0;   ///< sum_{i,j} h_i e_ij h_j
  double g1 = 0.0;   ///< sum_i h_i sum_j e_ij^2
  double r1 = 0.0;   ///< sum_{i != j} k~_ij^2
  double r2 = 0.0;   ///< sum_i k~_i.^2 - r1
};

/// Kernel matrix and the permutation-invariant aggregates every scan and
/// moment routine consumes. Immutable once built.
class GramSummary {
 public:
  /// Takes an arbitrary symmetric similarity matrix. The diagonal is kept
  /// but never enters an aggregate. `bandwidth` is informational (0 when the
  /// matrix did not come from a Gaussian kernel).
  static GramSummary from_kernel(Eigen::MatrixXd k, double bandwidth = 0.0);

  Index n() const noexcept { return k_.rows(); }
  const Eigen::MatrixXd& k() const noexcept { return k_; }
  double bandwidth() const noexcept { return bandwidth_; }

  double kbar() const noexcept { return kbar_; }
  double r0() const noexcept { return r0_; }
  double r1() const noexcept { return r1_; }
  double r2() const noexcept { return r2_; }
  double r3() const noexcept { return r3_; }

  /// k_i. = sum_{j != i} k_ij
  const Eigen::VectorXd& rowsum() const noexcept { return rowsum_; }
  /// k~_i. = k_i. - (n-1) kbar; sums to zero.
  const Eigen::VectorXd& ktilde_rowsum() const noexcept { return ktilde_rowsum_; }

  const CenteredAggregates& centered() const noexcept { return centered_; }

  /// Kernel restricted to rows/columns [begin, end).
  GramSummary sub(Index begin, Index end) const;

 private:
  GramSummary() = default;

  Eigen::MatrixXd k_;
  double bandwidth_ = 0.0;
  double kbar_ = 0.0;
  double r0_ = 0.0, r1_ = 0.0, r2_ = 0.0, r3_ = 0.0;
  Eigen::VectorXd rowsum_;
  Eigen::VectorXd ktilde_rowsum_;
  CenteredAggregates centered_;
};

/// Gaussian kernel k_ij = exp(-|y_i - y_j|^2 / (2 bandwidth^2)).
GramSummary build_gram(const Sequence& seq, double bandwidth);

/// Same, with the bandwidth chosen by the median heuristic.
GramSummary build_gram(const Sequence& seq);

}  // namespace gkcp
