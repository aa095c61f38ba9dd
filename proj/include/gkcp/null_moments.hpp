#pragma once

#include "gkcp/gram.hpp"

namespace gkcp {

/// Hypergeometric pair/triple/quadruple inclusion probabilities for a split
/// of n positions into the first t and the last n-t.
struct SplitWeights {
  Index t = 0;
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;
};

SplitWeights split_weights(Index n, Index t);

/// Null moments of the split statistics at one t. Fields not filled by the
/// producing function stay zero.
struct NullMoments {
  Index t = 0;
  double r = 1.0;
  double mean_alpha = 0.0, mean_beta = 0.0;
  double var_alpha = 0.0, var_beta = 0.0, cov_ab = 0.0;
  double mean_d = 0.0, var_d = 0.0;
  double mean_wr = 0.0, var_wr = 0.0;
  double skew_d = 0.0, skew_wr = 0.0;
};

struct Skewness {
  double d = 0.0;
  double wr = 0.0;
};

struct CrossCorrelation {
  double rho_d = 0.0;
  double rho_wr = 0.0;
};

/// Means, variances and covariance of alpha(t), beta(t) straight from R0..R3.
NullMoments alpha_beta_moments(const GramSummary& g, Index t);

/// Adds the moments of D(t) = S_A - S_B and of
///   W_r(t) = [r (n-t-1) S_A + (t-1) S_B] / (n-2),
/// where S_A = t(t-1) alpha(t) and S_B = (n-t)(n-t-1) beta(t) are the
/// within-group ordered-pair sums. W_r is exactly uncorrelated with D at r = 1.
NullMoments dw_moments(const GramSummary& g, Index t, double r);

/// Standardized third central moments of D(t) and W_r(t).
Skewness third_moments(const GramSummary& g, Index t, double r);

/// Correlations of (Z_D(s), Z_D(t)) and (Z_W,r(s), Z_W,r(t)) for s < t.
CrossCorrelation cross_correlation(const GramSummary& g, Index s, Index t, double r);

/// Limiting correlation of Z_D at u < v (kernel free).
double rho_star_d(double u, double v);

/// Limiting correlation of Z_W,r at u, v, written in terms of the centered
/// sums r1 = sum k~_ij^2 and r2 = sum k~_i.^2 - r1. Only their ratio matters.
double rho_star_w(double u, double v, double r, double r1, double r2);

/// Exact permutation moments built on the centered decomposition
///   S_A - E S_A = 2(t-1) H_t + E_t,   S_B - E S_B = -2(n-t-1) H_t + E_t,
/// with H_t = sum_{i in A} h_i and E_t = sum_{i != j in A} e_ij. H and E are
/// uncorrelated for every t, so all second moments reduce to var(H), var(E)
/// and their cross-t covariances. Cheap to copy; holds no reference to the
/// gram. Aggregates at rounding-noise level are treated as exactly zero.
class ExactNull {
 public:
  explicit ExactNull(const GramSummary& g);

  Index n() const noexcept { return n_; }
  double kbar() const noexcept { return kbar_; }

  /// t^(m) / n^(m), the probability that m fixed distinct positions all land
  /// in a group of size t.
  double inclusion(double t, int m) const noexcept;

  double var_h(Index t) const noexcept;
  double var_e(Index t) const noexcept;
  double cov_h(Index s, Index t) const noexcept;  ///< s <= t
  double cov_e(Index s, Index t) const noexcept;  ///< s <= t

  double third_h(Index t) const noexcept;  ///< E[(H - EH)^3]
  double hhe(Index t) const noexcept;      ///< E[(H - EH)^2 E]
  double hee(Index t) const noexcept;      ///< E[(H - EH) E^2]
  double eee(Index t) const noexcept;      ///< E[E^3]

  /// W_r - E W_r = a H + b E
  struct WCoef {
    double a = 0.0;
    double b = 0.0;
  };
  WCoef w_coef(Index t, double r) const noexcept;

  double mean_sa(Index t) const noexcept;
  double mean_sb(Index t) const noexcept;
  double mean_d(Index t) const noexcept;
  double mean_w(Index t, double r) const noexcept;

  double var_sa(Index t) const noexcept;
  double var_sb(Index t) const noexcept;
  double cov_sab(Index t) const noexcept;
  double var_d(Index t) const noexcept;
  double var_w(Index t, double r) const noexcept;
  double cov_w(Index s, Index t, double r) const noexcept;

  double third_d(Index t) const noexcept;
  double third_w(Index t, double r) const noexcept;

  bool linear_degenerate() const noexcept { return agg_.m2 == 0.0; }
  bool quadratic_degenerate() const noexcept { return agg_.q == 0.0; }
  const CenteredAggregates& aggregates() const noexcept { return agg_; }

 private:
  Index n_ = 0;
  double kbar_ = 0.0;
  CenteredAggregates agg_;
};

}  // namespace gkcp
