#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gkcp/gram.hpp"
#include "gkcp/null_moments.hpp"

namespace gkcp {

/// Candidate split range [n0, n1]; the first group is positions 1..t.
struct ScanBounds {
  Index n0 = 0;
  Index n1 = 0;

  /// n0 = max(2, floor(0.05 n)), n1 = n - n0.
  static ScanBounds defaults(Index n);
  /// Throws InvalidArgument unless 2 <= n0 <= n1 <= n - 2.
  void validate(Index n) const;
};

/// r values scanned by default: 1.0 feeds GKCP, 1.2 and 0.8 the fast tests.
std::vector<double> default_r_values();

/// Per-t null quantities for one gram and bound range. Everything a scan
/// needs besides the observed sums, so permuted scans reuse it unchanged.
class ScanPlan {
 public:
  ScanPlan(const GramSummary& g, ScanBounds bounds, std::vector<double> r_values);

  const GramSummary& gram() const noexcept { return *g_; }
  const ExactNull& null() const noexcept { return null_; }
  ScanBounds bounds() const noexcept { return bounds_; }
  const std::vector<double>& r_values() const noexcept { return r_; }
  Index size() const noexcept { return bounds_.n1 - bounds_.n0 + 1; }

  /// Position of r in r_values(), or -1.
  int r_index(double r) const noexcept;

  struct Point {
    double mean_sa = 0.0, mean_sb = 0.0;
    double mean_d = 0.0, sd_d = 0.0;  ///< sd 0: D is constant under the null
    double sd_w1 = 0.0, mean_w1 = 0.0;
    // Inverse covariance of (alpha, beta) when well conditioned.
    bool invertible = false;
    double inv_aa = 0.0, inv_ab = 0.0, inv_bb = 0.0;
    bool excluded = false;  ///< both D and W_1 have zero null variance
  };
  const Point& point(Index t) const { return points_[static_cast<std::size_t>(t - bounds_.n0)]; }
  double mean_w(Index t, int ri) const { return mean_w_[idx(t, ri)]; }
  double sd_w(Index t, int ri) const { return sd_w_[idx(t, ri)]; }

  /// Null moments for group size t, for any 2 <= t <= n-2 (used by interval scans).
  Point make_point(Index t) const;

 private:
  std::size_t idx(Index t, int ri) const {
    return static_cast<std::size_t>(t - bounds_.n0) * r_.size() + static_cast<std::size_t>(ri);
  }

  const GramSummary* g_;
  ExactNull null_;
  ScanBounds bounds_;
  std::vector<double> r_;
  std::vector<Point> points_;
  std::vector<double> mean_w_, sd_w_;
};

/// Statistic values at one split, computed from the within-group sums.
struct SplitStats {
  double z_d = 0.0;
  double z_w1 = 0.0;
  double gkcp = 0.0;    ///< Mahalanobis form (falls back to gkcp_z)
  double gkcp_z = 0.0;  ///< Z_D^2 + Z_W,1^2
};

SplitStats split_stats(const ScanPlan& plan, const ScanPlan::Point& p, Index t, double sa, double sb);

struct ScanProfile {
  Index n = 0;
  ScanBounds bounds;
  std::vector<double> r_values;

  // Indexed by t - bounds.n0.
  Eigen::VectorXd alpha, beta, gamma_cross, d, z_d, gkcp, gkcp_z;
  std::vector<Eigen::VectorXd> w, z_w;  ///< one per r value
  std::vector<std::uint8_t> excluded;

  Index argmax_t = -1;
  double max_gkcp = 0.0;

  Index size() const noexcept { return bounds.n1 - bounds.n0 + 1; }
  Index t_at(Index i) const noexcept { return bounds.n0 + i; }
  /// Z_W,r profile; throws InvalidArgument if r was not scanned.
  const Eigen::VectorXd& z_w_for(double r) const;
  double max_abs_z_d() const;
  double max_z_w(double r) const;
};

/// Scan over all splits of positions in `order` (identity when empty):
/// the first group at t is {order[0], ..., order[t-1]}.
ScanProfile scan_single(const ScanPlan& plan, std::span<const Index> order = {});
ScanProfile scan_single(const GramSummary& g, ScanBounds bounds,
                        std::vector<double> r_values = default_r_values());

/// Maxima of the scan statistics without materializing a profile.
struct ScanMaxima {
  double gkcp = 0.0;
  double abs_z_d = 0.0;
  std::vector<double> z_w;  ///< per r value
  Index argmax_t = -1;
};
ScanMaxima scan_maxima(const ScanPlan& plan, std::span<const Index> order = {});

/// Changed-interval scan: the first group is (t1, t2], i.e. 0-based
/// positions t1..t2-1, with n0 <= t2 - t1 <= n1 and 0 <= t1 < t2 <= n.
struct IntervalScanProfile {
  Index n = 0;
  ScanBounds bounds;
  std::vector<double> r_values;
  /// gkcp(t1, m - n0); NaN where t1 + m > n or the split is excluded.
  Eigen::MatrixXd gkcp;
  Index argmax_t1 = -1, argmax_t2 = -1;
  double max_gkcp = 0.0;
  double max_abs_z_d = 0.0;
  Index argmax_abs_z_d_t1 = -1, argmax_abs_z_d_t2 = -1;
  std::vector<double> max_z_w;
};

IntervalScanProfile scan_interval(const ScanPlan& plan, std::span<const Index> order = {});
/// Same maxima as scan_interval but leaves the gkcp matrix empty.
IntervalScanProfile interval_maxima(const ScanPlan& plan, std::span<const Index> order = {});
IntervalScanProfile scan_interval(const GramSummary& g, ScanBounds bounds,
                                  std::vector<double> r_values = default_r_values());

/// Unbiased MMD^2 = alpha + beta - 2 gamma at every t in bounds.
Eigen::VectorXd mmd_u_scan(const GramSummary& g, ScanBounds bounds);

}  // namespace gkcp
