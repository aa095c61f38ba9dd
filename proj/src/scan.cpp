#include "gkcp/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gkcp/error.hpp"

namespace gkcp {
namespace {

// Within-prefix ordered-pair sums sa[t] and row-sum totals ts[t] for
// t = 0..upto, where the prefix of length t is order[0..t-1].
struct PrefixSums {
  std::vector<double> sa;
  std::vector<double> ts;
};

PrefixSums prefix_sums(const GramSummary& g, std::span<const Index> order, Index upto) {
  const Eigen::MatrixXd& k = g.k();
  const Eigen::VectorXd& rows = g.rowsum();
  PrefixSums out;
  out.sa.assign(static_cast<std::size_t>(upto + 1), 0.0);
  out.ts.assign(static_cast<std::size_t>(upto + 1), 0.0);
  if (order.empty()) {
    for (Index t = 1; t <= upto; ++t) {
      const Index j = t - 1;
      out.sa[t] = out.sa[t - 1] + 2.0 * k.col(j).head(j).sum();
      out.ts[t] = out.ts[t - 1] + rows[j];
    }
  } else {
    for (Index t = 1; t <= upto; ++t) {
      const Index j = order[static_cast<std::size_t>(t - 1)];
      const double* col = k.col(j).data();
      double acc = 0.0;
      for (Index p = 0; p < t - 1; ++p) acc += col[order[static_cast<std::size_t>(p)]];
      out.sa[t] = out.sa[t - 1] + 2.0 * acc;
      out.ts[t] = out.ts[t - 1] + rows[j];
    }
  }
  return out;
}

void check_order(std::span<const Index> order, Index n) {
  if (!order.empty() && static_cast<Index>(order.size()) != n) {
    throw Error(ErrorCode::invalid_argument, "order length does not match the gram size");
  }
}

double z_value(double x, double mean, double sd) { return sd > 0.0 ? (x - mean) / sd : 0.0; }

double w_value(Index n, Index t, double r, double sa, double sb) {
  const double nd = static_cast<double>(n), td = static_cast<double>(t);
  return (r * (nd - td - 1.0) * sa + (td - 1.0) * sb) / (nd - 2.0);
}

}  // namespace

ScanBounds ScanBounds::defaults(Index n) {
  const Index n0 = std::max<Index>(2, static_cast<Index>(std::floor(0.05 * static_cast<double>(n))));
  return {n0, n - n0};
}

void ScanBounds::validate(Index n) const {
  if (n0 < 2 || n0 > n1 || n1 > n - 2) {
    throw Error(ErrorCode::invalid_argument,
                "scan bounds [" + std::to_string(n0) + ", " + std::to_string(n1) +
                    "] must satisfy 2 <= n0 <= n1 <= n-2 with n=" + std::to_string(n));
  }
}

std::vector<double> default_r_values() { return {1.0, 1.2, 0.8}; }

ScanPlan::ScanPlan(const GramSummary& g, ScanBounds bounds, std::vector<double> r_values)
    : g_(&g), null_(g), bounds_(bounds), r_(std::move(r_values)) {
  bounds_.validate(g.n());
  const Index m = size();
  points_.reserve(static_cast<std::size_t>(m));
  mean_w_.resize(static_cast<std::size_t>(m) * r_.size());
  sd_w_.resize(mean_w_.size());
  for (Index t = bounds_.n0; t <= bounds_.n1; ++t) {
    points_.push_back(make_point(t));
    for (std::size_t ri = 0; ri < r_.size(); ++ri) {
      const double v = null_.var_w(t, r_[ri]);
      mean_w_[idx(t, static_cast<int>(ri))] = null_.mean_w(t, r_[ri]);
      sd_w_[idx(t, static_cast<int>(ri))] = v > 0.0 ? std::sqrt(v) : 0.0;
    }
  }
}

int ScanPlan::r_index(double r) const noexcept {
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (r_[i] == r) return static_cast<int>(i);
  }
  return -1;
}

ScanPlan::Point ScanPlan::make_point(Index t) const {
  const double nd = static_cast<double>(null_.n()), td = static_cast<double>(t);
  Point p;
  p.mean_sa = null_.mean_sa(t);
  p.mean_sb = null_.mean_sb(t);
  p.mean_d = null_.mean_d(t);
  const double vd = null_.var_d(t);
  p.sd_d = vd > 0.0 ? std::sqrt(vd) : 0.0;
  p.mean_w1 = null_.mean_w(t, 1.0);
  const double vw = null_.var_w(t, 1.0);
  p.sd_w1 = vw > 0.0 ? std::sqrt(vw) : 0.0;
  p.excluded = p.sd_d == 0.0 && p.sd_w1 == 0.0;

  const double ca = td * (td - 1.0), cb = (nd - td) * (nd - td - 1.0);
  const double vaa = null_.var_sa(t) / (ca * ca);
  const double vbb = null_.var_sb(t) / (cb * cb);
  const double vab = null_.cov_sab(t) / (ca * cb);
  const double det = vaa * vbb - vab * vab;
  if (vaa > 0.0 && vbb > 0.0 && det > 1e-14 * vaa * vbb) {
    p.invertible = true;
    p.inv_aa = vbb / det;
    p.inv_bb = vaa / det;
    p.inv_ab = -vab / det;
  }
  return p;
}

SplitStats split_stats(const ScanPlan& plan, const ScanPlan::Point& p, Index t, double sa, double sb) {
  SplitStats s;
  if (p.excluded) return s;
  const Index n = plan.null().n();
  s.z_d = z_value(sa - sb, p.mean_d, p.sd_d);
  s.z_w1 = z_value(w_value(n, t, 1.0, sa, sb), p.mean_w1, p.sd_w1);
  s.gkcp_z = s.z_d * s.z_d + s.z_w1 * s.z_w1;
  if (p.invertible) {
    const double nd = static_cast<double>(n), td = static_cast<double>(t);
    const double kbar = plan.null().kbar();
    const double xa = sa / (td * (td - 1.0)) - kbar;
    const double xb = sb / ((nd - td) * (nd - td - 1.0)) - kbar;
    s.gkcp = xa * xa * p.inv_aa + 2.0 * xa * xb * p.inv_ab + xb * xb * p.inv_bb;
  } else {
    s.gkcp = s.gkcp_z;
  }
  return s;
}

const Eigen::VectorXd& ScanProfile::z_w_for(double r) const {
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    if (r_values[i] == r) return z_w[i];
  }
  throw Error(ErrorCode::invalid_argument, "r=" + std::to_string(r) + " was not scanned");
}

double ScanProfile::max_abs_z_d() const { return z_d.size() ? z_d.cwiseAbs().maxCoeff() : 0.0; }

double ScanProfile::max_z_w(double r) const {
  const Eigen::VectorXd& z = z_w_for(r);
  return z.size() ? z.maxCoeff() : 0.0;
}

ScanProfile scan_single(const ScanPlan& plan, std::span<const Index> order) {
  const GramSummary& g = plan.gram();
  const Index n = g.n();
  check_order(order, n);
  const ScanBounds b = plan.bounds();
  const PrefixSums ps = prefix_sums(g, order, b.n1);
  const double r0 = g.r0();
  const std::size_t nr = plan.r_values().size();

  ScanProfile prof;
  prof.n = n;
  prof.bounds = b;
  prof.r_values = plan.r_values();
  const Index m = plan.size();
  for (Eigen::VectorXd* v : {&prof.alpha, &prof.beta, &prof.gamma_cross, &prof.d, &prof.z_d,
                             &prof.gkcp, &prof.gkcp_z}) {
    v->resize(m);
  }
  prof.w.assign(nr, Eigen::VectorXd(m));
  prof.z_w.assign(nr, Eigen::VectorXd(m));
  prof.excluded.assign(static_cast<std::size_t>(m), 0);

  bool any = false;
  for (Index t = b.n0; t <= b.n1; ++t) {
    const Index i = t - b.n0;
    const double td = static_cast<double>(t), sd = static_cast<double>(n - t);
    const double sa = ps.sa[t];
    const double sb = r0 - 2.0 * ps.ts[t] + sa;
    const ScanPlan::Point& p = plan.point(t);
    prof.alpha[i] = sa / (td * (td - 1.0));
    prof.beta[i] = sb / (sd * (sd - 1.0));
    prof.gamma_cross[i] = (ps.ts[t] - sa) / (td * sd);
    prof.d[i] = sa - sb;
    const SplitStats s = split_stats(plan, p, t, sa, sb);
    prof.z_d[i] = s.z_d;
    prof.gkcp[i] = s.gkcp;
    prof.gkcp_z[i] = s.gkcp_z;
    for (std::size_t ri = 0; ri < nr; ++ri) {
      const double w = w_value(n, t, plan.r_values()[ri], sa, sb);
      prof.w[ri][i] = w;
      prof.z_w[ri][i] = z_value(w, plan.mean_w(t, int(ri)), plan.sd_w(t, int(ri)));
    }
    prof.excluded[static_cast<std::size_t>(i)] = p.excluded ? 1 : 0;
    if (!p.excluded && (!any || s.gkcp > prof.max_gkcp)) {
      prof.max_gkcp = s.gkcp;
      prof.argmax_t = t;
      any = true;
    }
  }
  if (!any) {
    throw Error(ErrorCode::zero_variance, "every candidate split has zero null variance");
  }
  return prof;
}

ScanProfile scan_single(const GramSummary& g, ScanBounds bounds, std::vector<double> r_values) {
  const ScanPlan plan(g, bounds, std::move(r_values));
  return scan_single(plan);
}

ScanMaxima scan_maxima(const ScanPlan& plan, std::span<const Index> order) {
  const GramSummary& g = plan.gram();
  const Index n = g.n();
  check_order(order, n);
  const ScanBounds b = plan.bounds();
  const PrefixSums ps = prefix_sums(g, order, b.n1);
  const std::size_t nr = plan.r_values().size();
  const double lowest = -std::numeric_limits<double>::infinity();

  ScanMaxima mx;
  mx.gkcp = lowest;
  mx.z_w.assign(nr, lowest);
  for (Index t = b.n0; t <= b.n1; ++t) {
    const ScanPlan::Point& p = plan.point(t);
    if (p.excluded) continue;
    const double sa = ps.sa[t];
    const double sb = g.r0() - 2.0 * ps.ts[t] + sa;
    const SplitStats s = split_stats(plan, p, t, sa, sb);
    if (s.gkcp > mx.gkcp) {
      mx.gkcp = s.gkcp;
      mx.argmax_t = t;
    }
    mx.abs_z_d = std::max(mx.abs_z_d, std::abs(s.z_d));
    for (std::size_t ri = 0; ri < nr; ++ri) {
      const double w = w_value(n, t, plan.r_values()[ri], sa, sb);
      mx.z_w[ri] = std::max(mx.z_w[ri], z_value(w, plan.mean_w(t, int(ri)), plan.sd_w(t, int(ri))));
    }
  }
  if (mx.argmax_t < 0) {
    throw Error(ErrorCode::zero_variance, "every candidate split has zero null variance");
  }
  return mx;
}

namespace {

IntervalScanProfile interval_impl(const ScanPlan& plan, std::span<const Index> order, bool keep_matrix) {
  const GramSummary& g = plan.gram();
  const Index n = g.n();
  check_order(order, n);
  const ScanBounds b = plan.bounds();
  const auto pos = [&](Index i) { return order.empty() ? i : order[static_cast<std::size_t>(i)]; };

  // prefix(a, c) = sum of off-diagonal kernel entries over rows < a, cols < c
  // in the reordered matrix.
  const Eigen::MatrixXd& k = g.k();
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Index c = 0; c < n; ++c) {
    const Index pc = pos(c);
    double col = 0.0;
    for (Index a = 0; a < n; ++a) {
      if (a != c) col += k(pos(a), pc);
      prefix(a + 1, c + 1) = prefix(a + 1, c) + col;
    }
  }
  Eigen::VectorXd rows(n + 1);
  rows[0] = 0.0;
  for (Index i = 0; i < n; ++i) rows[i + 1] = rows[i] + g.rowsum()[pos(i)];

  const std::size_t nr = plan.r_values().size();
  const double lowest = -std::numeric_limits<double>::infinity();
  IntervalScanProfile prof;
  prof.n = n;
  prof.bounds = b;
  prof.r_values = plan.r_values();
  prof.max_gkcp = lowest;
  prof.max_abs_z_d = lowest;
  prof.max_z_w.assign(nr, lowest);
  if (keep_matrix) {
    prof.gkcp = Eigen::MatrixXd::Constant(n - b.n0 + 1, plan.size(),
                                          std::numeric_limits<double>::quiet_NaN());
  }

  for (Index m = b.n0; m <= b.n1; ++m) {
    const ScanPlan::Point& p = plan.point(m);
    if (p.excluded) continue;
    for (Index t1 = 0; t1 + m <= n; ++t1) {
      const Index t2 = t1 + m;
      const double sa = prefix(t2, t2) - prefix(t1, t2) - prefix(t2, t1) + prefix(t1, t1);
      const double sb = g.r0() - 2.0 * (rows[t2] - rows[t1]) + sa;
      const SplitStats s = split_stats(plan, p, m, sa, sb);
      if (keep_matrix) prof.gkcp(t1, m - b.n0) = s.gkcp;
      if (s.gkcp > prof.max_gkcp) {
        prof.max_gkcp = s.gkcp;
        prof.argmax_t1 = t1;
        prof.argmax_t2 = t2;
      }
      if (std::abs(s.z_d) > prof.max_abs_z_d) {
        prof.max_abs_z_d = std::abs(s.z_d);
        prof.argmax_abs_z_d_t1 = t1;
        prof.argmax_abs_z_d_t2 = t2;
      }
      for (std::size_t ri = 0; ri < nr; ++ri) {
        const double w = w_value(n, m, plan.r_values()[ri], sa, sb);
        prof.max_z_w[ri] =
            std::max(prof.max_z_w[ri], z_value(w, plan.mean_w(m, int(ri)), plan.sd_w(m, int(ri))));
      }
    }
  }
  if (prof.argmax_t1 < 0) {
    throw Error(ErrorCode::zero_variance, "every candidate interval has zero null variance");
  }
  return prof;
}

}  // namespace

IntervalScanProfile scan_interval(const ScanPlan& plan, std::span<const Index> order) {
  return interval_impl(plan, order, true);
}

IntervalScanProfile interval_maxima(const ScanPlan& plan, std::span<const Index> order) {
  return interval_impl(plan, order, false);
}

IntervalScanProfile scan_interval(const GramSummary& g, ScanBounds bounds, std::vector<double> r_values) {
  const ScanPlan plan(g, bounds, std::move(r_values));
  return interval_impl(plan, {}, true);
}

Eigen::VectorXd mmd_u_scan(const GramSummary& g, ScanBounds bounds) {
  const Index n = g.n();
  bounds.validate(n);
  const PrefixSums ps = prefix_sums(g, {}, bounds.n1);
  Eigen::VectorXd out(bounds.n1 - bounds.n0 + 1);
  for (Index t = bounds.n0; t <= bounds.n1; ++t) {
    const double td = static_cast<double>(t), sd = static_cast<double>(n - t);
    const double sa = ps.sa[t];
    const double sb = g.r0() - 2.0 * ps.ts[t] + sa;
    const double cross = ps.ts[t] - sa;
    out[t - bounds.n0] = sa / (td * (td - 1.0)) + sb / (sd * (sd - 1.0)) - 2.0 * cross / (td * sd);
  }
  return out;
}

}  // namespace gkcp
