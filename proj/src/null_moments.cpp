#include "gkcp/null_moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gkcp/error.hpp"
#include "gkcp/numeric.hpp"

namespace gkcp {
namespace {

void check_split(Index n, Index t) {
  if (t < 2 || t > n - 2) {
    throw Error(ErrorCode::degenerate_split,
                "split t=" + std::to_string(t) + " outside [2, " + std::to_string(n - 2) + "]");
  }
}

}  // namespace

SplitWeights split_weights(Index n, Index t) {
  check_split(n, t);
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(t);
  const double sd = nd - td;
  SplitWeights w;
  w.t = t;
  w.p1 = td * (td - 1.0) / (nd * (nd - 1.0));
  w.p2 = w.p1 * (td - 2.0) / (nd - 2.0);
  w.p3 = w.p2 * (td - 3.0) / (nd - 3.0);
  w.q1 = sd * (sd - 1.0) / (nd * (nd - 1.0));
  w.q2 = w.q1 * (sd - 2.0) / (nd - 2.0);
  w.q3 = w.q2 * (sd - 3.0) / (nd - 3.0);
  return w;
}

NullMoments alpha_beta_moments(const GramSummary& g, Index t) {
  const Index n = g.n();
  const SplitWeights w = split_weights(n, t);
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(t);
  const double sd = nd - td;
  const double kbar = g.kbar();
  const double kbar2 = kbar * kbar;

  NullMoments m;
  m.t = t;
  m.mean_alpha = kbar;
  m.mean_beta = kbar;
  m.var_alpha = (2.0 * g.r1() * w.p1 + 4.0 * g.r2() * w.p2 + g.r3() * w.p3) /
                    (td * td * (td - 1.0) * (td - 1.0)) - kbar2;
  m.var_beta = (2.0 * g.r1() * w.q1 + 4.0 * g.r2() * w.q2 + g.r3() * w.q3) /
                   (sd * sd * (sd - 1.0) * (sd - 1.0)) - kbar2;
  m.cov_ab = g.r3() / (nd * (nd - 1.0) * (nd - 2.0) * (nd - 3.0)) - kbar2;
  return m;
}

NullMoments dw_moments(const GramSummary& g, Index t, double r) {
  NullMoments m = alpha_beta_moments(g, t);
  const ExactNull null(g);
  m.r = r;
  m.mean_d = null.mean_d(t);
  m.var_d = null.var_d(t);
  m.mean_wr = null.mean_w(t, r);
  m.var_wr = null.var_w(t, r);
  return m;
}

Skewness third_moments(const GramSummary& g, Index t, double r) {
  check_split(g.n(), t);
  const ExactNull null(g);
  const double vd = null.var_d(t);
  const double vw = null.var_w(t, r);
  if (!(vd > 0.0) || !(vw > 0.0)) {
    throw Error(ErrorCode::zero_variance,
                "null variance is zero at t=" + std::to_string(t) + "; skewness undefined");
  }
  return {null.third_d(t) / std::pow(vd, 1.5), null.third_w(t, r) / std::pow(vw, 1.5)};
}

CrossCorrelation cross_correlation(const GramSummary& g, Index s, Index t, double r) {
  const Index n = g.n();
  check_split(n, s);
  check_split(n, t);
  if (s >= t) {
    throw Error(ErrorCode::invalid_argument, "cross_correlation needs s < t");
  }
  const ExactNull null(g);
  const double vhs = null.var_h(s), vht = null.var_h(t);
  const double vws = null.var_w(s, r), vwt = null.var_w(t, r);
  if (!(vhs > 0.0) || !(vht > 0.0) || !(vws > 0.0) || !(vwt > 0.0)) {
    throw Error(ErrorCode::zero_variance, "null variance is zero; correlation undefined");
  }
  return {null.cov_h(s, t) / std::sqrt(vhs * vht), null.cov_w(s, t, r) / std::sqrt(vws * vwt)};
}

double rho_star_d(double u, double v) {
  const double lo = std::min(u, v), hi = std::max(u, v);
  return lo * (1.0 - hi) / std::sqrt(u * (1.0 - u) * v * (1.0 - v));
}

double rho_star_w(double u, double v, double r, double r1, double r2) {
  const double lo = std::min(u, v), hi = std::max(u, v);
  const auto sigma = [&](double x) {
    const double a = r * (1.0 - x) + x;
    return std::sqrt(2.0 * r1 * a * a + (4.0 * r1 + 4.0 * r2) * x * (1.0 - x) * (r - 1.0) * (r - 1.0));
  };
  const double num =
      2.0 * r1 *
          (r * r * lo * (1.0 - lo) * (1.0 - hi * hi) +
           r * (hi - 1.0) * (3.0 * u * v - lo * lo * (2.0 * hi + 1.0)) +
           u * v * (2.0 - lo) * (1.0 - hi)) +
      4.0 * r2 * u * v * (1.0 - u) * (1.0 - v) * (r - 1.0) * (r - 1.0);
  return num / (hi * (1.0 - lo) * sigma(u) * sigma(v));
}

ExactNull::ExactNull(const GramSummary& g)
    : n_(g.n()), kbar_(g.kbar()), agg_(g.centered()) {
  const double nd = static_cast<double>(n_);
  const double scale = g.r1() / (nd * (nd - 1.0));
  if (!(agg_.m2 > 1e-24 * nd * scale)) {
    agg_.m2 = agg_.m3 = agg_.b1 = agg_.g1 = 0.0;
  }
  if (!(agg_.q > 1e-24 * nd * nd * scale)) {
    agg_.q = agg_.t3 = agg_.tri = agg_.b1 = agg_.g1 = 0.0;
  }
}

double ExactNull::inclusion(double t, int m) const noexcept {
  return falling_factorial(t, m) / falling_factorial(static_cast<double>(n_), m);
}

double ExactNull::var_h(Index t) const noexcept {
  const double nd = static_cast<double>(n_), td = static_cast<double>(t);
  return agg_.m2 * td * (nd - td) / (nd * (nd - 1.0));
}

double ExactNull::var_e(Index t) const noexcept {
  const double td = static_cast<double>(t);
  return 2.0 * agg_.q * (inclusion(td, 2) - 2.0 * inclusion(td, 3) + inclusion(td, 4));
}

double ExactNull::cov_h(Index s, Index t) const noexcept {
  const double nd = static_cast<double>(n_);
  return agg_.m2 * static_cast<double>(s) * (nd - static_cast<double>(t)) / (nd * (nd - 1.0));
}

double ExactNull::cov_e(Index s, Index t) const noexcept {
  // f(a, b): a fixed positions in the first s, b further ones in (s, t].
  const double sd = static_cast<double>(s), td = static_cast<double>(t), nd = static_cast<double>(n_);
  const auto f = [&](int a, int b) {
    return falling_factorial(sd, a) * falling_factorial(td - a, b) / falling_factorial(nd, a + b);
  };
  return agg_.q * (2.0 * f(2, 0) - 4.0 * f(2, 1) + 2.0 * f(2, 2));
}

double ExactNull::third_h(Index t) const noexcept {
  const double td = static_cast<double>(t);
  return agg_.m3 * (inclusion(td, 1) - 3.0 * inclusion(td, 2) + 2.0 * inclusion(td, 3));
}

double ExactNull::hhe(Index t) const noexcept {
  const double td = static_cast<double>(t);
  return 2.0 * agg_.b1 * (inclusion(td, 2) - 2.0 * inclusion(td, 3) + inclusion(td, 4));
}

double ExactNull::hee(Index t) const noexcept {
  const double td = static_cast<double>(t);
  return agg_.g1 * (4.0 * inclusion(td, 2) - 16.0 * inclusion(td, 3) + 20.0 * inclusion(td, 4) -
                    8.0 * inclusion(td, 5));
}

double ExactNull::eee(Index t) const noexcept {
  const double td = static_cast<double>(t);
  const double t3 = agg_.t3, tri = agg_.tri;
  return 8.0 * (0.5 * t3 * inclusion(td, 2) + (tri - 3.0 * t3) * inclusion(td, 3) +
                (6.5 * t3 - 3.0 * tri) * inclusion(td, 4) + (3.0 * tri - 6.0 * t3) * inclusion(td, 5) +
                (2.0 * t3 - tri) * inclusion(td, 6));
}

ExactNull::WCoef ExactNull::w_coef(Index t, double r) const noexcept {
  const double nd = static_cast<double>(n_), td = static_cast<double>(t);
  return {2.0 * (r - 1.0) * (nd - td - 1.0) * (td - 1.0) / (nd - 2.0),
          (r * (nd - td - 1.0) + (td - 1.0)) / (nd - 2.0)};
}

double ExactNull::mean_sa(Index t) const noexcept {
  const double td = static_cast<double>(t);
  return td * (td - 1.0) * kbar_;
}

double ExactNull::mean_sb(Index t) const noexcept {
  const double sd = static_cast<double>(n_ - t);
  return sd * (sd - 1.0) * kbar_;
}

double ExactNull::mean_d(Index t) const noexcept { return mean_sa(t) - mean_sb(t); }

double ExactNull::mean_w(Index t, double r) const noexcept {
  const double nd = static_cast<double>(n_), td = static_cast<double>(t);
  return (r * (nd - td - 1.0) * mean_sa(t) + (td - 1.0) * mean_sb(t)) / (nd - 2.0);
}

double ExactNull::var_sa(Index t) const noexcept {
  const double c = 2.0 * (static_cast<double>(t) - 1.0);
  return c * c * var_h(t) + var_e(t);
}

double ExactNull::var_sb(Index t) const noexcept {
  const double c = 2.0 * (static_cast<double>(n_ - t) - 1.0);
  return c * c * var_h(t) + var_e(t);
}

double ExactNull::cov_sab(Index t) const noexcept {
  const double ca = 2.0 * (static_cast<double>(t) - 1.0);
  const double cb = 2.0 * (static_cast<double>(n_ - t) - 1.0);
  return -ca * cb * var_h(t) + var_e(t);
}

double ExactNull::var_d(Index t) const noexcept {
  const double c = 2.0 * (static_cast<double>(n_) - 2.0);
  return c * c * var_h(t);
}

double ExactNull::var_w(Index t, double r) const noexcept {
  const WCoef w = w_coef(t, r);
  return w.a * w.a * var_h(t) + w.b * w.b * var_e(t);
}

double ExactNull::cov_w(Index s, Index t, double r) const noexcept {
  const WCoef ws = w_coef(s, r), wt = w_coef(t, r);
  return ws.a * wt.a * cov_h(s, t) + ws.b * wt.b * cov_e(s, t);
}

double ExactNull::third_d(Index t) const noexcept {
  const double c = 2.0 * (static_cast<double>(n_) - 2.0);
  return c * c * c * third_h(t);
}

double ExactNull::third_w(Index t, double r) const noexcept {
  const WCoef w = w_coef(t, r);
  const double a = w.a, b = w.b;
  return a * a * a * third_h(t) + 3.0 * a * a * b * hhe(t) + 3.0 * a * b * b * hee(t) +
         b * b * b * eee(t);
}

}  // namespace gkcp
