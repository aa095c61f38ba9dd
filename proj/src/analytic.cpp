#include "gkcp/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gkcp/error.hpp"
#include "gkcp/null_moments.hpp"
#include "gkcp/numeric.hpp"

namespace gkcp {
namespace {

constexpr double kAsymptoticStep = 1e-6;

bool is_zd(TailKind k) { return k == TailKind::single_zd || k == TailKind::interval_zd; }
bool is_interval(TailKind k) { return k == TailKind::interval_zd || k == TailKind::interval_zw; }

double safe_corr(double cov, double va, double vb) {
  return va > 0.0 && vb > 0.0 ? cov / std::sqrt(va * vb) : std::numeric_limits<double>::quiet_NaN();
}

CDerivative exact_c(const ExactNull& null, Index t, double r) {
  const Index n = null.n();
  const Index s = t + 1 <= n - 2 ? t : t - 1;
  const Index u = s + 1;
  const double rd = safe_corr(null.cov_h(s, u), null.var_h(s), null.var_h(u));
  const double rw = safe_corr(null.cov_w(s, u, r), null.var_w(s, r), null.var_w(u, r));
  return {std::isnan(rd) ? 0.0 : 1.0 - rd, std::isnan(rw) ? 0.0 : 1.0 - rw};
}

CDerivative asymptotic_c(const ExactNull& null, Index t, double r) {
  const double nd = static_cast<double>(null.n());
  const double x = static_cast<double>(t) / nd;
  const CenteredAggregates& a = null.aggregates();
  CDerivative c;
  if (!null.linear_degenerate()) c.d = 1.0 / (2.0 * x * (1.0 - x)) / nd;
  // The limiting correlation has a kink at u = v, so differentiate from one
  // side only.
  const double r1 = a.q;
  const double r2 = a.r1 + a.r2 - a.q;
  const double rho = rho_star_w(x - kAsymptoticStep, x, r, r1, r2);
  if (std::isfinite(rho)) c.wr = (1.0 - rho) / kAsymptoticStep / nd;
  return c;
}

void check_t(Index n, Index t) {
  if (t < 2 || t > n - 2) {
    throw Error(ErrorCode::degenerate_split,
                "t=" + std::to_string(t) + " outside [2, " + std::to_string(n - 2) + "]");
  }
}

// log of S = exp{(b - theta)^2 / 2 + gamma theta^3 / 6} / sqrt(1 + gamma theta)
double log_s_factor(double b, double gamma, double theta) {
  return 0.5 * (b - theta) * (b - theta) + gamma * theta * theta * theta / 6.0 - 0.5 * std::log1p(gamma * theta);
}

PValueReport compute(const TailModel& model, TailKind kind, double b, bool skew) {
  PValueReport rep;
  rep.kind = kind;
  rep.b = b;
  const Index m = model.size();
  const Index n = model.n();
  const std::vector<double>& cs = is_zd(kind) ? model.c_d() : model.c_w();
  const std::vector<double>& gs = is_zd(kind) ? model.skew_d() : model.skew_w();
  rep.c = cs;
  rep.nu.assign(static_cast<std::size_t>(m), 0.0);
  if (!(b > 0.0)) {
    rep.p_base = rep.p_skew = 1.0;
    return rep;
  }

  const double sides = is_zd(kind) ? 2.0 : 1.0;
  const double log_coeff = std::log(sides) + (is_interval(kind) ? 3.0 : 1.0) * std::log(b) - 0.5 * b * b -
                           0.5 * std::log(2.0 * std::numbers::pi);
  const double coeff = std::exp(log_coeff);
  std::vector<double> terms(static_cast<std::size_t>(m), 0.0);
  CompensatedSum base;
  for (Index i = 0; i < m; ++i) {
    const double c = cs[i];
    if (!(c > 0.0)) continue;
    const double v = nu(b * std::sqrt(2.0 * c));
    rep.nu[i] = v;
    const double cv = c * v;
    terms[i] = is_interval(kind) ? cv * cv * static_cast<double>(n - model.t_at(i)) : cv;
    base += terms[i];
  }
  rep.p_base = std::clamp(coeff * base.value(), 0.0, 1.0);
  rep.p_skew = rep.p_base;
  if (!skew) return rep;

  rep.skew_applied = true;
  rep.s.assign(static_cast<std::size_t>(m), 1.0);
  rep.theta.assign(static_cast<std::size_t>(m), std::numeric_limits<double>::quiet_NaN());
  rep.extrapolated.assign(static_cast<std::size_t>(m), 0);

  std::vector<Index> valid;
  for (Index i = 0; i < m; ++i) {
    const double arg = 1.0 + 2.0 * gs[i] * b;
    if (arg > 0.0) {
      rep.theta[i] = 2.0 * b / (1.0 + std::sqrt(arg));
      valid.push_back(i);
    }
  }
  if (valid.empty()) {
    rep.all_skew_invalid = true;
    return rep;
  }
  // S grows like exp(b^2 / 2) where phi(b) underflows, so the products are
  // formed in log space.
  std::vector<double> log_s(static_cast<std::size_t>(m), 0.0);
  for (Index i : valid) log_s[i] = log_s_factor(b, gs[i], rep.theta[i]);

  for (Index i = 0; i < m; ++i) {
    if (!std::isnan(rep.theta[i])) continue;
    // Two nearest valid indices (smaller index first on ties).
    Index a = -1, c = -1;
    for (Index v : valid) {
      const Index dv = std::abs(v - i);
      if (a < 0 || dv < std::abs(a - i)) {
        c = a;
        a = v;
      } else if (c < 0 || dv < std::abs(c - i)) {
        c = v;
      }
    }
    double theta = rep.theta[a];
    if (c >= 0) theta += (rep.theta[c] - rep.theta[a]) * static_cast<double>(i - a) / static_cast<double>(c - a);
    rep.theta[i] = theta;
    rep.extrapolated[i] = 1;
    log_s[i] = 1.0 + gs[i] * theta > 0.0 ? log_s_factor(b, gs[i], theta) : log_s[a];
  }

  CompensatedSum skewed;
  for (Index i = 0; i < m; ++i) {
    rep.s[i] = std::exp(log_s[i]);
    if (terms[i] > 0.0) skewed += std::exp(log_coeff + log_s[i]) * terms[i];
  }
  const double p = skewed.value();
  rep.p_skew = std::isfinite(p) ? std::clamp(p, 0.0, 1.0) : 1.0;
  return rep;
}

}  // namespace

const char* to_string(DerivativeMode mode) noexcept {
  return mode == DerivativeMode::exact_discrete ? "exact-discrete" : "asymptotic";
}

const char* to_string(TailKind kind) noexcept {
  switch (kind) {
    case TailKind::single_zd: return "single_zd";
    case TailKind::single_zw: return "single_zw";
    case TailKind::interval_zd: return "interval_zd";
    case TailKind::interval_zw: return "interval_zw";
  }
  return "unknown";
}

double nu(double s) {
  if (s < 1e-8) return 1.0;
  const double h = 0.5 * s;
  return (2.0 / s) * (normal_cdf(h) - 0.5) / (h * normal_cdf(h) + normal_pdf(h));
}

CDerivative c_derivative(const GramSummary& g, Index t, double r, DerivativeMode mode) {
  check_t(g.n(), t);
  const ExactNull null(g);
  return mode == DerivativeMode::exact_discrete ? exact_c(null, t, r) : asymptotic_c(null, t, r);
}

TailModel::TailModel(const GramSummary& g, const TailApproxConfig& cfg) : cfg_(cfg), n_(g.n()) {
  cfg_.bounds.validate(n_);
  const ExactNull null(g);
  const Index m = size();
  c_d_.resize(static_cast<std::size_t>(m));
  c_w_.resize(c_d_.size());
  skew_d_.resize(c_d_.size());
  skew_w_.resize(c_d_.size());
  for (Index i = 0; i < m; ++i) {
    const Index t = t_at(i);
    const CDerivative c = cfg_.derivative_mode == DerivativeMode::exact_discrete ? exact_c(null, t, cfg_.r)
                                                                                  : asymptotic_c(null, t, cfg_.r);
    const double vd = null.var_d(t), vw = null.var_w(t, cfg_.r);
    c_d_[i] = vd > 0.0 ? c.d : 0.0;
    c_w_[i] = vw > 0.0 ? c.wr : 0.0;
    skew_d_[i] = vd > 0.0 ? null.third_d(t) / std::pow(vd, 1.5) : 0.0;
    skew_w_[i] = vw > 0.0 ? null.third_w(t, cfg_.r) / std::pow(vw, 1.5) : 0.0;
  }
}

PValueReport tail_pvalue(const TailModel& model, TailKind kind, double b) {
  return compute(model, kind, b, model.config().skewness_correction);
}

PValueReport pval_single_zd(const TailModel& model, double b) { return tail_pvalue(model, TailKind::single_zd, b); }
PValueReport pval_single_zw(const TailModel& model, double b) { return tail_pvalue(model, TailKind::single_zw, b); }
PValueReport pval_interval_zd(const TailModel& model, double b) {
  return tail_pvalue(model, TailKind::interval_zd, b);
}
PValueReport pval_interval_zw(const TailModel& model, double b) {
  return tail_pvalue(model, TailKind::interval_zw, b);
}

PValueReport skewness_correct(const PValueReport& base, const TailModel& model) {
  return compute(model, base.kind, base.b, true);
}

double critical_value(const TailModel& model, TailKind kind, double level) {
  double lo = 0.5, hi = 8.0;
  const auto p = [&](double b) { return tail_pvalue(model, kind, b).p(); };
  if (p(lo) <= level) return lo;
  if (p(hi) > level) return hi;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (p(mid) > level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace gkcp
