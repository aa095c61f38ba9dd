#pragma once

#include <cstdint>
#include <vector>

#include "gkcp/gram.hpp"
#include "gkcp/scan.hpp"

namespace gkcp {

enum class DerivativeMode {
  exact_discrete,  ///< C(t) = 1 - rho(t, t+1) from the exact null correlations
  asymptotic,      ///< C(t) = h*(t/n) / n from the limiting correlation functions
};

enum class TailKind { single_zd, single_zw, interval_zd, interval_zw };

const char* to_string(DerivativeMode mode) noexcept;
const char* to_string(TailKind kind) noexcept;

/// Siegmund's nu(s) = (2/s)(Phi(s/2) - 1/2) / ((s/2) Phi(s/2) + phi(s/2)),
/// with nu(s) = 1 for s < 1e-8.
double nu(double s);

struct CDerivative {
  double d = 0.0;
  double wr = 0.0;
};

/// Local decay of the null autocorrelation of Z_D and Z_W,r at t.
CDerivative c_derivative(const GramSummary& g, Index t, double r,
                         DerivativeMode mode = DerivativeMode::exact_discrete);

struct TailApproxConfig {
  ScanBounds bounds;
  double r = 1.2;
  bool skewness_correction = true;
  DerivativeMode derivative_mode = DerivativeMode::exact_discrete;
};

/// Per-t ingredients of the tail approximations for one gram, bound range
/// and r: C_D, C_W,r and the null skewness of Z_D and Z_W,r. t values whose
/// null variance is zero carry C = 0 and drop out of every sum.
class TailModel {
 public:
  TailModel(const GramSummary& g, const TailApproxConfig& cfg);

  const TailApproxConfig& config() const noexcept { return cfg_; }
  Index n() const noexcept { return n_; }
  Index size() const noexcept { return cfg_.bounds.n1 - cfg_.bounds.n0 + 1; }
  Index t_at(Index i) const noexcept { return cfg_.bounds.n0 + i; }

  const std::vector<double>& c_d() const noexcept { return c_d_; }
  const std::vector<double>& c_w() const noexcept { return c_w_; }
  const std::vector<double>& skew_d() const noexcept { return skew_d_; }
  const std::vector<double>& skew_w() const noexcept { return skew_w_; }

 private:
  TailApproxConfig cfg_;
  Index n_ = 0;
  std::vector<double> c_d_, c_w_, skew_d_, skew_w_;
};

struct PValueReport {
  TailKind kind = TailKind::single_zd;
  double b = 0.0;
  double p_base = 1.0;
  double p_skew = 1.0;
  bool skew_applied = false;
  bool all_skew_invalid = false;  ///< no t had a usable theta; p_skew = p_base

  // Per-t diagnostics, indexed like TailModel.
  std::vector<double> c, nu, s, theta;
  std::vector<std::uint8_t> extrapolated;

  /// Skewness-corrected value when it was requested and usable.
  double p() const noexcept { return skew_applied && !all_skew_invalid ? p_skew : p_base; }
};

/// Tail probability of the scan maximum named by `kind` at threshold b
/// (|Z_D| two-sided with the factor 2, Z_W,r one-sided). Honors the model's
/// skewness_correction flag. Clamped to [0, 1].
PValueReport tail_pvalue(const TailModel& model, TailKind kind, double b);

PValueReport pval_single_zd(const TailModel& model, double b);
PValueReport pval_single_zw(const TailModel& model, double b);
PValueReport pval_interval_zd(const TailModel& model, double b);
PValueReport pval_interval_zw(const TailModel& model, double b);

/// Fills p_skew and the S/theta diagnostics of an uncorrected report.
PValueReport skewness_correct(const PValueReport& base, const TailModel& model);

/// b with tail_pvalue(model, kind, b).p() = level, by bisection on [0.5, 8]
/// to 1e-4.
double critical_value(const TailModel& model, TailKind kind, double level = 0.05);

}  // namespace gkcp
