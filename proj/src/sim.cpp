#include "gkcp/sim.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>

#include "gkcp/error.hpp"
#include "gkcp/gram.hpp"
#include "gkcp/parallel.hpp"
#include "gkcp/permutation.hpp"
#include "gkcp/scan.hpp"

namespace gkcp {
namespace {

constexpr double kArCoefficient = 0.4;
constexpr std::uint64_t kPermStream = 0x5045524DULL;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScanBounds resolve_bounds(ScanBounds b, Index n) { return b.n0 == 0 ? ScanBounds::defaults(n) : b; }

}  // namespace

const char* to_string(Family f) noexcept {
  switch (f) {
    case Family::gaussian_type1: return "gaussian_type1";
    case Family::gaussian_type2: return "gaussian_type2";
    case Family::chi_square: return "chi_square";
    case Family::log_normal: return "log_normal";
    case Family::multivariate_t: return "multivariate_t";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::gaussian_type1, Family::gaussian_type2, Family::chi_square, Family::log_normal,
                   Family::multivariate_t}) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorCode::invalid_spec, "unknown generator family '" + name + "'");
}

void GeneratorSpec::validate() const {
  if (d < 1) throw Error(ErrorCode::invalid_spec, "d must be at least 1");
  if (n < 4) throw Error(ErrorCode::invalid_spec, "n must be at least 4");
  if (tau < -1 || tau > n) throw Error(ErrorCode::invalid_spec, "tau must lie in [0, n]");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::invalid_spec, "delta must be >= 0");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw Error(ErrorCode::invalid_spec, "sigma2 must be > 0");
  if (family == Family::multivariate_t && !(df > 0.0)) throw Error(ErrorCode::invalid_spec, "df must be > 0");
  if (family == Family::gaussian_type2 && d < 2 && delta > 0.0) {
    throw Error(ErrorCode::invalid_spec, "gaussian_type2 with a mean shift needs d >= 2");
  }
}

const Eigen::MatrixXd& ar_sigma_sqrt(Index d) {
  static std::mutex mu;
  static std::map<Index, std::unique_ptr<Eigen::MatrixXd>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[d];
  if (!slot) {
    Eigen::MatrixXd sigma(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) sigma(i, j) = std::pow(kArCoefficient, static_cast<double>(std::abs(i - j)));
    slot = std::make_unique<Eigen::MatrixXd>(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma).operatorSqrt());
  }
  return *slot;
}

Eigen::VectorXd shift_vector(const GeneratorSpec& spec) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(spec.d);
  if (spec.delta == 0.0) return m;
  if (spec.family == Family::gaussian_type2) {
    m.tail(spec.d - spec.d / 2).setOnes();
  } else {
    m.setOnes();
  }
  return m * (spec.delta / m.norm());
}

Sequence generate(const GeneratorSpec& spec) {
  spec.validate();
  const Index n = spec.n, d = spec.d, tau = spec.resolved_tau();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi3(3.0);
  std::chi_squared_distribution<double> chi_df(spec.df);

  RowMatrix base(n, d);
  for (Index i = 0; i < n; ++i) {
    if (spec.family == Family::chi_square) {
      for (Index j = 0; j < d; ++j) base(i, j) = chi3(rng);
    } else {
      for (Index j = 0; j < d; ++j) base(i, j) = normal(rng);
    }
    if (spec.family == Family::multivariate_t) base.row(i) /= std::sqrt(chi_df(rng) / spec.df);
  }
  // Rows are x_i^T = u_i^T S with S symmetric.
  RowMatrix x = base * ar_sigma_sqrt(d);

  if (tau < n) {
    const Eigen::RowVectorXd m = shift_vector(spec).transpose();
    const double s = std::sqrt(spec.sigma2);
    for (Index i = tau; i < n; ++i) x.row(i) = m + s * x.row(i);
  }
  if (spec.family == Family::log_normal) x = x.array().exp().matrix();
  return Sequence(std::move(x));
}

const char* to_string(TestKind k) noexcept {
  switch (k) {
    case TestKind::gkcp: return "gkcp";
    case TestKind::fgkcp1: return "fgkcp1";
    case TestKind::fgkcp2: return "fgkcp2";
    case TestKind::fgkcp1_simes: return "fgkcp1_simes";
    case TestKind::fgkcp2_simes: return "fgkcp2_simes";
  }
  return "unknown";
}

TestKind test_kind_from_string(const std::string& name) {
  for (TestKind k :
       {TestKind::gkcp, TestKind::fgkcp1, TestKind::fgkcp2, TestKind::fgkcp1_simes, TestKind::fgkcp2_simes}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::config, "unknown test '" + name + "'");
}

TestOutcome run_test(const Sequence& seq, const TestSpec& test, std::uint64_t seed) {
  return run_test(build_gram(seq), test, seed);
}

TestOutcome run_test(const GramSummary& g, const TestSpec& test, std::uint64_t seed) {
  const ScanBounds bounds = resolve_bounds(test.bounds, g.n());
  TestOutcome out;
  if (test.kind == TestKind::gkcp) {
    if (test.n_perm < 1) throw Error(ErrorCode::invalid_argument, "n_perm must be at least 1");
    const ScanPlan plan(g, bounds, {1.0});
    const std::vector<ScanMaxima> all = permutation_maxima(plan, test.n_perm, seed, test.perm_threads);
    std::vector<double> draws(test.n_perm);
    for (std::size_t k = 0; k < test.n_perm; ++k) draws[k] = all[k + 1].gkcp;
    out.p = add_one_pvalue(all[0].gkcp, draws);
    out.rejected = out.p < test.alpha;
    out.estimate = all[0].argmax_t;
    return out;
  }
  FastTestConfig cfg;
  cfg.bounds = bounds;
  cfg.alpha = test.alpha;
  cfg.skewness_correction = test.skewness_correction;
  cfg.derivative_mode = test.derivative_mode;
  const Combine combine =
      test.kind == TestKind::fgkcp1_simes || test.kind == TestKind::fgkcp2_simes ? Combine::simes : Combine::bonferroni;
  const FastTestReport r = test.kind == TestKind::fgkcp1 || test.kind == TestKind::fgkcp1_simes
                               ? fgkcp1(g, cfg, combine)
                               : fgkcp2(g, cfg, combine);
  out.p = r.combined_p;
  out.rejected = r.rejected;
  out.estimate = r.components.argmax_t;
  return out;
}

ExperimentResult power_study(const GeneratorSpec& spec, const TestSpec& test, std::size_t replicates,
                             std::uint64_t master_seed, unsigned threads) {
  spec.validate();
  ExperimentResult res;
  res.spec = spec;
  res.test = test;
  res.master_seed = master_seed;
  res.replicates = replicates;
  res.records.resize(replicates);
  const Index tau = spec.resolved_tau();
  parallel_for(replicates, threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    GeneratorSpec s = spec;
    s.seed = mix_seed(master_seed, i);
    ReplicateRecord& rec = res.records[i];
    rec.index = i;
    rec.seed = s.seed;
    rec.outcome = run_test(generate(s), test, mix_seed(s.seed, kPermStream));
    rec.accurate = rec.outcome.rejected && tau < spec.n &&
                   std::abs(rec.outcome.estimate - tau) <= res.accuracy_window;
    rec.seconds = seconds_since(t0);
  });
  double total = 0.0;
  for (const ReplicateRecord& rec : res.records) {
    res.rejections += rec.outcome.rejected;
    res.accurate += rec.accurate;
    total += rec.seconds;
    res.max_seconds = std::max(res.max_seconds, rec.seconds);
  }
  res.mean_seconds = replicates ? total / static_cast<double>(replicates) : 0.0;
  return res;
}

ExperimentResult size_study(GeneratorSpec spec, const TestSpec& test, std::size_t replicates,
                            std::uint64_t master_seed, unsigned threads) {
  spec.delta = 0.0;
  spec.sigma2 = 1.0;
  spec.tau = spec.n;
  return power_study(spec, test, replicates, master_seed, threads);
}

const char* to_string(CriticalStatistic s) noexcept {
  switch (s) {
    case CriticalStatistic::zd: return "Z_D";
    case CriticalStatistic::zw12: return "Z_W1.2";
    case CriticalStatistic::zw08: return "Z_W0.8";
  }
  return "unknown";
}

double quantile_type7(std::vector<double> values, double prob) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(prob, 0.0, 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<CriticalValueRow> critical_value_study(const GeneratorSpec& spec,
                                                   const std::vector<CriticalStatistic>& statistics,
                                                   const std::vector<Index>& n0_grid, std::size_t n_perm,
                                                   std::uint64_t perm_seed, double level, unsigned threads) {
  if (n_perm < 1) throw Error(ErrorCode::invalid_argument, "n_perm must be at least 1");
  const GramSummary g = build_gram(generate(spec));
  const Index n = g.n();
  std::vector<CriticalValueRow> rows;
  for (Index n0 : n0_grid) {
    const ScanBounds bounds{n0, n - n0};
    bounds.validate(n);
    const ScanPlan plan(g, bounds, {1.0, 1.2, 0.8});
    const std::vector<ScanMaxima> all = permutation_maxima(plan, n_perm, perm_seed, threads);
    for (CriticalStatistic stat : statistics) {
      const double r = stat == CriticalStatistic::zw08 ? 0.8 : 1.2;
      const TailKind kind = stat == CriticalStatistic::zd ? TailKind::single_zd : TailKind::single_zw;
      CriticalValueRow row;
      row.statistic = stat;
      row.n0 = n0;
      row.analytic = critical_value(TailModel(g, {bounds, r, true}), kind, level);
      row.analytic_no_skew = critical_value(TailModel(g, {bounds, r, false}), kind, level);
      std::vector<double> draws(n_perm);
      for (std::size_t k = 0; k < n_perm; ++k) {
        const ScanMaxima& m = all[k + 1];
        draws[k] = stat == CriticalStatistic::zd ? m.abs_z_d : m.z_w[stat == CriticalStatistic::zw12 ? 1 : 2];
      }
      row.permutation = quantile_type7(std::move(draws), 1.0 - level);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<RuntimeRow> runtime_study(const std::vector<Index>& n_grid, Index d, const std::vector<TestSpec>& tests,
                                      std::size_t repeats, std::uint64_t seed) {
  std::vector<RuntimeRow> rows;
  for (Index n : n_grid) {
    for (const TestSpec& test : tests) {
      RuntimeRow row{n, test.kind, repeats, 0.0};
      for (std::size_t rep = 0; rep < repeats; ++rep) {
        GeneratorSpec spec;
        spec.d = d;
        spec.n = n;
        spec.tau = n;
        spec.seed = mix_seed(seed, rep);
        const Sequence seq = generate(spec);
        const auto t0 = std::chrono::steady_clock::now();
        run_test(seq, test, mix_seed(spec.seed, kPermStream));
        row.mean_seconds += seconds_since(t0);
      }
      if (repeats) row.mean_seconds /= static_cast<double>(repeats);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace gkcp
