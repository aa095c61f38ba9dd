#include "gkcp/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gkcp/error.hpp"
#include "gkcp/parallel.hpp"

namespace gkcp {
namespace {

bool is_interval(PermStatistic s) {
  return s == PermStatistic::gkcp_interval || s == PermStatistic::zd_interval || s == PermStatistic::zw_interval;
}

double pick(const ScanMaxima& m, PermStatistic s, int ri) {
  switch (s) {
    case PermStatistic::gkcp_single: return m.gkcp;
    case PermStatistic::zd_single: return m.abs_z_d;
    default: return m.z_w[static_cast<std::size_t>(ri)];
  }
}

double pick(const IntervalScanProfile& m, PermStatistic s, int ri) {
  switch (s) {
    case PermStatistic::gkcp_interval: return m.max_gkcp;
    case PermStatistic::zd_interval: return m.max_abs_z_d;
    default: return m.max_z_w[static_cast<std::size_t>(ri)];
  }
}

}  // namespace

const char* to_string(PermStatistic s) noexcept {
  switch (s) {
    case PermStatistic::gkcp_single: return "gkcp_single";
    case PermStatistic::gkcp_interval: return "gkcp_interval";
    case PermStatistic::zd_single: return "zd_single";
    case PermStatistic::zw_single: return "zw_single";
    case PermStatistic::zd_interval: return "zd_interval";
    case PermStatistic::zw_interval: return "zw_interval";
  }
  return "unknown";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Index> permutation_for(std::uint64_t seed, std::uint64_t k, Index n) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(mix_seed(seed, k));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

double add_one_pvalue(double observed, const std::vector<double>& draws) {
  // Draws equal to the observed value up to rounding count as exceedances.
  const double tol = 1e-12 * std::max(1.0, std::abs(observed));
  const auto hits = std::count_if(draws.begin(), draws.end(), [&](double x) { return x >= observed - tol; });
  return (1.0 + static_cast<double>(hits)) / (1.0 + static_cast<double>(draws.size()));
}

std::vector<ScanMaxima> permutation_maxima(const ScanPlan& plan, std::size_t n_perm, std::uint64_t seed,
                                           unsigned threads) {
  std::vector<ScanMaxima> out(n_perm + 1);
  out[0] = scan_maxima(plan);
  const Index n = plan.gram().n();
  parallel_for(n_perm, threads, [&](std::size_t k) {
    const std::vector<Index> order = permutation_for(seed, k, n);
    out[k + 1] = scan_maxima(plan, order);
  });
  return out;
}

std::vector<IntervalScanProfile> permutation_interval_maxima(const ScanPlan& plan, std::size_t n_perm,
                                                             std::uint64_t seed, unsigned threads) {
  std::vector<IntervalScanProfile> out(n_perm + 1);
  out[0] = interval_maxima(plan);
  const Index n = plan.gram().n();
  parallel_for(n_perm, threads, [&](std::size_t k) {
    const std::vector<Index> order = permutation_for(seed, k, n);
    out[k + 1] = interval_maxima(plan, order);
  });
  return out;
}

PermResult perm_pvalue(const GramSummary& g, const PermConfig& cfg, ScanBounds bounds) {
  if (cfg.n_perm < 1) throw Error(ErrorCode::invalid_argument, "n_perm must be at least 1");
  std::vector<double> r_values{1.0};
  int ri = 0;
  if (cfg.statistic == PermStatistic::zw_single || cfg.statistic == PermStatistic::zw_interval) {
    r_values = {cfg.r};
  }
  const ScanPlan plan(g, bounds, r_values);

  PermResult res;
  res.draws.resize(cfg.n_perm);
  if (is_interval(cfg.statistic)) {
    const std::vector<IntervalScanProfile> all = permutation_interval_maxima(plan, cfg.n_perm, cfg.seed, cfg.threads);
    res.observed = pick(all[0], cfg.statistic, ri);
    for (std::size_t k = 0; k < cfg.n_perm; ++k) res.draws[k] = pick(all[k + 1], cfg.statistic, ri);
  } else {
    const std::vector<ScanMaxima> all = permutation_maxima(plan, cfg.n_perm, cfg.seed, cfg.threads);
    res.observed = pick(all[0], cfg.statistic, ri);
    for (std::size_t k = 0; k < cfg.n_perm; ++k) res.draws[k] = pick(all[k + 1], cfg.statistic, ri);
  }
  res.p = add_one_pvalue(res.observed, res.draws);
  return res;
}

}  // namespace gkcp
