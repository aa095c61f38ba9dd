#pragma once

#include <cstdint>
#include <vector>

#include "gkcp/gram.hpp"
#include "gkcp/scan.hpp"

namespace gkcp {

enum class PermStatistic {
  gkcp_single,    ///< max_t GKCP(t)
  gkcp_interval,  ///< max over intervals of GKCP
  zd_single,      ///< max_t |Z_D(t)|
  zw_single,      ///< max_t Z_W,r(t)
  zd_interval,
  zw_interval,
};

const char* to_string(PermStatistic s) noexcept;

struct PermConfig {
  std::size_t n_perm = 1000;
  std::uint64_t seed = 0;
  PermStatistic statistic = PermStatistic::gkcp_single;
  double r = 1.2;        ///< used by the Z_W statistics
  unsigned threads = 1;  ///< 0: one per hardware thread
};

struct PermResult {
  double p = 1.0;
  double observed = 0.0;
  std::vector<double> draws;  ///< draws[k] from the k-th permutation
};

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// The k-th permutation of 0..n-1 for a given seed; a pure function of
/// (seed, k, n).
std::vector<Index> permutation_for(std::uint64_t seed, std::uint64_t k, Index n);

/// p = (1 + #{draws >= observed}) / (1 + n_perm). Every permuted scan
/// reuses the gram through a relabeled index map.
PermResult perm_pvalue(const GramSummary& g, const PermConfig& cfg, ScanBounds bounds);

/// Scan maxima of the identity order followed by n_perm permuted orders
/// (entry k + 1 is permutation k). Shares one plan, so all statistics of a
/// permutation come from the same relabeling.
std::vector<ScanMaxima> permutation_maxima(const ScanPlan& plan, std::size_t n_perm, std::uint64_t seed,
                                           unsigned threads = 1);

/// Same for the interval scan.
std::vector<IntervalScanProfile> permutation_interval_maxima(const ScanPlan& plan, std::size_t n_perm,
                                                             std::uint64_t seed, unsigned threads = 1);

/// p-value for an observed value against permutation draws (add-one rule).
double add_one_pvalue(double observed, const std::vector<double>& draws);

}  // namespace gkcp
