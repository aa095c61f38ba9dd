#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gkcp/analytic.hpp"
#include "gkcp/fast_tests.hpp"
#include "gkcp/sequence.hpp"

namespace gkcp {

enum class Family { gaussian_type1, gaussian_type2, chi_square, log_normal, multivariate_t };

const char* to_string(Family f) noexcept;
/// Throws InvalidSpec for an unknown name.
Family family_from_string(const std::string& name);

/// Rows 1..tau come from F0 and rows tau+1..n from F1. With Sigma_ij =
/// 0.4^|i-j|, S = Sigma^{1/2} (symmetric root), a shift vector m of norm
/// delta and s = sqrt(sigma2):
///
///   gaussian_type1  F0 = S z           F1 = m + s S z,  m = a 1_d
///   gaussian_type2  as type1 with m = a nu_d, nu_d = (0,..,0,1,..,1)
///   chi_square      F0 = S u           F1 = m + s S u,  u_j iid chi2_3
///   log_normal      F0 = exp(S z)      F1 = exp(m + s S z)
///   multivariate_t  F0 = S z / sqrt(c/df)   F1 = m + s S z / sqrt(c/df),
///                   c ~ chi2_df per row
///
/// nu_d has floor(d/2) leading zeros.
struct GeneratorSpec {
  Family family = Family::gaussian_type1;
  Index d = 10;
  Index n = 200;
  Index tau = -1;  ///< -1 means n/2; n means no change
  double delta = 0.0;
  double sigma2 = 1.0;
  double df = 5.0;
  std::uint64_t seed = 0;

  Index resolved_tau() const noexcept { return tau < 0 ? n / 2 : tau; }
  /// Throws InvalidSpec.
  void validate() const;
};

/// Symmetric square root of Sigma_ij = 0.4^|i-j|, cached per d.
const Eigen::MatrixXd& ar_sigma_sqrt(Index d);

/// Shift vector of norm delta for the family (zero for delta = 0).
Eigen::VectorXd shift_vector(const GeneratorSpec& spec);

Sequence generate(const GeneratorSpec& spec);

enum class TestKind { gkcp, fgkcp1, fgkcp2, fgkcp1_simes, fgkcp2_simes };

const char* to_string(TestKind k) noexcept;
/// Throws Config for an unknown name.
TestKind test_kind_from_string(const std::string& name);

struct TestSpec {
  TestKind kind = TestKind::fgkcp1;
  double alpha = 0.05;
  ScanBounds bounds;  ///< n0 = 0 means ScanBounds::defaults(n)
  std::size_t n_perm = 1000;
  bool skewness_correction = true;
  DerivativeMode derivative_mode = DerivativeMode::exact_discrete;
  unsigned perm_threads = 1;
};

struct TestOutcome {
  double p = 1.0;
  bool rejected = false;
  Index estimate = -1;  ///< argmax of GKCP, 1-based last index of the first group
};

/// Runs one test on a sequence with the median-heuristic kernel. `seed`
/// drives the permutations of the gkcp test.
TestOutcome run_test(const Sequence& seq, const TestSpec& test, std::uint64_t seed);
TestOutcome run_test(const GramSummary& g, const TestSpec& test, std::uint64_t seed);

struct ReplicateRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  TestOutcome outcome;
  bool accurate = false;
  double seconds = 0.0;
};

struct ExperimentResult {
  GeneratorSpec spec;
  TestSpec test;
  std::uint64_t master_seed = 0;
  std::size_t replicates = 0;
  std::size_t rejections = 0;
  std::size_t accurate = 0;  ///< rejected with |estimate - tau| <= accuracy_window
  Index accuracy_window = 20;
  double mean_seconds = 0.0;
  double max_seconds = 0.0;
  std::vector<ReplicateRecord> records;

  double rate() const noexcept { return replicates ? double(rejections) / double(replicates) : 0.0; }
};

/// Replicate i draws its data from seed mix_seed(master_seed, i) and its
/// permutations from a second stream of that seed, so results do not depend
/// on `threads`.
ExperimentResult power_study(const GeneratorSpec& spec, const TestSpec& test, std::size_t replicates,
                             std::uint64_t master_seed, unsigned threads = 1);

/// power_study with delta = 0, sigma2 = 1 and no change (tau = n).
ExperimentResult size_study(GeneratorSpec spec, const TestSpec& test, std::size_t replicates,
                            std::uint64_t master_seed, unsigned threads = 1);

enum class CriticalStatistic { zd, zw12, zw08 };

const char* to_string(CriticalStatistic s) noexcept;

struct CriticalValueRow {
  CriticalStatistic statistic = CriticalStatistic::zd;
  Index n0 = 0;
  double analytic = 0.0;         ///< with skewness correction
  double analytic_no_skew = 0.0;
  double permutation = 0.0;      ///< 95% quantile (type 7) of the permuted maxima
};

/// One sequence from `spec` (its delta/sigma2 are used as given); for each n0
/// the bounds are [n0, n - n0].
std::vector<CriticalValueRow> critical_value_study(const GeneratorSpec& spec,
                                                   const std::vector<CriticalStatistic>& statistics,
                                                   const std::vector<Index>& n0_grid, std::size_t n_perm,
                                                   std::uint64_t perm_seed, double level = 0.05,
                                                   unsigned threads = 1);

struct RuntimeRow {
  Index n = 0;
  TestKind test = TestKind::fgkcp1;
  std::size_t repeats = 0;
  double mean_seconds = 0.0;
};

/// Wall-clock of run_test (gram construction included) on null Gaussian
/// data, averaged over `repeats`.
std::vector<RuntimeRow> runtime_study(const std::vector<Index>& n_grid, Index d, const std::vector<TestSpec>& tests,
                                      std::size_t repeats, std::uint64_t seed);

/// Sample quantile, linear interpolation between order statistics (type 7).
double quantile_type7(std::vector<double> values, double prob);

}  // namespace gkcp
