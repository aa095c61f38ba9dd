#pragma once

#include <cstdint>
#include <vector>

#include "gkcp/sequence.hpp"
#include "gkcp/sim.hpp"

namespace gkcp {

struct SegmentConfig {
  TestSpec test;              ///< bounds are ignored; each segment gets its own
  double threshold = 0.001;   ///< split when p < threshold
  Index min_len = 20;         ///< shortest segment that is tested
  bool global_bandwidth = false;  ///< one kernel on the full data instead of one per segment
  double bandwidth = 0.0;         ///< > 0 fixes the kernel bandwidth of every segment
  std::uint64_t seed = 0;

  /// Throws Config.
  void validate() const;
};

/// One tested (or too-short) segment, rows [begin, end) of the input.
struct ChangeNode {
  Index begin = 0, end = 0;
  bool tested = false;      ///< false for segments shorter than the minimum
  double p = 1.0;
  bool split = false;
  Index change = -1;        ///< absolute split: first part is rows [begin, change)
  int left = -1, right = -1;  ///< child node indices
};

struct ChangeTree {
  TestKind method = TestKind::fgkcp1;
  std::vector<ChangeNode> nodes;  ///< node 0 is the whole sequence
  std::vector<Index> change_points;  ///< sorted; change c means rows c and c+1 (1-based) differ
};

/// Scan bounds for a segment of length len: n0 = max(2, floor(0.05 len),
/// ceil(min_len / 2)), n1 = len - n0.
ScanBounds segment_bounds(Index len, Index min_len);

/// Recursive binary segmentation. A segment is tested when its length is at
/// least max(min_len, 2 n0, 4); it is split at the GKCP argmax when the test
/// p-value is below the threshold, and both halves are processed in turn.
ChangeTree binary_segment(const Sequence& seq, const SegmentConfig& cfg);

/// Same on a precomputed kernel; segments use its diagonal blocks.
ChangeTree binary_segment(const GramSummary& g, const SegmentConfig& cfg);

}  // namespace gkcp
