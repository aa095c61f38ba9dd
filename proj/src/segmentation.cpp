#include "gkcp/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gkcp/error.hpp"
#include "gkcp/gram.hpp"
#include "gkcp/permutation.hpp"

namespace gkcp {

void SegmentConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorCode::config, "threshold must lie in [0, 1]");
  if (min_len < 4) throw Error(ErrorCode::config, "min_len must be at least 4");
}

ScanBounds segment_bounds(Index len, Index min_len) {
  const Index n0 = std::max({Index{2}, len / 20, (min_len + 1) / 2});
  return {n0, len - n0};
}

namespace {

template <class GramFor>
ChangeTree segment(Index n, const SegmentConfig& cfg, GramFor&& gram_for) {
  cfg.validate();
  ChangeTree tree;
  tree.method = cfg.test.kind;
  std::vector<int> stack{0};
  tree.nodes.push_back({0, n});
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Index begin = tree.nodes[id].begin, end = tree.nodes[id].end;
    const Index len = end - begin;
    const ScanBounds bounds = segment_bounds(len, cfg.min_len);
    if (len < std::max({cfg.min_len, 2 * bounds.n0, Index{4}})) continue;

    TestSpec test = cfg.test;
    test.bounds = bounds;
    TestOutcome out;
    try {
      const GramSummary g = gram_for(begin, end);
      out = run_test(g, test, mix_seed(cfg.seed, static_cast<std::uint64_t>(begin)));
    } catch (const Error& e) {
      // Constant or kernel-degenerate segments carry no evidence of a change.
      if (e.code() != ErrorCode::all_points_identical && e.code() != ErrorCode::zero_variance) throw;
    }
    ChangeNode& node = tree.nodes[id];
    node.tested = true;
    node.p = out.p;
    if (!(out.p < cfg.threshold) || out.estimate < 1) continue;

    const Index change = begin + out.estimate;
    node.split = true;
    node.change = change;
    const int left = static_cast<int>(tree.nodes.size());
    node.left = left;
    node.right = left + 1;
    tree.nodes.push_back({begin, change});
    tree.nodes.push_back({change, end});
    tree.change_points.push_back(change);
    stack.push_back(left + 1);
    stack.push_back(left);
  }
  std::sort(tree.change_points.begin(), tree.change_points.end());
  return tree;
}

}  // namespace

ChangeTree binary_segment(const Sequence& seq, const SegmentConfig& cfg) {
  std::optional<GramSummary> global;
  if (cfg.global_bandwidth) global = cfg.bandwidth > 0.0 ? build_gram(seq, cfg.bandwidth) : build_gram(seq);
  return segment(seq.n(), cfg, [&](Index begin, Index end) {
    if (global) return global->sub(begin, end);
    const Sequence part = seq.slice(begin, end);
    return cfg.bandwidth > 0.0 ? build_gram(part, cfg.bandwidth) : build_gram(part);
  });
}

ChangeTree binary_segment(const GramSummary& g, const SegmentConfig& cfg) {
  return segment(g.n(), cfg, [&](Index begin, Index end) { return g.sub(begin, end); });
}

}  // namespace gkcp
