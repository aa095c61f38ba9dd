#include "gkcp/gram.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gkcp/error.hpp"
#include "gkcp/numeric.hpp"

namespace gkcp {
namespace {

// Upper-triangle squared distances, written into both halves of `out`.
Eigen::MatrixXd squared_distances(const RowMatrix& rows) {
  const Index n = rows.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double d2 = (rows.row(i) - rows.row(j)).squaredNorm();
      out(i, j) = d2;
      out(j, i) = d2;
    }
  }
  return out;
}

double median_from_squared(const Eigen::MatrixXd& d2) {
  const Index n = d2.rows();
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) dist.push_back(std::sqrt(d2(i, j)));
  }
  const std::size_t m = dist.size();
  const auto upper = dist.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(dist.begin(), upper, dist.end());
  double med = *upper;
  if (m % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), upper);
    med = 0.5 * (lower + med);
  }
  if (!(med > 0.0)) {
    throw Error(ErrorCode::all_points_identical,
                "median pairwise distance is zero; the median heuristic is undefined");
  }
  return med;
}

}  // namespace

double median_heuristic(const RowMatrix& rows) {
  if (rows.rows() < 2) {
    throw Error(ErrorCode::invalid_argument, "median heuristic needs at least two rows");
  }
  return median_from_squared(squared_distances(rows));
}

double median_heuristic(const Sequence& seq) { return median_heuristic(seq.values()); }

GramSummary GramSummary::from_kernel(Eigen::MatrixXd k, double bandwidth) {
  const Index n = k.rows();
  if (k.cols() != n) {
    throw Error(ErrorCode::invalid_argument, "kernel matrix must be square");
  }
  if (n < 4) {
    throw Error(ErrorCode::invalid_argument,
                "kernel matrix needs at least 4 rows, got " + std::to_string(n));
  }
  double scale = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i != j && !std::isfinite(k(i, j))) {
        throw Error(ErrorCode::non_finite_kernel,
                    "non-finite kernel entry at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      scale = std::max(scale, std::abs(k(i, j)));
    }
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (std::abs(k(i, j) - k(j, i)) > 1e-12 * std::max(1.0, scale)) {
        throw Error(ErrorCode::invalid_argument, "kernel matrix is not symmetric");
      }
    }
  }

  GramSummary g;
  g.bandwidth_ = bandwidth;

  g.rowsum_.resize(n);
  CompensatedSum r0, r1, rowsq;
  for (Index j = 0; j < n; ++j) {
    CompensatedSum col;
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      col += k(i, j);
      r1 += k(i, j) * k(i, j);
    }
    g.rowsum_[j] = col.value();
    r0 += g.rowsum_[j];
    rowsq += g.rowsum_[j] * g.rowsum_[j];
  }
  const double nd = static_cast<double>(n);
  g.r0_ = r0.value();
  g.r1_ = r1.value();
  g.r2_ = rowsq.value() - g.r1_;
  g.r3_ = g.r0_ * g.r0_ - 2.0 * g.r1_ - 4.0 * g.r2_;
  g.kbar_ = g.r0_ / (nd * (nd - 1.0));
  g.ktilde_rowsum_ = g.rowsum_.array() - (nd - 1.0) * g.kbar_;

  CenteredAggregates& c = g.centered_;
  const Eigen::VectorXd h = g.ktilde_rowsum_ / (nd - 2.0);
  CompensatedSum m2, m3;
  for (Index i = 0; i < n; ++i) {
    m2 += h[i] * h[i];
    m3 += h[i] * h[i] * h[i];
  }
  c.m2 = m2.value();
  c.m3 = m3.value();

  Eigen::MatrixXd e(n, n);
  CompensatedSum q, t3, b1, g1, r1c, rowc;
  for (Index j = 0; j < n; ++j) {
    CompensatedSum qj;
    for (Index i = 0; i < n; ++i) {
      if (i == j) {
        e(i, j) = 0.0;
        continue;
      }
      const double kt = k(i, j) - g.kbar_;
      const double eij = kt - h[i] - h[j];
      e(i, j) = eij;
      r1c += kt * kt;
      qj += eij * eij;
      t3 += eij * eij * eij;
      b1 += h[i] * eij * h[j];
    }
    q += qj.value();
    g1 += h[j] * qj.value();
    rowc += g.ktilde_rowsum_[j] * g.ktilde_rowsum_[j];
  }
  c.q = q.value();
  c.t3 = t3.value();
  c.b1 = b1.value();
  c.g1 = g1.value();
  c.r1 = r1c.value();
  c.r2 = rowc.value() - c.r1;

  // trace(e^3) = sum_ij e_ij (e^2)_ij; e is symmetric so e^2 = e e^T.
  Eigen::MatrixXd e2 = Eigen::MatrixXd::Zero(n, n);
  e2.selfadjointView<Eigen::Lower>().rankUpdate(e);
  CompensatedSum tri;
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) tri += e(i, j) * e2(i, j);
  }
  c.tri = 2.0 * tri.value();

  g.k_ = std::move(k);
  return g;
}

GramSummary GramSummary::sub(Index begin, Index end) const {
  if (begin < 0 || end > n() || end - begin < 4) {
    throw Error(ErrorCode::invalid_argument, "invalid kernel sub-block");
  }
  const Index m = end - begin;
  return from_kernel(k_.block(begin, begin, m, m), bandwidth_);
}

namespace {

GramSummary gaussian_from_squared(const Eigen::MatrixXd& d2, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw Error(ErrorCode::invalid_argument, "bandwidth must be a positive finite number");
  }
  const double scale = -1.0 / (2.0 * bandwidth * bandwidth);
  Eigen::MatrixXd k = (d2.array() * scale).exp().matrix();
  k.diagonal().setOnes();
  return GramSummary::from_kernel(std::move(k), bandwidth);
}

}  // namespace

GramSummary build_gram(const Sequence& seq, double bandwidth) {
  return gaussian_from_squared(squared_distances(seq.values()), bandwidth);
}

GramSummary build_gram(const Sequence& seq) {
  const Eigen::MatrixXd d2 = squared_distances(seq.values());
  return gaussian_from_squared(d2, median_from_squared(d2));
}

}  // namespace gkcp
