#pragma once

// Brute-force permutation-null oracle. Every quantity is computed from the
// raw kernel matrix by visiting each equally likely group assignment, so it
// shares no algebra with the library's closed forms.

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace gkcp::oracle {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double third = 0.0;  // third central moment
};

inline Moments moments_of(const std::vector<double>& xs) {
  Moments m;
  const double cnt = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= cnt;
  for (double x : xs) {
    const double c = x - m.mean;
    m.var += c * c;
    m.third += c * c * c;
  }
  m.var /= cnt;
  m.third /= cnt;
  return m;
}

inline double covariance_of(const std::vector<double>& xs, const std::vector<double>& ys) {
  const Moments mx = moments_of(xs), my = moments_of(ys);
  double c = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) c += (xs[i] - mx.mean) * (ys[i] - my.mean);
  return c / static_cast<double>(xs.size());
}

// Calls f(labels) for every assignment of `sizes[c]` positions to label c.
inline void for_each_labeling(int n, const std::vector<int>& sizes,
                              const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> left = sizes;
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      f(labels);
      return;
    }
    for (std::size_t c = 0; c < left.size(); ++c) {
      if (left[c] == 0) continue;
      --left[c];
      labels[static_cast<std::size_t>(pos)] = static_cast<int>(c);
      rec(pos + 1);
      ++left[c];
    }
  };
  rec(0);
}

struct SplitValues {
  double sa = 0.0, sb = 0.0, cross = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double d = 0.0, w = 0.0;
};

// Group A = positions with in_a[i] true, |A| = t.
inline SplitValues split_values(const Eigen::MatrixXd& k, const std::vector<bool>& in_a, double r) {
  const int n = static_cast<int>(k.rows());
  int t = 0;
  for (bool b : in_a) t += b ? 1 : 0;
  SplitValues v;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (in_a[i] && in_a[j]) v.sa += k(i, j);
      else if (!in_a[i] && !in_a[j]) v.sb += k(i, j);
      else if (in_a[i]) v.cross += k(i, j);
    }
  }
  const double td = t, nd = n, sd = nd - td;
  v.alpha = v.sa / (td * (td - 1.0));
  v.beta = v.sb / (sd * (sd - 1.0));
  v.gamma = v.cross / (td * sd);
  v.d = v.sa - v.sb;
  v.w = (r * (sd - 1.0) * v.sa + (td - 1.0) * v.sb) / (nd - 2.0);
  return v;
}

struct SplitOracle {
  Moments alpha, beta, d, w;
  double cov_ab = 0.0;
};

inline SplitOracle split_oracle(const Eigen::MatrixXd& k, int t, double r) {
  const int n = static_cast<int>(k.rows());
  std::vector<double> a, b, d, w;
  for_each_labeling(n, {t, n - t}, [&](const std::vector<int>& lab) {
    std::vector<bool> in_a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) in_a[i] = lab[i] == 0;
    const SplitValues v = split_values(k, in_a, r);
    a.push_back(v.alpha);
    b.push_back(v.beta);
    d.push_back(v.d);
    w.push_back(v.w);
  });
  return {moments_of(a), moments_of(b), moments_of(d), moments_of(w), covariance_of(a, b)};
}

struct CrossOracle {
  double rho_d = 0.0;
  double rho_w = 0.0;
};

// Nested groups: A_s = label 0, A_t = labels 0 and 1.
inline CrossOracle cross_oracle(const Eigen::MatrixXd& k, int s, int t, double r) {
  const int n = static_cast<int>(k.rows());
  std::vector<double> ds, dt, ws, wt;
  for_each_labeling(n, {s, t - s, n - t}, [&](const std::vector<int>& lab) {
    std::vector<bool> in_s(static_cast<std::size_t>(n)), in_t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      in_s[i] = lab[i] == 0;
      in_t[i] = lab[i] <= 1;
    }
    const SplitValues vs = split_values(k, in_s, r), vt = split_values(k, in_t, r);
    ds.push_back(vs.d);
    dt.push_back(vt.d);
    ws.push_back(vs.w);
    wt.push_back(vt.w);
  });
  const auto corr = [](const std::vector<double>& x, const std::vector<double>& y) {
    return covariance_of(x, y) / std::sqrt(moments_of(x).var * moments_of(y).var);
  };
  return {corr(ds, dt), corr(ws, wt)};
}

// Symmetric matrix with off-diagonal entries uniform on [0, 1) and unit
// diagonal; a generic similarity matrix rather than a Gaussian gram.
inline Eigen::MatrixXd random_kernel(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      k(i, j) = k(j, i) = u(rng);
    }
  }
  return k;
}

}  // namespace gkcp::oracle
