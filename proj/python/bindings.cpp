#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gkcp/error.hpp"
#include "gkcp/fast_tests.hpp"
#include "gkcp/gram.hpp"
#include "gkcp/permutation.hpp"
#include "gkcp/scan.hpp"
#include "gkcp/segmentation.hpp"
#include "gkcp/sim.hpp"

namespace py = pybind11;
using namespace gkcp;

namespace {

ScanBounds bounds_for(Index n, Index n0, Index n1) {
  ScanBounds b = ScanBounds::defaults(n);
  if (n0 > 0) b.n0 = n0;
  b.n1 = n1 > 0 ? n1 : n - b.n0;
  b.validate(n);
  return b;
}

GramSummary make_gram(const RowMatrix& x, double bandwidth) {
  const Sequence seq(x);
  return bandwidth > 0.0 ? build_gram(seq, bandwidth) : build_gram(seq);
}

py::dict fast_dict(const FastTestReport& r) {
  const FastComponents& c = r.components;
  py::dict d;
  d["method"] = to_string(r.method);
  d["combine"] = to_string(r.combine);
  d["combined_p"] = r.combined_p;
  d["rejected"] = r.rejected;
  d["estimated_change"] = r.estimated_change;
  d["p_d"] = c.p_d;
  d["p_w12"] = c.p_w12;
  d["p_w08"] = c.p_w08;
  d["max_abs_z_d"] = c.max_abs_z_d;
  d["max_z_w12"] = c.max_z_w12;
  d["max_z_w08"] = c.max_z_w08;
  d["max_gkcp"] = c.max_gkcp;
  if (c.interval) {
    d["t1"] = c.argmax_t1;
    d["t2"] = c.argmax_t2;
  } else {
    d["argmax_t"] = c.argmax_t;
  }
  return d;
}

py::dict run_fast(const GramSummary& g, bool first, Index n0, Index n1, double alpha, bool skew,
                  const std::string& combine, bool interval) {
  FastTestConfig cfg;
  cfg.bounds = bounds_for(g.n(), n0, n1);
  cfg.alpha = alpha;
  cfg.skewness_correction = skew;
  cfg.interval = interval;
  Combine c = Combine::bonferroni;
  if (combine == "simes") {
    c = Combine::simes;
  } else if (combine != "bonferroni") {
    throw Error(ErrorCode::config, "combine must be 'bonferroni' or 'simes'");
  }
  return fast_dict(first ? fgkcp1(g, cfg, c) : fgkcp2(g, cfg, c));
}

PermStatistic parse_perm(const std::string& s) {
  for (PermStatistic p : {PermStatistic::gkcp_single, PermStatistic::gkcp_interval, PermStatistic::zd_single,
                          PermStatistic::zw_single, PermStatistic::zd_interval, PermStatistic::zw_interval}) {
    if (s == to_string(p)) return p;
  }
  throw Error(ErrorCode::config, "unknown permutation statistic '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kernel change-point detection (GKCP) core";

  static py::exception<Error> error_type(m, "GkcpError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<GramSummary>(m, "Gram")
      .def_static("from_kernel", [](Eigen::MatrixXd k) { return GramSummary::from_kernel(std::move(k)); },
                  py::arg("kernel"))
      .def_property_readonly("n", &GramSummary::n)
      .def_property_readonly("bandwidth", &GramSummary::bandwidth)
      .def_property_readonly("kernel", &GramSummary::k)
      .def_property_readonly("kbar", &GramSummary::kbar);

  m.def("median_heuristic", [](const RowMatrix& x) { return median_heuristic(x); }, py::arg("x"));
  m.def("build_gram", &make_gram, py::arg("x"), py::arg("bandwidth") = 0.0,
        "Gaussian kernel; bandwidth <= 0 selects the median heuristic.");

  m.def(
      "scan",
      [](const GramSummary& g, Index n0, Index n1, std::vector<double> r) {
        const ScanProfile p = scan_single(g, bounds_for(g.n(), n0, n1), r);
        Eigen::VectorXi t(p.size());
        for (Index i = 0; i < p.size(); ++i) t[i] = static_cast<int>(p.t_at(i));
        py::dict z_w;
        for (std::size_t i = 0; i < p.r_values.size(); ++i) z_w[py::float_(p.r_values[i])] = p.z_w[i];
        py::dict d;
        d["t"] = t;
        d["z_d"] = p.z_d;
        d["z_w"] = z_w;
        d["gkcp"] = p.gkcp;
        d["argmax_t"] = p.argmax_t;
        d["max_gkcp"] = p.max_gkcp;
        return d;
      },
      py::arg("gram"), py::arg("n0") = 0, py::arg("n1") = 0, py::arg("r") = default_r_values());

  m.def(
      "fgkcp1",
      [](const GramSummary& g, Index n0, Index n1, double alpha, bool skew, const std::string& combine,
         bool interval) { return run_fast(g, true, n0, n1, alpha, skew, combine, interval); },
      py::arg("gram"), py::arg("n0") = 0, py::arg("n1") = 0, py::arg("alpha") = 0.05, py::arg("skew") = true,
      py::arg("combine") = "bonferroni", py::arg("interval") = false);
  m.def(
      "fgkcp2",
      [](const GramSummary& g, Index n0, Index n1, double alpha, bool skew, const std::string& combine,
         bool interval) { return run_fast(g, false, n0, n1, alpha, skew, combine, interval); },
      py::arg("gram"), py::arg("n0") = 0, py::arg("n1") = 0, py::arg("alpha") = 0.05, py::arg("skew") = true,
      py::arg("combine") = "bonferroni", py::arg("interval") = false);

  m.def(
      "permutation_test",
      [](const GramSummary& g, std::size_t n_perm, std::uint64_t seed, const std::string& statistic, double r,
         Index n0, Index n1, unsigned threads) {
        PermConfig cfg;
        cfg.n_perm = n_perm;
        cfg.seed = seed;
        cfg.statistic = parse_perm(statistic);
        cfg.r = r;
        cfg.threads = threads;
        PermResult res;
        {
          py::gil_scoped_release release;
          res = perm_pvalue(g, cfg, bounds_for(g.n(), n0, n1));
        }
        py::dict d;
        d["p"] = res.p;
        d["observed"] = res.observed;
        d["draws"] = res.draws;
        return d;
      },
      py::arg("gram"), py::arg("n_perm") = 1000, py::arg("seed") = 0, py::arg("statistic") = "gkcp_single",
      py::arg("r") = 1.2, py::arg("n0") = 0, py::arg("n1") = 0, py::arg("threads") = 1);

  m.def(
      "segment",
      [](const RowMatrix& x, const std::string& test, double threshold, Index min_len, bool global_bandwidth,
         std::size_t n_perm, std::uint64_t seed) {
        SegmentConfig cfg;
        cfg.test.kind = test_kind_from_string(test);
        cfg.test.n_perm = n_perm;
        cfg.threshold = threshold;
        cfg.min_len = min_len;
        cfg.global_bandwidth = global_bandwidth;
        cfg.seed = seed;
        const ChangeTree tree = binary_segment(Sequence(x), cfg);
        py::list nodes;
        for (const ChangeNode& n : tree.nodes) {
          py::dict d;
          d["begin"] = n.begin;
          d["end"] = n.end;
          d["tested"] = n.tested;
          d["p"] = n.p;
          d["change"] = n.split ? py::object(py::int_(n.change)) : py::object(py::none());
          nodes.append(d);
        }
        py::dict d;
        d["change_points"] = tree.change_points;
        d["nodes"] = nodes;
        return d;
      },
      py::arg("x"), py::arg("test") = "fgkcp1", py::arg("threshold") = 0.001, py::arg("min_len") = 20,
      py::arg("global_bandwidth") = false, py::arg("n_perm") = 1000, py::arg("seed") = 0);

  m.def(
      "generate",
      [](const std::string& family, Index d, Index n, Index tau, double delta, double sigma2, double df,
         std::uint64_t seed) {
        GeneratorSpec s;
        s.family = family_from_string(family);
        s.d = d;
        s.n = n;
        s.tau = tau;
        s.delta = delta;
        s.sigma2 = sigma2;
        s.df = df;
        s.seed = seed;
        return RowMatrix(generate(s).values());
      },
      py::arg("family") = "gaussian_type1", py::arg("d") = 10, py::arg("n") = 200, py::arg("tau") = -1,
      py::arg("delta") = 0.0, py::arg("sigma2") = 1.0, py::arg("df") = 5.0, py::arg("seed") = 0);
}
