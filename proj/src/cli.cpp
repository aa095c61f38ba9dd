#include "gkcp/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "gkcp/error.hpp"
#include "gkcp/io.hpp"

namespace gkcp {
namespace {

using nlohmann::json;

constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kTestStream = 1;

struct GenOptions {
  std::string family = "gaussian_type1";
  Index d = 10;
  Index n = 200;
  Index tau = -1;
  double delta = 0.0;
  double sigma2 = 1.0;
  double df = 5.0;

  GeneratorSpec spec(std::uint64_t seed) const {
    GeneratorSpec s;
    s.family = family_from_string(family);
    s.d = d;
    s.n = n;
    s.tau = tau;
    s.delta = delta;
    s.sigma2 = sigma2;
    s.df = df;
    s.seed = seed;
    s.validate();
    return s;
  }
};

struct InputOptions {
  std::string input, gram_path;
  bool gen = false;
  bool skip_header = false;
  double bandwidth = 0.0;
};

struct TestOptions {
  std::string test = "fgkcp1";
  std::string combine = "bonferroni";
  bool interval = false;
  double n0 = 0.0, n1 = 0.0;
  double alpha = 0.05;
  std::size_t n_perm = 1000;
  std::string derivative = "exact-discrete";
  bool no_skew = false;
  std::vector<double> r_values{1.2, 0.8};
  unsigned threads = 1;
};

struct Common {
  std::uint64_t seed = 1;
  std::string output;
};

void add_gen_options(CLI::App* app, GenOptions& g) {
  app->add_option("--family", g.family, "gaussian_type1|gaussian_type2|chi_square|log_normal|multivariate_t")
      ->capture_default_str();
  app->add_option("--d", g.d, "dimension")->capture_default_str();
  app->add_option("--n", g.n, "sequence length")->capture_default_str();
  app->add_option("--tau", g.tau, "rows before the change (-1: n/2, n: none)")->capture_default_str();
  app->add_option("--delta", g.delta, "norm of the mean shift")->capture_default_str();
  app->add_option("--sigma2", g.sigma2, "variance multiplier after the change")->capture_default_str();
  app->add_option("--df", g.df, "degrees of freedom (multivariate_t)")->capture_default_str();
}

void add_input_options(CLI::App* app, InputOptions& in, GenOptions& g) {
  auto* csv = app->add_option("--input,-i", in.input, "CSV file, one observation per row");
  auto* gram = app->add_option("--gram", in.gram_path, "CSV file holding a precomputed kernel matrix");
  auto* gen = app->add_flag("--gen", in.gen, "generate the data from the generator options");
  csv->excludes(gram)->excludes(gen);
  gram->excludes(gen);
  app->add_flag("--skip-header", in.skip_header, "ignore the first non-blank line of the CSV");
  app->add_option("--bandwidth", in.bandwidth, "Gaussian kernel bandwidth (default: median heuristic)")
      ->check(CLI::PositiveNumber);
  add_gen_options(app, g);
}

void add_test_options(CLI::App* app, TestOptions& t) {
  app->add_option("--test", t.test, "gkcp|fgkcp1|fgkcp2")->capture_default_str();
  app->add_option("--combine", t.combine, "bonferroni|simes (fast tests)")->capture_default_str();
  app->add_flag("--interval", t.interval, "changed-interval alternative");
  app->add_option("--n0", t.n0, "smallest group size, absolute or fraction of n (default 0.05 n)");
  app->add_option("--n1", t.n1, "largest group size, absolute or fraction of n (default n - n0)");
  app->add_option("--alpha", t.alpha, "significance level")->capture_default_str();
  app->add_option("--n-perm", t.n_perm, "permutations for the gkcp test")->capture_default_str();
  app->add_option("--derivative", t.derivative, "exact-discrete|asymptotic")->capture_default_str();
  app->add_flag("--no-skew", t.no_skew, "disable the skewness correction");
  app->add_option("--r", t.r_values, "r values reported for Z_W,r")->delimiter(',')->capture_default_str();
  app->add_option("--threads", t.threads, "worker threads (0: all cores)")->capture_default_str();
}

void add_common(CLI::App* app, Common& c, bool output = true) {
  app->add_option("--seed", c.seed, "master seed")->capture_default_str();
  if (output) app->add_option("--output,-o", c.output, "report path (default: stdout)");
}

Index resolve_size(double v, Index n, Index fallback, const char* name) {
  if (v == 0.0) return fallback;
  if (v > 0.0 && v < 1.0) return static_cast<Index>(std::floor(v * static_cast<double>(n)));
  if (v >= 1.0 && v == std::floor(v)) return static_cast<Index>(v);
  throw Error(ErrorCode::config, std::string(name) + " must be a positive integer or a fraction in (0, 1)");
}

ScanBounds resolve_bounds(const TestOptions& t, Index n) {
  ScanBounds b = ScanBounds::defaults(n);
  b.n0 = resolve_size(t.n0, n, b.n0, "--n0");
  b.n1 = resolve_size(t.n1, n, n - b.n0, "--n1");
  try {
    b.validate(n);
  } catch (const Error& e) {
    throw Error(ErrorCode::config, e.what());
  }
  return b;
}

DerivativeMode parse_derivative(const std::string& s) {
  if (s == "exact-discrete") return DerivativeMode::exact_discrete;
  if (s == "asymptotic") return DerivativeMode::asymptotic;
  throw Error(ErrorCode::config, "unknown derivative mode '" + s + "'");
}

Combine parse_combine(const std::string& s) {
  if (s == "bonferroni") return Combine::bonferroni;
  if (s == "simes") return Combine::simes;
  throw Error(ErrorCode::config, "unknown combination rule '" + s + "'");
}

TestKind parse_test(const TestOptions& t) {
  const TestKind k = test_kind_from_string(t.test);
  if (k == TestKind::fgkcp1_simes || k == TestKind::fgkcp2_simes) return k;
  const bool simes = parse_combine(t.combine) == Combine::simes;
  if (k == TestKind::fgkcp1 && simes) return TestKind::fgkcp1_simes;
  if (k == TestKind::fgkcp2 && simes) return TestKind::fgkcp2_simes;
  return k;
}

TestSpec make_test_spec(const TestOptions& t, ScanBounds bounds) {
  TestSpec s;
  s.kind = parse_test(t);
  s.alpha = t.alpha;
  s.bounds = bounds;
  s.n_perm = t.n_perm;
  s.skewness_correction = !t.no_skew;
  s.derivative_mode = parse_derivative(t.derivative);
  s.perm_threads = t.threads;
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw Error(ErrorCode::config, "--alpha must lie in (0, 1]");
  if (s.kind == TestKind::gkcp && s.n_perm < 1) throw Error(ErrorCode::config, "--n-perm must be at least 1");
  return s;
}

struct LoadedData {
  std::optional<Sequence> seq;
  std::optional<GramSummary> gram;
  json source;
};

LoadedData load(const InputOptions& in, const GenOptions& gen, std::uint64_t seed, bool need_gram) {
  LoadedData out;
  if (in.gram_path.empty() && in.input.empty() && !in.gen) {
    throw Error(ErrorCode::config, "one of --input, --gram or --gen is required");
  }
  if (in.gen) {
    const GeneratorSpec spec = gen.spec(mix_seed(seed, kDataStream));
    out.seq = generate(spec);
    out.source = {{"generator", to_json(spec)}};
  } else {
    try {
      if (!in.gram_path.empty()) {
        Eigen::MatrixXd k = read_csv_file(in.gram_path, in.skip_header);
        out.gram = GramSummary::from_kernel(std::move(k));
        out.source = {{"gram", in.gram_path}};
      } else {
        out.seq.emplace(read_csv_file(in.input, in.skip_header));
        out.source = {{"input", in.input}};
      }
    } catch (const Error& e) {
      throw Error(e.code() == ErrorCode::config ? ErrorCode::config : ErrorCode::data_format, e.what());
    }
  }
  if (need_gram && !out.gram) {
    out.gram = in.bandwidth > 0.0 ? build_gram(*out.seq, in.bandwidth) : build_gram(*out.seq);
  }
  out.source["skip_header"] = in.skip_header;
  if (out.gram) {
    out.source["n"] = out.gram->n();
    out.source["bandwidth"] = out.gram->bandwidth();
  }
  if (out.seq) out.source["d"] = out.seq->d();
  return out;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

json run_test_command(const InputOptions& in, const GenOptions& gen, const TestOptions& t, const Common& c,
                      const std::string& curve_path, std::ostream& out) {
  LoadedData data = load(in, gen, c.seed, true);
  const GramSummary& g = *data.gram;
  const ScanBounds bounds = resolve_bounds(t, g.n());
  const TestSpec spec = make_test_spec(t, bounds);
  const std::uint64_t test_seed = mix_seed(c.seed, kTestStream);

  json config = to_json(spec);
  config["interval"] = t.interval;
  config["r_values"] = t.r_values;
  config["seed"] = c.seed;
  config["threads"] = t.threads;
  config["data"] = data.source;

  json result;
  if (spec.kind == TestKind::gkcp) {
    PermConfig pc;
    pc.n_perm = spec.n_perm;
    pc.seed = test_seed;
    pc.statistic = t.interval ? PermStatistic::gkcp_interval : PermStatistic::gkcp_single;
    pc.threads = t.threads;
    const PermResult pr = perm_pvalue(g, pc, bounds);
    result = to_json(pr);
    result["rejected"] = pr.p < spec.alpha;
    if (t.interval) {
      const IntervalScanProfile ip = interval_maxima(ScanPlan(g, bounds, {1.0}));
      result["estimated_t1"] = pr.p < spec.alpha ? ip.argmax_t1 : Index{-1};
      result["estimated_t2"] = pr.p < spec.alpha ? ip.argmax_t2 : Index{-1};
      result["argmax_t1"] = ip.argmax_t1;
      result["argmax_t2"] = ip.argmax_t2;
    } else {
      const ScanMaxima m = scan_maxima(ScanPlan(g, bounds, {1.0}));
      result["estimated_change"] = pr.p < spec.alpha ? m.argmax_t : Index{-1};
      result["argmax_t"] = m.argmax_t;
    }
  } else {
    FastTestConfig fc;
    fc.bounds = bounds;
    fc.alpha = spec.alpha;
    fc.skewness_correction = spec.skewness_correction;
    fc.derivative_mode = spec.derivative_mode;
    fc.interval = t.interval;
    const bool one = spec.kind == TestKind::fgkcp1 || spec.kind == TestKind::fgkcp1_simes;
    const Combine combine =
        spec.kind == TestKind::fgkcp1_simes || spec.kind == TestKind::fgkcp2_simes ? Combine::simes : Combine::bonferroni;
    result = to_json(one ? fgkcp1(g, fc, combine) : fgkcp2(g, fc, combine));
  }

  // Single-change analytic p-values for every requested r.
  if (!t.interval) {
    std::vector<double> rs{1.0};
    rs.insert(rs.end(), t.r_values.begin(), t.r_values.end());
    const ScanProfile profile = scan_single(g, bounds, rs);
    json zw = json::array();
    for (double r : t.r_values) {
      if (!(r > 0.0)) throw Error(ErrorCode::config, "--r values must be positive");
      const TailModel model(g, {bounds, r, spec.skewness_correction, spec.derivative_mode});
      const double m = profile.max_z_w(r);
      zw.push_back({{"r", r}, {"max", m}, {"p", pval_single_zw(model, m).p()}});
    }
    result["z_w"] = std::move(zw);
    if (!curve_path.empty()) {
      const ScanProfile curve = scan_single(g, bounds, default_r_values());
      write_file_atomic(curve_path, scan_curve_csv(curve));
    }
  } else if (!curve_path.empty()) {
    throw Error(ErrorCode::config, "--curve is only available for the single change-point scan");
  }
  const json report = make_report("test", std::move(config), std::move(result));
  emit(c.output, report.dump(2) + "\n", out);
  return report;
}

void run_segment_command(const InputOptions& in, const GenOptions& gen, const TestOptions& t, const Common& c,
                         double threshold, Index min_len, bool global_bw, std::ostream& out) {
  LoadedData data = load(in, gen, c.seed, false);
  SegmentConfig cfg;
  cfg.test = make_test_spec(t, {});
  cfg.threshold = threshold;
  cfg.min_len = min_len;
  cfg.global_bandwidth = global_bw;
  cfg.bandwidth = in.bandwidth;
  cfg.seed = mix_seed(c.seed, kTestStream);
  const ChangeTree tree = data.gram ? binary_segment(*data.gram, cfg) : binary_segment(*data.seq, cfg);
  json config = to_json(cfg.test);
  config.erase("bounds");
  config["threshold"] = threshold;
  config["min_len"] = min_len;
  config["global_bandwidth"] = global_bw || data.gram.has_value();
  config["bandwidth"] = in.bandwidth;
  config["seed"] = c.seed;
  config["data"] = data.source;
  emit(c.output, make_report("segment", std::move(config), to_json(tree)).dump(2) + "\n", out);
}

struct BenchOptions {
  std::size_t replicates = 100;
  std::string jsonl, summary;
  unsigned threads = 1;
  // critical
  std::vector<std::string> stats{"zd", "zw12", "zw08"};
  std::vector<Index> n0_grid{100, 75, 50, 25};
  double level = 0.05;
  // runtime
  std::vector<Index> n_grid{200, 400, 600, 800, 1000, 2000};
  std::vector<std::string> tests{"fgkcp1", "fgkcp2", "gkcp"};
  std::size_t repeats = 10;
};

CriticalStatistic parse_stat(const std::string& s) {
  if (s == "zd") return CriticalStatistic::zd;
  if (s == "zw12") return CriticalStatistic::zw12;
  if (s == "zw08") return CriticalStatistic::zw08;
  throw Error(ErrorCode::config, "unknown statistic '" + s + "' (zd|zw12|zw08)");
}

std::string csv_number(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void run_bench_power(bool size, const GenOptions& gen, const TestOptions& t, const Common& c, const BenchOptions& b,
                     std::ostream& out) {
  const GeneratorSpec spec = gen.spec(0);
  const TestSpec test = make_test_spec(t, t.n0 == 0.0 && t.n1 == 0.0 ? ScanBounds{} : resolve_bounds(t, spec.n));
  const ExperimentResult r = size ? size_study(spec, test, b.replicates, c.seed, b.threads)
                                  : power_study(spec, test, b.replicates, c.seed, b.threads);
  if (!b.jsonl.empty()) {
    std::string lines;
    for (const ReplicateRecord& rec : r.records) lines += to_json(rec).dump() + "\n";
    write_file_atomic(b.jsonl, lines);
  }
  if (!b.summary.empty()) {
    std::ostringstream s;
    s << "family,d,n,tau,delta,sigma2,test,replicates,rejections,accurate,cell,rate\n"
      << to_string(r.spec.family) << ',' << r.spec.d << ',' << r.spec.n << ',' << r.spec.resolved_tau() << ','
      << csv_number(r.spec.delta) << ',' << csv_number(r.spec.sigma2) << ',' << to_string(r.test.kind) << ','
      << r.replicates << ',' << r.rejections << ',' << r.accurate << ",\"" << power_cell(r) << "\","
      << csv_number(r.rate()) << '\n';
    write_file_atomic(b.summary, s.str());
  }
  json config = {{"study", size ? "size" : "power"}, {"replicates", b.replicates}, {"seed", c.seed},
                 {"threads", b.threads}};
  emit(c.output, make_report(size ? "bench.size" : "bench.power", std::move(config), to_json(r)).dump(2) + "\n",
       out);
}

void run_bench_critical(const GenOptions& gen, const TestOptions& t, const Common& c, const BenchOptions& b,
                        std::ostream& out) {
  const GeneratorSpec spec = gen.spec(mix_seed(c.seed, kDataStream));
  std::vector<CriticalStatistic> stats;
  for (const std::string& s : b.stats) stats.push_back(parse_stat(s));
  if (t.n_perm < 1) throw Error(ErrorCode::config, "--n-perm must be at least 1");
  std::vector<CriticalValueRow> rows;
  try {
    rows = critical_value_study(spec, stats, b.n0_grid, t.n_perm, mix_seed(c.seed, kTestStream), b.level, b.threads);
  } catch (const Error& e) {
    throw Error(e.code() == ErrorCode::invalid_argument ? ErrorCode::config : e.code(), e.what());
  }
  json result = json::array();
  std::ostringstream csv;
  csv << "statistic,n0,analytic,analytic_no_skew,permutation\n";
  std::string lines;
  for (const CriticalValueRow& row : rows) {
    result.push_back(to_json(row));
    lines += to_json(row).dump() + "\n";
    csv << to_string(row.statistic) << ',' << row.n0 << ',' << csv_number(row.analytic) << ','
        << csv_number(row.analytic_no_skew) << ',' << csv_number(row.permutation) << '\n';
  }
  if (!b.jsonl.empty()) write_file_atomic(b.jsonl, lines);
  if (!b.summary.empty()) write_file_atomic(b.summary, csv.str());
  json config = {{"study", "critical"}, {"generator", to_json(spec)}, {"n_perm", t.n_perm},
                 {"level", b.level},    {"n0_grid", b.n0_grid},      {"seed", c.seed}};
  emit(c.output, make_report("bench.critical", std::move(config), std::move(result)).dump(2) + "\n", out);
}

void run_bench_runtime(const GenOptions& gen, const TestOptions& t, const Common& c, const BenchOptions& b,
                       std::ostream& out) {
  std::vector<TestSpec> tests;
  for (const std::string& name : b.tests) {
    TestOptions o = t;
    o.test = name;
    tests.push_back(make_test_spec(o, {}));
  }
  const std::vector<RuntimeRow> rows = runtime_study(b.n_grid, gen.d, tests, b.repeats, c.seed);
  json result = json::array();
  std::string lines;
  std::map<std::string, std::map<Index, double>> table;
  for (const RuntimeRow& row : rows) {
    result.push_back(to_json(row));
    lines += to_json(row).dump() + "\n";
    table[to_string(row.test)][row.n] = row.mean_seconds;
  }
  if (!b.jsonl.empty()) write_file_atomic(b.jsonl, lines);
  if (!b.summary.empty()) {
    std::ostringstream csv;
    csv << "test";
    for (Index n : b.n_grid) csv << ",n=" << n;
    csv << '\n';
    for (const std::string& name : b.tests) {
      csv << name;
      for (Index n : b.n_grid) csv << ',' << csv_number(table[to_string(test_kind_from_string(name))][n]);
      csv << '\n';
    }
    write_file_atomic(b.summary, csv.str());
  }
  json config = {{"study", "runtime"}, {"d", gen.d}, {"n_grid", b.n_grid}, {"tests", b.tests},
                 {"repeats", b.repeats}, {"n_perm", t.n_perm}, {"seed", c.seed}};
  emit(c.output, make_report("bench.runtime", std::move(config), std::move(result)).dump(2) + "\n", out);
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::data_format:
    case ErrorCode::all_points_identical:
    case ErrorCode::non_finite_kernel:
    case ErrorCode::degenerate_split:
    case ErrorCode::zero_variance:
      return kExitDataError;
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_spec:
    case ErrorCode::config:
      return kExitConfigError;
  }
  return kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel change-point detection with analytic and permutation p-values", "gkcp"};
  app.require_subcommand(1);

  InputOptions in;
  GenOptions gen;
  TestOptions topt;
  Common common;
  std::string curve;
  double threshold = 0.001;
  Index min_len = 20;
  bool global_bw = false;
  BenchOptions bench;

  CLI::App* test = app.add_subcommand("test", "test one sequence for a change point or changed interval");
  add_input_options(test, in, gen);
  add_test_options(test, topt);
  add_common(test, common);
  test->add_option("--curve", curve, "write the per-t scan curve CSV here");

  CLI::App* seg = app.add_subcommand("segment", "recursive binary segmentation");
  add_input_options(seg, in, gen);
  add_test_options(seg, topt);
  add_common(seg, common);
  seg->add_option("--threshold", threshold, "split while p < threshold")->capture_default_str();
  seg->add_option("--min-len", min_len, "shortest segment that is tested")->capture_default_str();
  seg->add_flag("--global-bandwidth", global_bw, "build one kernel on the full data");

  CLI::App* bench_app = app.add_subcommand("bench", "simulation studies");
  bench_app->require_subcommand(1);
  CLI::App* power = bench_app->add_subcommand("power", "rejection and localization counts");
  CLI::App* size = bench_app->add_subcommand("size", "empirical size under no change");
  CLI::App* critical = bench_app->add_subcommand("critical", "analytic vs permutation critical values");
  CLI::App* runtime = bench_app->add_subcommand("runtime", "wall-clock per test and n");
  for (CLI::App* sub : {power, size, critical, runtime}) {
    add_gen_options(sub, gen);
    add_common(sub, common);
    sub->add_option("--jsonl", bench.jsonl, "one JSON record per replicate or row");
    sub->add_option("--summary", bench.summary, "summary CSV");
  }
  for (CLI::App* sub : {power, size}) {
    add_test_options(sub, topt);
    sub->add_option("--replicates", bench.replicates, "number of simulated sequences")->capture_default_str();
    sub->add_option("--jobs", bench.threads, "replicates run in parallel (0: all cores)")->capture_default_str();
  }
  critical->add_option("--stat", bench.stats, "zd|zw12|zw08")->delimiter(',')->capture_default_str();
  critical->add_option("--n0-grid", bench.n0_grid, "bounds [n0, n - n0] to evaluate")->delimiter(',')->capture_default_str();
  critical->add_option("--level", bench.level, "tail level")->capture_default_str();
  critical->add_option("--n-perm", topt.n_perm, "permutations")->capture_default_str();
  critical->add_option("--threads", bench.threads, "worker threads (0: all cores)")->capture_default_str();
  runtime->add_option("--n-grid", bench.n_grid, "sequence lengths")->delimiter(',')->capture_default_str();
  runtime->add_option("--tests", bench.tests, "tests to time")->delimiter(',')->capture_default_str();
  runtime->add_option("--repeats", bench.repeats, "runs averaged per cell")->capture_default_str();
  runtime->add_option("--n-perm", topt.n_perm, "permutations for gkcp")->capture_default_str();

  CLI::App* gen_app = app.add_subcommand("gen", "write a synthetic sequence as CSV");
  add_gen_options(gen_app, gen);
  add_common(gen_app, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (test->parsed()) {
      run_test_command(in, gen, topt, common, curve, out);
    } else if (seg->parsed()) {
      run_segment_command(in, gen, topt, common, threshold, min_len, global_bw, out);
    } else if (power->parsed() || size->parsed()) {
      if (size->parsed() && !size->count("--replicates")) bench.replicates = 500;
      run_bench_power(size->parsed(), gen, topt, common, bench, out);
    } else if (critical->parsed()) {
      if (!critical->count("--n-perm")) topt.n_perm = 2000;
      if (!critical->count("--n")) gen.n = 1000;
      if (!critical->count("--d")) gen.d = 100;
      run_bench_critical(gen, topt, common, bench, out);
    } else if (runtime->parsed()) {
      if (!runtime->count("--d")) gen.d = 100;
      run_bench_runtime(gen, topt, common, bench, out);
    } else if (gen_app->parsed()) {
      const Sequence seq = generate(gen.spec(mix_seed(common.seed, kDataStream)));
      std::ostringstream csv;
      write_csv(csv, seq.values());
      emit(common.output, csv.str(), out);
    }
  } catch (const Error& e) {
    err << "gkcp: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "gkcp: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "gkcp: internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace gkcp
