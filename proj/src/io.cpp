#include "gkcp/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "gkcp/error.hpp"

namespace gkcp {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void data_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::data_format, "line " + std::to_string(line) + ": " + what);
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  cell = trim(cell);
  if (cell.empty()) data_error(line, "empty cell in column " + std::to_string(column));
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    data_error(line, "non-numeric cell '" + std::string(cell) + "' in column " + std::to_string(column));
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RowMatrix read_csv(std::istream& in, bool skip_header) {
  std::vector<double> cells;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string line;
  bool header_pending = skip_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(parse_cell(rest.substr(0, comma), line_no, count + 1));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      data_error(line_no, "expected " + std::to_string(cols) + " columns, found " + std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::data_format, "no data rows");
  RowMatrix out(static_cast<Index>(rows), static_cast<Index>(cols));
  std::copy(cells.begin(), cells.end(), out.data());
  return out;
}

RowMatrix read_csv_file(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::data_format, "cannot open '" + path + "'");
  try {
    return read_csv(in, skip_header);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_csv(std::ostream& out, const RowMatrix& values) {
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::config, "cannot write '" + path + "'");
    out << contents;
    if (!out.flush()) throw Error(ErrorCode::config, "cannot write '" + path + "'");
  }
  std::filesystem::rename(tmp, target);
}

std::string scan_curve_csv(const ScanProfile& p) {
  const Eigen::VectorXd& w12 = p.z_w_for(1.2);
  const Eigen::VectorXd& w08 = p.z_w_for(0.8);
  std::ostringstream out;
  out << "t,Z_D,Z_W12,Z_W08,GKCP\n";
  for (Index i = 0; i < p.size(); ++i) {
    out << p.t_at(i) << ',' << format_double(p.z_d[i]) << ',' << format_double(w12[i]) << ','
        << format_double(w08[i]) << ',' << format_double(p.gkcp[i]) << '\n';
  }
  return out.str();
}

json to_json(const ScanBounds& b) { return {{"n0", b.n0}, {"n1", b.n1}}; }

json to_json(const GeneratorSpec& s) {
  return {{"family", to_string(s.family)}, {"d", s.d},           {"n", s.n},
          {"tau", s.resolved_tau()},      {"delta", s.delta},   {"sigma2", s.sigma2},
          {"df", s.df},                   {"seed", s.seed}};
}

json to_json(const TestSpec& t) {
  return {{"test", to_string(t.kind)},
          {"alpha", t.alpha},
          {"bounds", to_json(t.bounds)},
          {"n_perm", t.n_perm},
          {"skewness_correction", t.skewness_correction},
          {"derivative_mode", to_string(t.derivative_mode)}};
}

json to_json(const FastComponents& c) {
  json j = {{"interval", c.interval}, {"max_abs_z_d", c.max_abs_z_d}, {"max_z_w12", c.max_z_w12},
            {"max_z_w08", c.max_z_w08}, {"p_d", c.p_d},                 {"p_w12", c.p_w12},
            {"p_w08", c.p_w08},       {"max_gkcp", c.max_gkcp}};
  if (c.interval) {
    j["argmax_t1"] = c.argmax_t1;
    j["argmax_t2"] = c.argmax_t2;
  } else {
    j["argmax_t"] = c.argmax_t;
  }
  return j;
}

json to_json(const FastTestReport& r) {
  json j = {{"method", to_string(r.method)},
            {"combine", to_string(r.combine)},
            {"components", to_json(r.components)},
            {"combined_p", r.combined_p},
            {"rejected", r.rejected},
            {"estimated_change", r.estimated_change}};
  if (r.components.interval) {
    j["estimated_t1"] = r.estimated_t1;
    j["estimated_t2"] = r.estimated_t2;
  }
  return j;
}

json to_json(const PermResult& r) {
  return {{"p", r.p}, {"observed", r.observed}, {"n_perm", r.draws.size()}};
}

json to_json(const ReplicateRecord& r) {
  return {{"replicate", r.index},         {"seed", r.seed},         {"p", r.outcome.p},
          {"rejected", r.outcome.rejected}, {"estimate", r.outcome.estimate}, {"accurate", r.accurate},
          {"seconds", r.seconds}};
}

json to_json(const ExperimentResult& r) {
  return {{"generator", to_json(r.spec)},   {"test", to_json(r.test)},
          {"master_seed", r.master_seed},   {"replicates", r.replicates},
          {"rejections", r.rejections},     {"accurate", r.accurate},
          {"accuracy_window", r.accuracy_window}, {"rate", r.rate()},
          {"mean_seconds", r.mean_seconds}, {"max_seconds", r.max_seconds}};
}

json to_json(const ChangeTree& tree) {
  json nodes = json::array();
  for (const ChangeNode& n : tree.nodes) {
    json j = {{"begin", n.begin}, {"end", n.end}, {"tested", n.tested}, {"p", n.p}, {"split", n.split}};
    if (n.split) {
      j["change"] = n.change;
      j["children"] = {n.left, n.right};
    }
    nodes.push_back(std::move(j));
  }
  return {{"method", to_string(tree.method)}, {"change_points", tree.change_points}, {"nodes", std::move(nodes)}};
}

json to_json(const CriticalValueRow& row) {
  return {{"statistic", to_string(row.statistic)},
          {"n0", row.n0},
          {"analytic", row.analytic},
          {"analytic_no_skew", row.analytic_no_skew},
          {"permutation", row.permutation}};
}

json to_json(const RuntimeRow& row) {
  return {{"n", row.n}, {"test", to_string(row.test)}, {"repeats", row.repeats}, {"mean_seconds", row.mean_seconds}};
}

json make_report(const std::string& kind, json config, json result) {
  return {{"schema", kReportSchema}, {"kind", kind}, {"config", std::move(config)}, {"result", std::move(result)}};
}

std::string power_cell(const ExperimentResult& r) {
  return std::to_string(r.rejections) + " (" + std::to_string(r.accurate) + ")";
}

}  // namespace gkcp
