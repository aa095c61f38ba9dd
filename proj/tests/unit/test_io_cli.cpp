#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gkcp/cli.hpp"
#include "gkcp/error.hpp"
#include "gkcp/io.hpp"

using namespace gkcp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gkcp_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct CliRun {
  int code = -1;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gkcp");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("CSV parsing") {
  std::istringstream in("x,y\n1, 2.5\n\n-3e2,+4\n");
  const RowMatrix m = read_csv(in, true);
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 1) == 2.5);
  CHECK(m(1, 0) == -300.0);
  CHECK(m(1, 1) == 4.0);
}

TEST_CASE("CSV errors name the line") {
  const auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_csv(in);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::data_format);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("1,2\n3,4\n5\n").find("line 3") != std::string::npos);
  CHECK(message("1,2\n3,abc\n").find("line 2") != std::string::npos);
  CHECK(message("1,,2\n").find("line 1") != std::string::npos);
  CHECK(message("\n\n") == "no data rows");
}

TEST_CASE("CSV round trip is exact") {
  RowMatrix x(3, 2);
  x << 0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.123456789, -0.0;
  std::stringstream s;
  write_csv(s, x);
  CHECK(read_csv(s) == x);
}

TEST_CASE("scan curve columns") {
  RowMatrix x(30, 2);
  for (int i = 0; i < 30; ++i) x.row(i) << i % 7, (i * 3) % 5 + (i >= 15 ? 4 : 0);
  const ScanProfile p = scan_single(build_gram(Sequence(x)), {3, 27});
  std::istringstream csv(scan_curve_csv(p));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,Z_D,Z_W12,Z_W08,GKCP");
  const RowMatrix body = read_csv(csv);
  CHECK(body.rows() == 25);
  CHECK(body(0, 0) == 3.0);
  CHECK(body(5, 4) == doctest::Approx(p.gkcp[5]));
}

TEST_CASE("report envelope") {
  const nlohmann::json r = make_report("test", {{"a", 1}}, {{"p", 0.5}});
  CHECK(r["schema"] == kReportSchema);
  CHECK(r["kind"] == "test");
  CHECK(r["config"]["a"] == 1);
}

TEST_CASE("cli: generated data and its CSV dump give identical statistics") {
  TempDir tmp;
  const std::vector<std::string> gen{"--family", "chi_square", "--d", "6", "--n", "90", "--delta", "2", "--seed", "5"};
  std::vector<std::string> args{"gen", "-o", tmp.file("x.csv")};
  args.insert(args.end(), gen.begin(), gen.end());
  REQUIRE(cli(args).code == 0);

  for (const std::string& test : {"fgkcp1", "gkcp"}) {
    std::vector<std::string> a{"test", "--gen", "--test", test, "--n-perm", "99"};
    a.insert(a.end(), gen.begin(), gen.end());
    const CliRun direct = cli(a);
    const CliRun from_csv =
        cli({"test", "-i", tmp.file("x.csv"), "--test", test, "--n-perm", "99", "--seed", "5"});
    REQUIRE(direct.code == 0);
    REQUIRE(from_csv.code == 0);
    const auto ja = nlohmann::json::parse(direct.out), jb = nlohmann::json::parse(from_csv.out);
    CHECK(ja["result"] == jb["result"]);
    CHECK(ja["schema"] == kReportSchema);
    CHECK(ja["config"]["seed"] == 5);
    CHECK(ja["config"]["data"]["generator"]["family"] == "chi_square");
  }
}

TEST_CASE("cli: malformed input exits 2 with the line number") {
  TempDir tmp;
  write_text(tmp.file("bad.csv"), "1,2\n3,4\n5\n");
  const CliRun r = cli({"test", "-i", tmp.file("bad.csv")});
  CHECK(r.code == kExitDataError);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(cli({"test", "-i", tmp.file("missing.csv")}).code == kExitDataError);
  write_text(tmp.file("same.csv"), "1,1\n1,1\n1,1\n1,1\n1,1\n");
  CHECK(cli({"test", "-i", tmp.file("same.csv")}).code == kExitDataError);
}

TEST_CASE("cli: configuration errors exit 3") {
  TempDir tmp;
  write_text(tmp.file("x.csv"), "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
  CHECK(cli({"test"}).code == kExitConfigError);
  CHECK(cli({"test", "-i", tmp.file("x.csv"), "--n0", "6"}).code == kExitConfigError);
  CHECK(cli({"test", "-i", tmp.file("x.csv"), "--test", "nope"}).code == kExitConfigError);
  CHECK(cli({"test", "-i", tmp.file("x.csv"), "--alpha", "0"}).code == kExitConfigError);
  CHECK(cli({"test", "--bogus"}).code == kExitConfigError);
  CHECK(cli({"gen", "--family", "cauchy"}).code == kExitConfigError);
  CHECK(cli({}).code == kExitConfigError);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("cli: bounds as fractions, curve output and kernel input") {
  TempDir tmp;
  REQUIRE(cli({"gen", "--d", "3", "--n", "60", "--delta", "3", "-o", tmp.file("x.csv")}).code == 0);
  const CliRun r = cli({"test", "-i", tmp.file("x.csv"), "--n0", "0.1", "--n1", "48", "--curve", tmp.file("c.csv"),
                        "-o", tmp.file("r.json")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(tmp.file("r.json")));
  CHECK(j["config"]["bounds"]["n0"] == 6);
  CHECK(j["config"]["bounds"]["n1"] == 48);
  CHECK(j["result"]["rejected"] == true);
  std::istringstream curve(slurp(tmp.file("c.csv")));
  CHECK(read_csv(curve, true).rows() == 43);

  const GramSummary g = build_gram(Sequence(read_csv_file(tmp.file("x.csv"))));
  std::ostringstream k;
  write_csv(k, g.k());
  write_text(tmp.file("k.csv"), k.str());
  const auto jk = nlohmann::json::parse(cli({"test", "--gram", tmp.file("k.csv")}).out);
  const auto jx = nlohmann::json::parse(cli({"test", "-i", tmp.file("x.csv")}).out);
  CHECK(jk["result"]["combined_p"].get<double>() ==
        doctest::Approx(jx["result"]["combined_p"].get<double>()).epsilon(1e-9));
}

TEST_CASE("cli: segment and bench commands") {
  TempDir tmp;
  REQUIRE(cli({"gen", "--d", "5", "--n", "150", "--tau", "75", "--delta", "4", "-o", tmp.file("x.csv")}).code == 0);
  const auto seg = nlohmann::json::parse(cli({"segment", "-i", tmp.file("x.csv")}).out);
  CHECK(seg["kind"] == "segment");
  CHECK(seg["result"]["change_points"] == nlohmann::json::array({75}));

  const CliRun p = cli({"bench", "power", "--d", "10", "--n", "60", "--delta", "6", "--replicates", "5", "--jsonl",
                        tmp.file("p.jsonl"), "--summary", tmp.file("p.csv")});
  REQUIRE(p.code == 0);
  CHECK(nlohmann::json::parse(p.out)["result"]["rejections"] == 5);
  std::istringstream lines(slurp(tmp.file("p.jsonl")));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) count += nlohmann::json::parse(line)["rejected"].get<bool>();
  CHECK(count == 5);
  CHECK(slurp(tmp.file("p.csv")).find("\"5 (5)\"") != std::string::npos);

  const CliRun c = cli({"bench", "critical", "--n", "80", "--d", "4", "--n-perm", "50", "--n0-grid", "10,20",
                        "--stat", "zd,zw12", "--summary", tmp.file("cv.csv")});
  REQUIRE(c.code == 0);
  CHECK(nlohmann::json::parse(c.out)["result"].size() == 4);

  const CliRun t = cli({"bench", "runtime", "--n-grid", "40,60", "--d", "3", "--repeats", "1", "--tests",
                        "fgkcp1,gkcp", "--n-perm", "20", "--summary", tmp.file("rt.csv")});
  REQUIRE(t.code == 0);
  CHECK(slurp(tmp.file("rt.csv")).rfind("test,n=40,n=60\n", 0) == 0);
}
