#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkcp/fast_tests.hpp"
#include "gkcp/permutation.hpp"
#include "gkcp/scan.hpp"
#include "gkcp/segmentation.hpp"
#include "gkcp/sim.hpp"

namespace gkcp {

inline constexpr const char* kReportSchema = "gkcp.report/1";

/// Numeric CSV, one row per line, comma separated. Blank lines are skipped.
/// Throws DataFormat naming the offending line for ragged rows, empty or
/// non-numeric cells and empty input.
RowMatrix read_csv(std::istream& in, bool skip_header = false);
RowMatrix read_csv_file(const std::string& path, bool skip_header = false);

/// Cells printed with %.17g so that reading back is exact.
void write_csv(std::ostream& out, const RowMatrix& values);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

/// Per-t scan curve with columns t, Z_D, Z_W12, Z_W08, GKCP.
std::string scan_curve_csv(const ScanProfile& profile);

nlohmann::json to_json(const ScanBounds& b);
nlohmann::json to_json(const GeneratorSpec& spec);
nlohmann::json to_json(const TestSpec& test);
nlohmann::json to_json(const FastComponents& c);
nlohmann::json to_json(const FastTestReport& r);
nlohmann::json to_json(const PermResult& r);
nlohmann::json to_json(const ReplicateRecord& r);
/// Summary only; replicate records go to JSON lines.
nlohmann::json to_json(const ExperimentResult& r);
nlohmann::json to_json(const ChangeTree& tree);
nlohmann::json to_json(const CriticalValueRow& row);
nlohmann::json to_json(const RuntimeRow& row);

/// {"schema": kReportSchema, "kind": kind, "config": config, "result": result}
nlohmann::json make_report(const std::string& kind, nlohmann::json config, nlohmann::json result);

/// Table cell "rejections (accurate)".
std::string power_cell(const ExperimentResult& r);

}  // namespace gkcp
