#pragma once

// Command-line front end: scenario runner, verification harness, sweeps and
// plot-data emission.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace esslab {

/// Exit codes: 0 success/pass, 1 verification fail, 2 usage, 3 other errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Tabular result for plotting: a header and rows of already formatted cells.
struct PlotTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Writes `path` as CSV and `path + ".json"` with the provenance record.
/// kIo when either file cannot be written.
void emit_plot_data(const PlotTable& table, const nlohmann::json& provenance,
                    const std::string& path);

/// Shortest round-trip decimal form of a double.
std::string format_number(double x);

/// Build identification recorded in provenance sidecars.
const char* build_describe();

}  // namespace esslab
