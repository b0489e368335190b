#pragma once

#include "pnp/solvers.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pnp {

inline constexpr const char* kTraceSchema = "pnp-trace/1";

/*
 * Trace layout:
 *   #schema=pnp-trace/1
 *   k,dist,snr_db,elapsed_s,minibatch_indices
 *   0,<dist>,<snr>,<seconds>,<space separated indices>
 *   ...
 *   #status=completed        or   #status=diverged reason=norm_exceeded k=17
 * Reals are written as shortest round-trip decimals; missing values as nan.
 */
std::string format_trace_csv(const SolverResult& result);

struct ParsedTrace {
  std::vector<IterateRecord> records;
  RunStatus status = RunStatus::Completed;
  std::string reason;  // diagnostic when diverged
};

/// Inverse of format_trace_csv; malformed text throws ParseError.
ParsedTrace parse_trace_csv(std::string_view text);

/// Generic table with a versioned header line, used for summaries.
struct CsvTable {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_csv_table(const CsvTable& table);
CsvTable parse_csv_table(std::string_view text);

std::string format_real(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pnp
