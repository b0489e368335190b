#include "pnp/trace_csv.hpp"

#include "pnp/pgm.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pnp {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string format_trace_csv(const SolverResult& result) {
  std::string out = fmt::format("#schema={}\nk,dist,snr_db,elapsed_s,minibatch_indices\n", kTraceSchema);
  for (const auto& r : result.trace.records) {
    out += fmt::format("{},{},{},{},", r.k, format_real(r.dist), format_real(r.snr_db),
                       format_real(r.elapsed_seconds));
    for (std::size_t i = 0; i < r.indices.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(r.indices[i]);
    }
    out += '\n';
  }
  if (result.status == RunStatus::Completed)
    out += "#status=completed\n";
  else
    out += "#status=diverged reason=" + result.diagnostic + "\n";
  return out;
}

namespace {

struct Line {
  std::string_view text;
  std::size_t offset;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(pos, end - pos);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back({l, pos});
    pos = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

double parse_real(std::string_view field, std::size_t offset) {
  const std::string s(field);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("CSV: invalid number '" + s + "'", offset);
  return v;
}

long long parse_integer(std::string_view field, std::size_t offset) {
  const std::string s(field);
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("CSV: invalid integer '" + s + "'", offset);
  return v;
}

std::string parse_schema(const std::vector<Line>& lines) {
  if (lines.empty() || lines[0].text.substr(0, 8) != "#schema=") throw ParseError("CSV: missing #schema header", 0);
  return std::string(lines[0].text.substr(8));
}

}  // namespace

ParsedTrace parse_trace_csv(std::string_view text) {
  const auto lines = split_lines(text);
  const std::string schema = parse_schema(lines);
  if (schema != kTraceSchema) throw ParseError("CSV: unsupported schema '" + schema + "'", 8);
  if (lines.size() < 2 || lines[1].text != "k,dist,snr_db,elapsed_s,minibatch_indices")
    throw ParseError("CSV: unexpected column header", lines.size() < 2 ? text.size() : lines[1].offset);
  ParsedTrace out;
  bool saw_status = false;
  for (std::size_t li = 2; li < lines.size(); ++li) {
    const auto& [l, off] = lines[li];
    if (l.empty()) continue;
    if (saw_status) throw ParseError("CSV: content after status line", off);
    if (l.substr(0, 8) == "#status=") {
      const std::string_view s = l.substr(8);
      if (s == "completed") {
        out.status = RunStatus::Completed;
      } else if (s.substr(0, 16) == "diverged reason=") {
        out.status = RunStatus::Diverged;
        out.reason = std::string(s.substr(16));
      } else {
        throw ParseError("CSV: unknown status '" + std::string(s) + "'", off);
      }
      saw_status = true;
      continue;
    }
    const auto f = split_fields(l);
    if (f.size() != 5) throw ParseError("CSV: expected 5 fields, got " + std::to_string(f.size()), off);
    IterateRecord r;
    r.k = static_cast<int>(parse_integer(f[0], off));
    r.dist = parse_real(f[1], off);
    r.snr_db = parse_real(f[2], off);
    r.elapsed_seconds = parse_real(f[3], off);
    std::size_t pos = 0;
    const std::string_view idx = f[4];
    while (pos < idx.size()) {
      std::size_t sp = idx.find(' ', pos);
      if (sp == std::string_view::npos) sp = idx.size();
      r.indices.push_back(static_cast<std::size_t>(parse_integer(idx.substr(pos, sp - pos), off)));
      pos = sp + 1;
    }
    out.records.push_back(std::move(r));
  }
  if (!saw_status) throw ParseError("CSV: missing #status line", text.size());
  return out;
}

std::string format_csv_table(const CsvTable& table) {
  std::string out = "#schema=" + table.schema + "\n";
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\n") != std::string::npos)
        throw ConfigError("CSV: cell contains a separator: '" + cells[i] + "'");
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(table.columns);
  for (const auto& r : table.rows) {
    if (r.size() != table.columns.size()) throw ConfigError("CSV: row width does not match header");
    emit(r);
  }
  return out;
}

CsvTable parse_csv_table(std::string_view text) {
  const auto lines = split_lines(text);
  CsvTable t;
  t.schema = parse_schema(lines);
  if (lines.size() < 2) throw ParseError("CSV: missing column header", text.size());
  for (auto f : split_fields(lines[1].text)) t.columns.emplace_back(f);
  for (std::size_t li = 2; li < lines.size(); ++li) {
    if (lines[li].text.empty()) continue;
    const auto f = split_fields(lines[li].text);
    if (f.size() != t.columns.size())
      throw ParseError("CSV: expected " + std::to_string(t.columns.size()) + " fields", lines[li].offset);
    std::vector<std::string> row;
    for (auto c : f) row.emplace_back(c);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace pnp
