#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "igkit/stats.hpp"

namespace igkit {

/// Deterministic SVG bar chart: one <rect> per bar, heights proportional to
/// counts with the largest bar filling the plot area. Throws on an empty
/// histogram.
std::string render_histogram(const Histogram& histogram, const std::string& title);

struct RenderedTable {
  std::string text;  // aligned plain-text table with margins
  std::string csv;   // table_to_csv layout plus a "Total" column and row
};

RenderedTable render_crosstab(const ContingencyTable& table);

struct NamedHistogram {
  std::string name;  // file stem
  std::string title;
  Histogram bars;
};

struct NamedTable {
  std::string name;
  std::string title;
  ContingencyTable table;
};

struct NamedTest {
  std::string name;
  std::string title;
  std::optional<ContingencyTable> tested;  // table after filtering
  std::optional<ChiSquareResult> result;
  std::string skipped_reason;              // set when result is empty
};

struct RunReport {
  std::string corpus_digest;
  std::string extraction_file;
  std::int64_t statement_count = 0;
  std::map<std::string, std::int64_t> component_counts;  // by ABDICO label
  std::vector<NamedHistogram> histograms;
  std::vector<NamedTable> crosstabs;
  std::vector<NamedTest> tests;
  std::map<std::string, std::int64_t> exclusions;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json to_json(const RunReport& report);

/// Rewrites report.md, tables/*.csv, charts/*.svg and run.json under `dir`
/// from scratch. Throws igkit::Error naming the path on I/O failure.
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace igkit
