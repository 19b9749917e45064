#include "igkit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "igkit/csv.hpp"
#include "igkit/error.hpp"

namespace igkit {

namespace fs = std::filesystem;

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

constexpr double kPlotHeight = 300.0;
constexpr double kTop = 50.0;
constexpr double kLeft = 60.0;
constexpr double kSlot = 70.0;
constexpr double kBarWidth = 46.0;

}  // namespace

std::string render_histogram(const Histogram& histogram, const std::string& title) {
  if (histogram.empty()) throw Error("render_histogram: empty histogram \"" + title + "\"");
  std::int64_t max = 0;
  for (const auto& [label, count] : histogram) max = std::max(max, count);

  const double width = std::max(420.0, kLeft + kSlot * static_cast<double>(histogram.size()) + 30.0);
  const double baseline = kTop + kPlotHeight;
  const double height = baseline + 70.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width)
      << "\" height=\"" << fixed(height) << "\" viewBox=\"0 0 " << fixed(width) << ' '
      << fixed(height) << "\" font-family=\"sans-serif\">\n";
  svg << "  <title>" << xml_escape(title) << "</title>\n";
  svg << "  <text x=\"" << fixed(width / 2) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">"
      << xml_escape(title) << "</text>\n";
  svg << "  <line class=\"axis\" x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\""
      << fixed(kLeft) << "\" y2=\"" << fixed(baseline) << "\" stroke=\"black\"/>\n";
  svg << "  <line class=\"axis\" x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(baseline)
      << "\" x2=\"" << fixed(width - 20) << "\" y2=\"" << fixed(baseline) << "\" stroke=\"black\"/>\n";
  svg << "  <text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(kTop + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">" << max << "</text>\n";
  svg << "  <text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(baseline)
      << "\" font-size=\"11\" text-anchor=\"end\">0</text>\n";
  svg << "  <text x=\"16\" y=\"" << fixed(kTop + kPlotHeight / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fixed(kTop + kPlotHeight / 2) << ")\">count</text>\n";
  svg << "  <text x=\"" << fixed((kLeft + width - 20) / 2) << "\" y=\"" << fixed(height - 8)
      << "\" font-size=\"12\" text-anchor=\"middle\">category</text>\n";

  for (std::size_t i = 0; i < histogram.size(); ++i) {
    const auto& [label, count] = histogram[i];
    const double h = static_cast<double>(count) / static_cast<double>(max) * kPlotHeight;
    const double x = kLeft + kSlot * static_cast<double>(i) + (kSlot - kBarWidth) / 2;
    svg << "  <rect class=\"bar\" x=\"" << fixed(x) << "\" y=\"" << fixed(baseline - h)
        << "\" width=\"" << fixed(kBarWidth) << "\" height=\"" << fixed(h)
        << "\" fill=\"#4c72b0\" data-label=\"" << xml_escape(label) << "\" data-count=\""
        << count << "\"/>\n";
    svg << "  <text x=\"" << fixed(x + kBarWidth / 2) << "\" y=\"" << fixed(baseline - h - 4)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << count << "</text>\n";
    svg << "  <text x=\"" << fixed(x + kBarWidth / 2) << "\" y=\"" << fixed(baseline + 16)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << xml_escape(label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

RenderedTable render_crosstab(const ContingencyTable& table) {
  const auto rt = table.row_totals();
  const auto ct = table.col_totals();

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {""};
  header.insert(header.end(), table.col_labels.begin(), table.col_labels.end());
  if (!table.empty()) header.emplace_back("Total");
  grid.push_back(header);
  for (std::size_t i = 0; i < table.row_labels.size() && !table.empty(); ++i) {
    std::vector<std::string> row = {table.row_labels[i]};
    for (std::int64_t v : table.counts[i]) row.push_back(std::to_string(v));
    row.push_back(std::to_string(rt[i]));
    grid.push_back(std::move(row));
  }
  if (!table.empty()) {
    std::vector<std::string> total = {"Total"};
    for (std::int64_t v : ct) total.push_back(std::to_string(v));
    total.push_back(std::to_string(table.n));
    grid.push_back(std::move(total));
  }

  RenderedTable out;
  std::vector<std::size_t> widths(grid.front().size(), 0);
  for (const auto& row : grid) {
    for (std::size_t j = 0; j < row.size(); ++j) widths[j] = std::max(widths[j], row[j].size());
  }
  for (const auto& row : grid) {
    std::string line;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) line += "  ";
      const std::string pad(widths[j] - row[j].size(), ' ');
      line += j == 0 ? row[j] + pad : pad + row[j];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out.text += line + '\n';
  }

  out.csv = "\"\"";
  for (std::size_t j = 1; j < grid.front().size(); ++j) out.csv += "," + csv::escape(grid.front()[j]);
  out.csv += '\n';
  for (std::size_t i = 1; i < grid.size(); ++i) out.csv += csv::format_row(grid[i]) + '\n';
  return out;
}

nlohmann::json to_json(const RunReport& report) {
  using nlohmann::json;
  json j;
  j["corpus_digest"] = report.corpus_digest;
  j["extraction_file"] = report.extraction_file;
  j["statement_count"] = report.statement_count;
  j["component_counts"] = report.component_counts;
  j["config"] = report.config;
  j["exclusions"] = report.exclusions;

  json hist = json::object();
  for (const NamedHistogram& h : report.histograms) {
    json bars = json::array();
    for (const auto& [label, count] : h.bars) bars.push_back({label, count});
    hist[h.name] = {{"title", h.title}, {"bars", bars}};
  }
  j["histograms"] = hist;

  auto table_json = [](const ContingencyTable& t) {
    return json{{"rows", t.row_labels}, {"cols", t.col_labels}, {"counts", t.counts}, {"N", t.n}};
  };
  json tables = json::object();
  for (const NamedTable& t : report.crosstabs) {
    tables[t.name] = table_json(t.table);
    tables[t.name]["title"] = t.title;
  }
  j["crosstabs"] = tables;

  json tests = json::object();
  for (const NamedTest& t : report.tests) {
    json entry = {{"title", t.title}};
    if (t.result) {
      entry["chi2"] = t.result->statistic;
      entry["df"] = t.result->df;
      entry["p"] = t.result->p_value;
      entry["N"] = t.result->n;
      entry["line"] = format_result(*t.result);
      entry["dropped_rows"] = t.result->dropped_rows;
      entry["dropped_cols"] = t.result->dropped_cols;
    } else {
      entry["skipped"] = t.skipped_reason;
    }
    if (t.tested) entry["table"] = table_json(*t.tested);
    tests[t.name] = entry;
  }
  j["tests"] = tests;
  return j;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw Error("write failed: " + path.string());
}

void write_report(const RunReport& report, const fs::path& dir) {
  std::error_code ec;
  for (const char* stale : {"tables", "charts"}) {
    fs::remove_all(dir / stale, ec);
    if (ec) throw Error("cannot clear " + (dir / stale).string() + ": " + ec.message());
  }
  fs::remove(dir / "report.md", ec);
  fs::remove(dir / "run.json", ec);

  std::ostringstream md;
  md << "# Institutional statement analysis\n\n";
  md << "- corpus digest: `" << report.corpus_digest << "`\n";
  md << "- extraction: `" << report.extraction_file << "`\n";
  md << "- statements: " << report.statement_count << "\n\n";

  md << "## Components\n\n| label | spans |\n|---|---|\n";
  for (const auto& [label, count] : report.component_counts) {
    md << "| " << label << " | " << count << " |\n";
  }

  md << "\n## Histograms\n";
  for (const NamedHistogram& h : report.histograms) {
    md << "\n### " << h.title << "\n\n";
    if (h.bars.empty()) {
      md << "No values.\n";
      continue;
    }
    write_text_file(dir / "charts" / (h.name + ".svg"), render_histogram(h.bars, h.title));
    md << "![" << h.title << "](charts/" << h.name << ".svg)\n\n| value | count |\n|---|---|\n";
    for (const auto& [label, count] : h.bars) md << "| " << label << " | " << count << " |\n";
  }

  md << "\n## Crosstabs\n";
  for (const NamedTable& t : report.crosstabs) {
    write_text_file(dir / "tables" / (t.name + ".csv"), table_to_csv(t.table));
    md << "\n### " << t.title << "\n\n";
    if (t.table.empty()) {
      md << "No co-present records.\n";
      continue;
    }
    md << "```\n" << render_crosstab(t.table).text << "```\n";
  }

  md << "\n## Independence tests\n";
  for (const NamedTest& t : report.tests) {
    md << "\n### " << t.title << "\n\n";
    if (t.tested) {
      write_text_file(dir / "tables" / (t.name + ".csv"), table_to_csv(*t.tested));
      if (!t.tested->empty()) md << "```\n" << render_crosstab(*t.tested).text << "```\n\n";
    }
    if (t.result) {
      md << "`" << format_result(*t.result) << "`\n";
      if (!t.result->dropped_rows.empty() || !t.result->dropped_cols.empty()) {
        md << "\nDropped zero-marginal labels:";
        for (const auto& l : t.result->dropped_rows) md << " " << l;
        for (const auto& l : t.result->dropped_cols) md << " " << l;
        md << "\n";
      }
    } else {
      md << "Test skipped: " << t.skipped_reason << "\n";
    }
  }

  md << "\n## Exclusions\n\n| bucket | components |\n|---|---|\n";
  for (const auto& [name, count] : report.exclusions) md << "| " << name << " | " << count << " |\n";

  write_text_file(dir / "report.md", md.str());
  write_text_file(dir / "run.json", to_json(report).dump(2) + "\n");
}

}  // namespace igkit
