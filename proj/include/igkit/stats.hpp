#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "igkit/taxonomy.hpp"

namespace igkit {

/// Per-statement analysis row: the categories of its first agent, first
/// object and first deontic component.
struct AnalysisRecord {
  std::string statement_id;
  std::string doc_id;
  std::optional<AgentCategory> agent_category;
  std::optional<ObjectCategory> object_category;
  std::optional<DeonticClass> deontic_class;
  std::optional<std::string> deontic_text;  // lowercased surface form

  bool operator==(const AnalysisRecord&) const = default;
};

enum class Field { Doc, Agent, Object, DeonticClass, DeonticText };

std::string_view to_string(Field field);
/// "doc", "agent", "object", "deontic_class" or "deontic"; throws otherwise.
Field parse_field(std::string_view name);

/// Value of `field` for the record, nullopt when absent.
std::optional<std::string> field_value(const AnalysisRecord& record, Field field);

using Histogram = std::vector<std::pair<std::string, std::int64_t>>;

/// Counts of present values, descending by count then alphabetical.
Histogram histogram(std::span<const AnalysisRecord> records, Field key);

struct ContingencyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::int64_t>> counts;  // [row][col]
  std::int64_t n = 0;

  std::vector<std::int64_t> row_totals() const;
  std::vector<std::int64_t> col_totals() const;
  bool empty() const { return row_labels.empty() || col_labels.empty(); }

  bool operator==(const ContingencyTable&) const = default;
};

/// Builds a table from explicit counts; N is the cell sum. Throws on ragged
/// input or negative cells.
ContingencyTable make_table(std::vector<std::string> row_labels,
                            std::vector<std::string> col_labels,
                            std::vector<std::vector<std::int64_t>> counts);

/// Records with both fields present; labels sorted.
ContingencyTable crosstab(std::span<const AnalysisRecord> records, Field row_key,
                          Field col_key);

enum class Axis { Rows, Cols };

/// Keeps the k labels with the largest marginal totals on `axis` (ties
/// alphabetical), preserving their original order; N is recomputed. k at
/// or above the label count returns the table unchanged.
ContingencyTable top_k_filter(const ContingencyTable& table, Axis axis, std::size_t k);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::int64_t n = 0;
  std::vector<std::string> dropped_rows;  // zero-marginal labels removed first
  std::vector<std::string> dropped_cols;
};

/// Pearson chi-square test of independence (no continuity correction).
/// Zero-marginal rows and columns are dropped first; throws igkit::Error if
/// fewer than two rows or two columns remain.
ChiSquareResult chi_square(const ContingencyTable& table);

/// Upper regularized incomplete gamma Q(a, x): lower series when
/// x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-square distribution: Q(df / 2, x / 2).
double chi_square_p_value(double statistic, int df);

/// "chi2=<v> df=<d> p=<v> N=<n>" with 6 significant digits.
std::string format_result(const ChiSquareResult& result);

/// %.6g formatting used by every report number.
std::string format_number(double value);

/// Header `"",col1,col2,...`, then one `label,counts...` row per label.
std::string table_to_csv(const ContingencyTable& table);

/// Reads table_to_csv output. A trailing "Total" column and row (as written
/// by the report renderer) are recognized and dropped.
ContingencyTable table_from_csv(std::istream& in);

}  // namespace igkit
