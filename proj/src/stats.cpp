#include "igkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "igkit/csv.hpp"
#include "igkit/error.hpp"

namespace igkit {

std::string_view to_string(Field field) {
  switch (field) {
    case Field::Doc: return "doc";
    case Field::Agent: return "agent";
    case Field::Object: return "object";
    case Field::DeonticClass: return "deontic_class";
    case Field::DeonticText: return "deontic";
  }
  return "?";
}

Field parse_field(std::string_view name) {
  for (Field f : {Field::Doc, Field::Agent, Field::Object, Field::DeonticClass,
                  Field::DeonticText}) {
    if (to_string(f) == name) return f;
  }
  throw Error("unknown field \"" + std::string(name) +
              "\" (expected doc, agent, object, deontic_class or deontic)");
}

std::optional<std::string> field_value(const AnalysisRecord& r, Field field) {
  switch (field) {
    case Field::Doc:
      if (r.doc_id.empty()) return std::nullopt;
      return r.doc_id;
    case Field::Agent:
      if (!r.agent_category) return std::nullopt;
      return std::string(to_string(*r.agent_category));
    case Field::Object:
      if (!r.object_category) return std::nullopt;
      return std::string(to_string(*r.object_category));
    case Field::DeonticClass:
      if (!r.deontic_class) return std::nullopt;
      return std::string(to_string(*r.deontic_class));
    case Field::DeonticText:
      return r.deontic_text;
  }
  return std::nullopt;
}

Histogram histogram(std::span<const AnalysisRecord> records, Field key) {
  std::map<std::string, std::int64_t> counts;
  for (const AnalysisRecord& r : records) {
    if (auto v = field_value(r, key)) ++counts[*v];
  }
  Histogram out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::vector<std::int64_t> ContingencyTable::row_totals() const {
  std::vector<std::int64_t> out(row_labels.size(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::int64_t c : counts[i]) out[i] += c;
  }
  return out;
}

std::vector<std::int64_t> ContingencyTable::col_totals() const {
  std::vector<std::int64_t> out(col_labels.size(), 0);
  for (const auto& row : counts) {
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  return out;
}

ContingencyTable make_table(std::vector<std::string> row_labels,
                            std::vector<std::string> col_labels,
                            std::vector<std::vector<std::int64_t>> counts) {
  if (counts.size() != row_labels.size()) throw Error("table: row count mismatch");
  ContingencyTable t;
  for (const auto& row : counts) {
    if (row.size() != col_labels.size()) throw Error("table: ragged row");
    for (std::int64_t c : row) {
      if (c < 0) throw Error("table: negative cell");
      t.n += c;
    }
  }
  t.row_labels = std::move(row_labels);
  t.col_labels = std::move(col_labels);
  t.counts = std::move(counts);
  return t;
}

ContingencyTable crosstab(std::span<const AnalysisRecord> records, Field row_key,
                          Field col_key) {
  std::map<std::pair<std::string, std::string>, std::int64_t> cells;
  std::map<std::string, std::size_t> rows, cols;
  for (const AnalysisRecord& r : records) {
    auto rv = field_value(r, row_key);
    auto cv = field_value(r, col_key);
    if (!rv || !cv) continue;
    rows.emplace(*rv, 0);
    cols.emplace(*cv, 0);
    ++cells[{*rv, *cv}];
  }
  std::vector<std::string> row_labels, col_labels;
  for (auto& [label, index] : rows) {
    index = row_labels.size();
    row_labels.push_back(label);
  }
  for (auto& [label, index] : cols) {
    index = col_labels.size();
    col_labels.push_back(label);
  }
  std::vector<std::vector<std::int64_t>> counts(
      row_labels.size(), std::vector<std::int64_t>(col_labels.size(), 0));
  for (const auto& [key, count] : cells) counts[rows[key.first]][cols[key.second]] = count;
  return make_table(std::move(row_labels), std::move(col_labels), std::move(counts));
}

namespace {

// Keeps the given row/col indices (in order).
ContingencyTable select(const ContingencyTable& t, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) {
  std::vector<std::string> rl, cl;
  for (std::size_t i : rows) rl.push_back(t.row_labels[i]);
  for (std::size_t j : cols) cl.push_back(t.col_labels[j]);
  std::vector<std::vector<std::int64_t>> counts;
  for (std::size_t i : rows) {
    std::vector<std::int64_t> row;
    for (std::size_t j : cols) row.push_back(t.counts[i][j]);
    counts.push_back(std::move(row));
  }
  return make_table(std::move(rl), std::move(cl), std::move(counts));
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

ContingencyTable top_k_filter(const ContingencyTable& table, Axis axis, std::size_t k) {
  if (k == 0) throw Error("top_k_filter: k must be at least 1");
  const auto& labels = axis == Axis::Rows ? table.row_labels : table.col_labels;
  if (k >= labels.size()) return table;
  const auto totals = axis == Axis::Rows ? table.row_totals() : table.col_totals();

  std::vector<std::size_t> order = iota(labels.size());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (totals[a] != totals[b]) return totals[a] > totals[b];
    return labels[a] < labels[b];
  });
  order.resize(k);
  std::sort(order.begin(), order.end());

  if (axis == Axis::Rows) return select(table, order, iota(table.col_labels.size()));
  return select(table, iota(table.row_labels.size()), order);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw Error("regularized_gamma_q: shape must be positive");
  if (x < 0.0 || std::isnan(x)) throw Error("regularized_gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;

  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);

  if (x < a + 1.0) {
    // P(a, x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n))
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }

  // Modified Lentz evaluation of the continued fraction for Q(a, x).
  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefix) * h;
}

double chi_square_p_value(double statistic, int df) {
  if (df <= 0) throw Error("chi_square_p_value: df must be positive");
  if (statistic < 0.0) throw Error("chi_square_p_value: negative statistic");
  const double p = regularized_gamma_q(0.5 * df, 0.5 * statistic);
  return std::clamp(p, 0.0, 1.0);
}

ChiSquareResult chi_square(const ContingencyTable& table) {
  ChiSquareResult result;
  const auto rt = table.row_totals();
  const auto ct = table.col_totals();
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < rt.size(); ++i) {
    if (rt[i] > 0) rows.push_back(i);
    else result.dropped_rows.push_back(table.row_labels[i]);
  }
  for (std::size_t j = 0; j < ct.size(); ++j) {
    if (ct[j] > 0) cols.push_back(j);
    else result.dropped_cols.push_back(table.col_labels[j]);
  }
  if (rows.size() < 2 || cols.size() < 2) {
    throw Error("chi_square: degenerate table (" + std::to_string(rows.size()) + " x " +
                std::to_string(cols.size()) + " after dropping zero marginals)");
  }
  const ContingencyTable t = select(table, rows, cols);
  const auto r = t.row_totals();
  const auto c = t.col_totals();
  const double n = static_cast<double>(t.n);

  double statistic = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double expected = static_cast<double>(r[i]) * static_cast<double>(c[j]) / n;
      const double diff = static_cast<double>(t.counts[i][j]) - expected;
      statistic += diff * diff / expected;
    }
  }
  result.statistic = statistic;
  result.df = static_cast<int>((r.size() - 1) * (c.size() - 1));
  result.p_value = chi_square_p_value(statistic, result.df);
  result.n = t.n;
  return result;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string format_result(const ChiSquareResult& r) {
  return "chi2=" + format_number(r.statistic) + " df=" + std::to_string(r.df) +
         " p=" + format_number(r.p_value) + " N=" + std::to_string(r.n);
}

std::string table_to_csv(const ContingencyTable& table) {
  std::string out = "\"\"";
  for (const std::string& c : table.col_labels) out += "," + csv::escape(c);
  out += '\n';
  for (std::size_t i = 0; i < table.row_labels.size(); ++i) {
    out += csv::escape(table.row_labels[i]);
    for (std::int64_t v : table.counts[i]) out += "," + std::to_string(v);
    out += '\n';
  }
  return out;
}

ContingencyTable table_from_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->empty()) throw Error("table csv: missing header");
  std::vector<std::string> cols(header->begin() + 1, header->end());
  const bool col_total = !cols.empty() && cols.back() == "Total";
  if (col_total) cols.pop_back();

  std::vector<std::string> rows;
  std::vector<std::vector<std::int64_t>> counts;
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != header->size()) {
      throw Error("table csv line " + std::to_string(reader.line()) + ": wrong field count");
    }
    if ((*row)[0] == "Total") continue;
    rows.push_back((*row)[0]);
    std::vector<std::int64_t> values;
    for (std::size_t j = 1; j <= cols.size(); ++j) {
      try {
        values.push_back(std::stoll((*row)[j]));
      } catch (const std::exception&) {
        throw Error("table csv line " + std::to_string(reader.line()) + ": bad count \"" +
                    (*row)[j] + "\"");
      }
    }
    counts.push_back(std::move(values));
  }
  return make_table(std::move(rows), std::move(cols), std::move(counts));
}

}  // namespace igkit
