#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace igkit::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. `line` reports the 1-based physical line on which the row began.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::optional<Row> next();
  std::size_t line() const { return row_line_; }

 private:
  std::istream& in_;
  std::size_t next_line_ = 1;
  std::size_t row_line_ = 0;
};

/// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string format_row(const Row& row);

}  // namespace igkit::csv
