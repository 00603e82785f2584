#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bdscreen::csv {

/// Minimal RFC 4180 reader: comma separated, double-quoted fields with ""
/// escapes, CRLF or LF line endings. Quoted fields may span lines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next row, or nullopt at end of input. Throws ParseError on an
  /// unterminated quote.
  std::optional<std::vector<std::string>> next();

  /// 1-based physical line where the last returned row started.
  std::size_t line() const noexcept { return row_start_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t row_start_line_ = 0;
};

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace bdscreen::csv
