#include "bdscreen/csv.hpp"

#include <istream>
#include <ostream>

#include "bdscreen/errors.hpp"

namespace bdscreen::csv {

std::optional<std::vector<std::string>> Reader::next() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  row_start_line_ = line_;

  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;

  for (;;) {
    // CRLF inside a quoted field is read back as a bare newline.
    if (!line.empty() && line.back() == '\r') line.pop_back();
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        if (!field.empty() || was_quoted) {
          throw ParseError(row_start_line_, "unexpected quote inside unquoted field");
        }
        in_quotes = true;
        was_quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else {
        if (was_quoted) throw ParseError(row_start_line_, "text after closing quote");
        field.push_back(c);
      }
    }
    if (!in_quotes) break;
    // Quoted field continues on the next physical line.
    if (!std::getline(in_, line)) throw ParseError(row_start_line_, "unterminated quoted field");
    ++line_;
    field.push_back('\n');
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace bdscreen::csv
