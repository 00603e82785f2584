#include "bdscreen/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "bdscreen/csv.hpp"

namespace bdscreen {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string join_codes(const FeatureSpec& spec) {
  std::string out;
  for (const auto& [text, c] : spec.category_codes) {
    if (!out.empty()) out += ", ";
    out += text + "=" + std::to_string(c);
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error([&] {
        std::string msg = "validation failed";
        for (const auto& v : violations) {
          msg += "\n  ";
          if (v.row) msg += "row " + std::to_string(v.row) + ": ";
          msg += v.feature + " = '" + v.value + "': " + v.message;
        }
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

bool Dataset::fully_labeled() const noexcept {
  return std::all_of(records.begin(), records.end(),
                     [](const RespondentRecord& r) { return r.label.has_value(); });
}

IngestedValue ingest_value(const FeatureSpec& spec, std::string_view text) {
  text = trim(text);
  if (text.empty()) return {};
  if (auto c = spec.code_for(text)) return {static_cast<double>(*c), std::nullopt};
  if (auto number = parse_double(text)) return {*number, std::nullopt};
  Violation v{spec.name, std::string(text),
              spec.is_categorical() ? "unknown category (expected one of: " + join_codes(spec) + ")"
                                    : "not a number"};
  return {std::nullopt, std::move(v)};
}

std::vector<Violation> validate_record(const RespondentRecord& record, const Schema& schema) {
  std::vector<Violation> out;
  if (record.values.size() != schema.size()) {
    out.push_back({"record", std::to_string(record.values.size()),
                   "expected " + std::to_string(schema.size()) + " values"});
    return out;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const FeatureSpec& spec = schema[i];
    const auto& slot = record.values[i];
    if (!slot) {
      if (spec.required) out.push_back({spec.name, "", "missing required value"});
      continue;
    }
    const double x = *slot;
    const std::string shown = format_number(x);
    if (!std::isfinite(x)) {
      out.push_back({spec.name, shown, "not a finite number"});
      continue;
    }
    if (spec.is_categorical()) {
      if (x != std::floor(x) || !spec.has_code(static_cast<int>(x))) {
        out.push_back({spec.name, shown, "not an assigned code (" + join_codes(spec) + ")"});
      }
      continue;
    }
    if (x < spec.bounds.min || x > spec.bounds.max) {
      out.push_back({spec.name, shown,
                     "outside [" + format_number(spec.bounds.min) + ", " +
                         format_number(spec.bounds.max) + "]"});
      continue;
    }
    if (spec.integral && x != std::floor(x)) {
      out.push_back({spec.name, shown, "must be a whole number"});
    }
  }
  return out;
}

Dataset make_dataset(const Schema& schema, std::vector<RespondentRecord> records) {
  std::vector<Violation> problems;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (auto v : validate_record(records[r], schema)) {
      v.row = r + 1;
      problems.push_back(std::move(v));
    }
    if (!ids.insert(records[r].id).second) {
      problems.push_back({"id", records[r].id, "duplicate id", r + 1});
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return Dataset{schema, std::move(records)};
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
  Dataset out{ds.schema, {}};
  out.records.reserve(indices.size());
  for (std::size_t i : indices) out.records.push_back(ds.records.at(i));
  return out;
}

Dataset load_dataset(std::istream& in, const Schema& schema) {
  csv::Reader reader(in);
  std::optional<std::vector<std::string>> header;
  try {
    header = reader.next();
  } catch (const ParseError& e) {
    throw ParseError(0, std::string("header: ") + e.what());
  }
  if (!header) throw ParseError(0, "empty input (no header row)");

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> column_feature(header->size(), kNone);
  std::size_t id_col = kNone;
  std::size_t target_col = kNone;
  std::set<std::size_t> seen;
  for (std::size_t c = 0; c < header->size(); ++c) {
    const std::string name(trim((*header)[c]));
    if (name == "id") {
      id_col = c;
    } else if (name == "target") {
      target_col = c;
    } else if (auto idx = schema.index_of(name)) {
      if (!seen.insert(*idx).second) throw SchemaError("column '" + name + "' appears twice");
      column_feature[c] = *idx;
    } else {
      throw SchemaError("unknown column '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!seen.count(i)) throw SchemaError("missing column '" + schema[i].name + "'");
  }

  std::vector<RespondentRecord> records;
  std::vector<Violation> problems;
  std::size_t row = 0;
  for (;;) {
    std::optional<std::vector<std::string>> fields;
    try {
      fields = reader.next();
    } catch (const ParseError&) {
      throw ParseError(row + 1, "unterminated or malformed quoted field");
    }
    if (!fields) break;
    if (fields->size() == 1 && trim((*fields)[0]).empty()) continue;  // blank line
    ++row;
    if (fields->size() != header->size()) {
      throw ParseError(row, "expected " + std::to_string(header->size()) + " fields, found " +
                                std::to_string(fields->size()));
    }
    RespondentRecord rec;
    rec.values.assign(schema.size(), std::nullopt);
    for (std::size_t c = 0; c < fields->size(); ++c) {
      const std::string_view cell = (*fields)[c];
      if (c == id_col) {
        rec.id = std::string(trim(cell));
      } else if (c == target_col) {
        const auto text = trim(cell);
        if (text.empty()) continue;
        std::optional<DisorderLabel> label = label_from_name(text);
        if (!label) {
          if (auto n = parse_double(text); n && *n == std::floor(*n)) {
            label = label_from_code(static_cast<int>(*n));
          }
        }
        if (!label) {
          problems.push_back({"target", std::string(text), "expected 1, 2 or 3", row});
        }
        rec.label = label;
      } else {
        const std::size_t f = column_feature[c];
        auto ingested = ingest_value(schema[f], cell);
        if (ingested.error) {
          ingested.error->row = row;
          problems.push_back(std::move(*ingested.error));
        }
        rec.values[f] = ingested.value;
      }
    }
    if (rec.id.empty()) rec.id = "r" + std::to_string(row);
    records.push_back(std::move(rec));
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return make_dataset(schema, std::move(records));
}

Dataset load_dataset_file(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_dataset(in, schema);
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  const bool labeled = std::any_of(ds.records.begin(), ds.records.end(),
                                   [](const RespondentRecord& r) { return r.label.has_value(); });
  std::vector<std::string> fields{"id"};
  for (const auto& spec : ds.schema.features()) fields.push_back(spec.name);
  if (labeled) fields.emplace_back("target");
  csv::write_row(out, fields);
  for (const auto& rec : ds.records) {
    fields.clear();
    fields.push_back(rec.id);
    for (const auto& v : rec.values) fields.push_back(v ? format_number(*v) : std::string());
    if (labeled) fields.push_back(rec.label ? std::to_string(code(*rec.label)) : std::string());
    csv::write_row(out, fields);
  }
}

}  // namespace bdscreen
