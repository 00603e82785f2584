#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdscreen/errors.hpp"
#include "bdscreen/schema.hpp"

namespace bdscreen {

/// One questionnaire response. Values are stored as numeric codes in schema
/// order; std::nullopt marks a missing answer.
struct RespondentRecord {
  std::string id;
  std::vector<std::optional<double>> values;
  std::optional<DisorderLabel> label;

  bool operator==(const RespondentRecord&) const = default;
};

/// Labeled or unlabeled collection of records sharing one schema. Ids are
/// unique and every record validates; use make_dataset to construct.
struct Dataset {
  Schema schema = builtin_schema();
  std::vector<RespondentRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  bool fully_labeled() const noexcept;
};

/// Builds a Dataset, throwing ValidationError if a record is invalid or an id
/// repeats.
Dataset make_dataset(const Schema& schema, std::vector<RespondentRecord> records);

/// Subset of a dataset by record index, preserving the given order.
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

/// Converts one human-entered answer to its numeric code. Returns nullopt
/// for an empty (missing) cell. Text that is neither a number nor a known
/// category/alias yields a Violation.
struct IngestedValue {
  std::optional<double> value;
  std::optional<Violation> error;
};
IngestedValue ingest_value(const FeatureSpec& spec, std::string_view text);

/// Field-level violations of one record; empty iff the record is valid.
std::vector<Violation> validate_record(const RespondentRecord& record, const Schema& schema);

/// Reads CSV with a header naming the schema features plus optional "id" and
/// "target" columns. Throws ParseError, SchemaError or ValidationError.
Dataset load_dataset(std::istream& csv, const Schema& schema = builtin_schema());
Dataset load_dataset_file(const std::string& path, const Schema& schema = builtin_schema());

/// Writes the dataset in the same CSV format (numeric codes, shortest
/// round-trip numerals). A target column is written when any record is labeled.
void write_dataset(std::ostream& out, const Dataset& ds);

std::string format_number(double value);

}  // namespace bdscreen
