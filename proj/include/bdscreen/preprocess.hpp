#pragma once

#include <string>
#include <vector>

#include "bdscreen/data_model.hpp"
#include "bdscreen/schema.hpp"

namespace bdscreen {

/// Numeric, normalized representation of a record: one component per schema
/// feature in declaration order, each in [0,1].
struct FeatureVector {
  std::vector<double> values;
  std::string source_id;
};

/// Imputation values fitted on training data plus the schema bounds used for
/// min-max scaling. Immutable after fit.
class PreprocessorModel {
 public:
  PreprocessorModel(std::vector<std::string> feature_order, std::vector<double> imputation,
                    std::vector<Bounds> bounds, std::vector<bool> categorical);

  const std::vector<std::string>& feature_order() const noexcept { return feature_order_; }
  const std::vector<double>& imputation() const noexcept { return imputation_; }
  const std::vector<Bounds>& bounds() const noexcept { return bounds_; }
  const std::vector<bool>& categorical() const noexcept { return categorical_; }
  std::size_t dimension() const noexcept { return feature_order_.size(); }

  /// Throws SchemaError unless the schema has the same features in the same
  /// order and the same bounds.
  void check_compatible(const Schema& schema) const;

 private:
  std::vector<std::string> feature_order_;
  std::vector<double> imputation_;
  std::vector<Bounds> bounds_;
  std::vector<bool> categorical_;
};

/// Mean for numeric features, mode (ties -> smallest code) for binary and
/// categorical ones. Uses only the given (training) records.
PreprocessorModel fit_preprocessor(const Dataset& train);

RespondentRecord impute(const RespondentRecord& record, const PreprocessorModel& model);

/// (x - min) / (max - min). Throws ConfigError on degenerate bounds and
/// std::domain_error when x lies outside them.
double normalize_value(double x, Bounds bounds);

FeatureVector transform(const RespondentRecord& record, const PreprocessorModel& model);
std::vector<FeatureVector> transform_all(const Dataset& ds, const PreprocessorModel& model);

}  // namespace bdscreen
