#include "bdscreen/preprocess.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace bdscreen {

PreprocessorModel::PreprocessorModel(std::vector<std::string> feature_order,
                                     std::vector<double> imputation, std::vector<Bounds> bounds,
                                     std::vector<bool> categorical)
    : feature_order_(std::move(feature_order)),
      imputation_(std::move(imputation)),
      bounds_(std::move(bounds)),
      categorical_(std::move(categorical)) {
  const std::size_t n = feature_order_.size();
  if (imputation_.size() != n || bounds_.size() != n || categorical_.size() != n) {
    throw ConfigError("preprocessor: inconsistent per-feature array lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Bounds& b = bounds_[i];
    if (!(b.min < b.max)) throw ConfigError("preprocessor: degenerate bounds for " + feature_order_[i]);
    if (!(imputation_[i] >= b.min && imputation_[i] <= b.max)) {
      throw ConfigError("preprocessor: imputation value out of bounds for " + feature_order_[i]);
    }
  }
}

void PreprocessorModel::check_compatible(const Schema& schema) const {
  if (schema.size() != dimension()) {
    throw SchemaError("model expects " + std::to_string(dimension()) + " features, schema has " +
                      std::to_string(schema.size()));
  }
  for (std::size_t i = 0; i < dimension(); ++i) {
    const auto& spec = schema[i];
    if (spec.name != feature_order_[i] || spec.bounds.min != bounds_[i].min ||
        spec.bounds.max != bounds_[i].max) {
      throw SchemaError("model feature " + std::to_string(i) + " ('" + feature_order_[i] +
                        "') does not match schema feature '" + spec.name + "'");
    }
  }
}

PreprocessorModel fit_preprocessor(const Dataset& train) {
  if (train.empty()) throw std::invalid_argument("fit_preprocessor: empty dataset");
  const Schema& schema = train.schema;
  std::vector<std::string> order;
  std::vector<double> fill;
  std::vector<Bounds> bounds;
  std::vector<bool> categorical;

  for (std::size_t f = 0; f < schema.size(); ++f) {
    const FeatureSpec& spec = schema[f];
    order.push_back(spec.name);
    bounds.push_back(spec.bounds);
    categorical.push_back(spec.is_categorical());

    if (spec.is_categorical()) {
      std::map<double, std::size_t> counts;  // ordered: ties resolve to the smallest code
      for (const auto& rec : train.records) {
        if (rec.values[f]) ++counts[*rec.values[f]];
      }
      if (counts.empty()) {
        throw std::invalid_argument("fit_preprocessor: feature '" + spec.name + "' is entirely missing");
      }
      auto best = counts.begin();
      for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
      }
      fill.push_back(best->first);
    } else {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& rec : train.records) {
        if (rec.values[f]) {
          sum += *rec.values[f];
          ++n;
        }
      }
      if (n == 0) {
        throw std::invalid_argument("fit_preprocessor: feature '" + spec.name + "' is entirely missing");
      }
      fill.push_back(sum / static_cast<double>(n));
    }
  }
  return PreprocessorModel(std::move(order), std::move(fill), std::move(bounds), std::move(categorical));
}

RespondentRecord impute(const RespondentRecord& record, const PreprocessorModel& model) {
  if (record.values.size() != model.dimension()) {
    throw std::invalid_argument("impute: record has " + std::to_string(record.values.size()) +
                                " values, model expects " + std::to_string(model.dimension()));
  }
  RespondentRecord out = record;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!out.values[i]) out.values[i] = model.imputation()[i];
  }
  return out;
}

double normalize_value(double x, Bounds bounds) {
  if (!(bounds.min < bounds.max)) throw ConfigError("normalize_value: degenerate bounds");
  if (!(x >= bounds.min && x <= bounds.max)) {
    throw std::domain_error("normalize_value: " + format_number(x) + " outside [" +
                            format_number(bounds.min) + ", " + format_number(bounds.max) + "]");
  }
  return (x - bounds.min) / (bounds.max - bounds.min);
}

FeatureVector transform(const RespondentRecord& record, const PreprocessorModel& model) {
  const RespondentRecord filled = impute(record, model);
  FeatureVector out;
  out.source_id = record.id;
  out.values.reserve(model.dimension());
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    out.values.push_back(normalize_value(*filled.values[i], model.bounds()[i]));
  }
  return out;
}

std::vector<FeatureVector> transform_all(const Dataset& ds, const PreprocessorModel& model) {
  std::vector<FeatureVector> out;
  out.reserve(ds.size());
  for (const auto& rec : ds.records) out.push_back(transform(rec, model));
  return out;
}

}  // namespace bdscreen
