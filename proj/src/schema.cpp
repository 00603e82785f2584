#include "bdscreen/schema.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace bdscreen {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

FeatureSpec binary(std::string name, std::string no = "no", std::string yes = "yes") {
  FeatureSpec spec;
  spec.name = std::move(name);
  spec.kind = FeatureKind::kBinary;
  spec.category_codes = {{std::move(no), 0}, {std::move(yes), 1}};
  spec.integral = true;
  return spec;
}

FeatureSpec ordinal(std::string name, double lo, double hi) {
  FeatureSpec spec;
  spec.name = std::move(name);
  spec.kind = FeatureKind::kOrdinalInteger;
  spec.bounds = {lo, hi};
  spec.integral = true;
  return spec;
}

FeatureSpec continuous(std::string name, double lo, double hi, bool integral = false) {
  FeatureSpec spec;
  spec.name = std::move(name);
  spec.kind = FeatureKind::kContinuous;
  spec.bounds = {lo, hi};
  spec.integral = integral;
  return spec;
}

void derive_code_bounds(FeatureSpec& spec) {
  if (!spec.is_categorical() || spec.category_codes.empty()) return;
  auto [lo, hi] = std::minmax_element(
      spec.category_codes.begin(), spec.category_codes.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  spec.bounds = {static_cast<double>(lo->second), static_cast<double>(hi->second)};
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kBinary: return "binary";
    case FeatureKind::kOrdinalInteger: return "ordinal-integer";
    case FeatureKind::kContinuous: return "continuous";
    case FeatureKind::kCategoricalText: return "categorical-text";
  }
  return "unknown";
}

bool FeatureSpec::has_code(int c) const noexcept {
  return std::any_of(category_codes.begin(), category_codes.end(),
                     [c](const auto& entry) { return entry.second == c; });
}

std::optional<int> FeatureSpec::code_for(std::string_view category) const {
  for (const auto& [text, c] : category_codes) {
    if (iequals(text, category)) return c;
  }
  return std::nullopt;
}

std::optional<std::string> FeatureSpec::category_for(int c) const {
  for (const auto& [text, assigned] : category_codes) {
    if (assigned == c) return text;
  }
  return std::nullopt;
}

std::optional<DisorderLabel> label_from_code(int c) noexcept {
  if (c < 1 || c > 3) return std::nullopt;
  return static_cast<DisorderLabel>(c);
}

std::optional<DisorderLabel> label_from_name(std::string_view name) noexcept {
  for (DisorderLabel label : kAllLabels) {
    if (iequals(label_name(label), name)) return label;
  }
  return std::nullopt;
}

std::string_view label_name(DisorderLabel label) noexcept {
  switch (label) {
    case DisorderLabel::kDepression: return "depression";
    case DisorderLabel::kInternetAddiction: return "internet_addiction";
    case DisorderLabel::kAnxiety: return "anxiety";
  }
  return "unknown";
}

Schema::Schema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  std::set<std::string> names;
  for (auto& spec : features_) {
    if (!names.insert(spec.name).second) {
      throw SchemaError("duplicate feature name '" + spec.name + "'");
    }
    if (spec.is_categorical()) {
      if (spec.category_codes.empty()) {
        throw SchemaError("feature '" + spec.name + "' has no category codes");
      }
      std::set<int> codes;
      for (const auto& entry : spec.category_codes) {
        if (!codes.insert(entry.second).second) {
          throw SchemaError("feature '" + spec.name + "' assigns code " +
                            std::to_string(entry.second) + " twice");
        }
      }
      derive_code_bounds(spec);
    }
    if (!(spec.bounds.min < spec.bounds.max)) {
      throw SchemaError("feature '" + spec.name + "' has degenerate bounds");
    }
  }
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

const FeatureSpec& Schema::at(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw SchemaError("unknown feature '" + std::string(name) + "'");
  return features_[*idx];
}

Schema Schema::with_all_required() const {
  auto copy = features_;
  for (auto& spec : copy) spec.required = true;
  return Schema(std::move(copy));
}

Schema Schema::with_bounds(std::string_view name, Bounds bounds) const {
  auto idx = index_of(name);
  if (!idx) throw SchemaError("unknown feature '" + std::string(name) + "'");
  auto copy = features_;
  if (copy[*idx].is_categorical()) {
    throw SchemaError("bounds of categorical feature '" + std::string(name) +
                      "' follow its codes and cannot be overridden");
  }
  copy[*idx].bounds = bounds;
  return Schema(std::move(copy));
}

const Schema& builtin_schema() {
  static const Schema schema = [] {
    std::vector<FeatureSpec> f;
    f.reserve(kFeatureCount);
    f.push_back(continuous("age", 15, 80, /*integral=*/true));
    f.push_back(binary("sex", "female", "male"));
    f.push_back(binary("literacy", "illiterate", "literate"));

    FeatureSpec marital;
    marital.name = "marital_status";
    marital.kind = FeatureKind::kCategoricalText;
    // Code 2 is deliberately unassigned.
    marital.category_codes = {{"married", 0}, {"unmarried", 1}, {"divorced", 3}};
    marital.integral = true;
    f.push_back(std::move(marital));

    f.push_back(binary("children"));
    f.push_back(binary("employed", "unemployed", "employed"));
    f.push_back(ordinal("socio_economic_status", 1, 5));
    f.push_back(binary("drug_addiction"));
    f.push_back(binary("chronic_disease"));
    f.push_back(binary("medication"));
    f.push_back(ordinal("education", 1, 5));
    f.push_back(ordinal("financial_status", 0, 10));
    f.push_back(continuous("income", 0, 500000));
    f.push_back(continuous("sleeping_hour", 0, 24));
    f.push_back(binary("result_satisfaction"));
    f.push_back(binary("feelings_of_overwhelm"));
    f.push_back(binary("extracurricular_activities"));
    auto hangout = ordinal("hangout_hours", 0, 10);
    hangout.category_codes = {{"no", 0}};
    f.push_back(std::move(hangout));
    return Schema(std::move(f));
  }();
  return schema;
}

}  // namespace bdscreen
