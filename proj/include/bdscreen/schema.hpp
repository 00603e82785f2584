#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bdscreen/errors.hpp"

namespace bdscreen {

enum class FeatureKind { kBinary, kOrdinalInteger, kContinuous, kCategoricalText };

std::string_view to_string(FeatureKind kind);

struct Bounds {
  double min = 0.0;
  double max = 0.0;
};

/// Declarative description of one questionnaire feature. Binary and
/// categorical features carry their text->code table; their bounds are the
/// smallest and largest assigned code. On numeric features category_codes
/// holds text aliases accepted at intake (hangout_hours: "No" -> 0).
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  Bounds bounds;
  std::vector<std::pair<std::string, int>> category_codes;
  bool required = false;
  bool integral = false;  // value must be a whole number (age, ordinal scales)

  bool is_categorical() const noexcept {
    return kind == FeatureKind::kBinary || kind == FeatureKind::kCategoricalText;
  }
  bool has_code(int code) const noexcept;
  std::optional<int> code_for(std::string_view category) const;
  std::optional<std::string> category_for(int code) const;
};

/// Disorder label codes used as the classification target.
enum class DisorderLabel : int { kDepression = 1, kInternetAddiction = 2, kAnxiety = 3 };

inline constexpr DisorderLabel kAllLabels[] = {DisorderLabel::kDepression,
                                               DisorderLabel::kInternetAddiction,
                                               DisorderLabel::kAnxiety};
inline constexpr std::size_t kLabelCount = 3;

inline constexpr int code(DisorderLabel label) noexcept { return static_cast<int>(label); }
inline constexpr std::size_t label_index(DisorderLabel label) noexcept {
  return static_cast<std::size_t>(code(label) - 1);
}
std::optional<DisorderLabel> label_from_code(int code) noexcept;
std::optional<DisorderLabel> label_from_name(std::string_view name) noexcept;
std::string_view label_name(DisorderLabel label) noexcept;

/// Ordered feature registry. Order is the declaration order and is also the
/// component order of every FeatureVector.
class Schema {
 public:
  explicit Schema(std::vector<FeatureSpec> features);

  std::size_t size() const noexcept { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const noexcept { return features_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  const FeatureSpec& at(std::string_view name) const;

  /// Copy with every feature marked required (used for interactive intake).
  Schema with_all_required() const;
  /// Copy with the bounds of one continuous/ordinal feature replaced.
  Schema with_bounds(std::string_view name, Bounds bounds) const;

 private:
  std::vector<FeatureSpec> features_;
};

inline constexpr std::size_t kFeatureCount = 18;

/// Indices into the builtin schema.
namespace feature {
inline constexpr std::size_t kAge = 0;
inline constexpr std::size_t kSex = 1;
inline constexpr std::size_t kLiteracy = 2;
inline constexpr std::size_t kMaritalStatus = 3;
inline constexpr std::size_t kChildren = 4;
inline constexpr std::size_t kEmployed = 5;
inline constexpr std::size_t kSocioEconomicStatus = 6;
inline constexpr std::size_t kDrugAddiction = 7;
inline constexpr std::size_t kChronicDisease = 8;
inline constexpr std::size_t kMedication = 9;
inline constexpr std::size_t kEducation = 10;
inline constexpr std::size_t kFinancialStatus = 11;
inline constexpr std::size_t kIncome = 12;
inline constexpr std::size_t kSleepingHour = 13;
inline constexpr std::size_t kResultSatisfaction = 14;
inline constexpr std::size_t kFeelingsOfOverwhelm = 15;
inline constexpr std::size_t kExtracurricular = 16;
inline constexpr std::size_t kHangoutHours = 17;
}  // namespace feature

/// The fixed 18-feature questionnaire registry.
const Schema& builtin_schema();

}  // namespace bdscreen
