#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdscreen/service/assessment_log.hpp"
#include "bdscreen/service/vcbt_catalog.hpp"
#include "bdscreen/trained_model.hpp"

namespace bdscreen::service {

inline constexpr std::string_view kDisclaimer =
    "This screening result is an indication only and is not an exact diagnosis. "
    "Automated detection is not 100% accurate; please consult a qualified mental health professional.";

class ServiceUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class Conflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AssessmentResult {
  std::string assessment_id;
  DisorderLabel label = DisorderLabel::kDepression;
  std::string disclaimer;
  std::string model_kind;
  std::string timestamp;  // ISO 8601 UTC
};

struct AssessOutcome {
  AssessmentResult result;
  bool replayed = false;  // true when an idempotency key matched an earlier request
};

struct ConsentOutcome {
  std::string assessment_id;
  bool agreed = false;
  std::optional<std::string> route;
};

nlohmann::json to_json(const AssessmentResult& result);
nlohmann::json to_json(const ConsentOutcome& outcome);
nlohmann::json to_json(const VcbtCatalogEntry& entry);
/// Questionnaire schema as served to clients (all features required).
nlohmann::json schema_to_json(const Schema& schema);

/// Detection -> consent -> vCBT routing. The model and catalogs are immutable;
/// all mutable state (assessments, consents, idempotency keys) changes only
/// together with a log append, under one lock.
class ScreeningService {
 public:
  /// Replays `log_path` (if it exists) to restore prior assessments and
  /// consents, then appends to it. `model` may be empty, in which case
  /// assess() throws ServiceUnavailable.
  ScreeningService(std::optional<TrainedModel> model, const std::string& log_path);

  /// `answers` is a JSON object keyed by feature name holding numbers or the
  /// text categories/aliases of the questionnaire. Throws ValidationError with
  /// field-level violations, or ServiceUnavailable.
  AssessOutcome assess(const nlohmann::json& answers, const std::optional<std::string>& idempotency_key = {});

  /// Throws NotFound for an unknown id and Conflict if consent was recorded before.
  ConsentOutcome record_consent(const std::string& assessment_id, bool agreed);

  std::optional<AssessmentResult> find(const std::string& assessment_id) const;
  std::vector<AssessmentResult> assessments() const;  // in log order
  std::size_t consent_count() const;

  bool model_loaded() const noexcept { return model_.has_value(); }
  const Schema& intake_schema() const noexcept { return intake_schema_; }
  void flush() { log_.flush(); }

 private:
  RespondentRecord parse_answers(const nlohmann::json& answers) const;
  void restore(const std::vector<nlohmann::json>& records);

  std::optional<TrainedModel> model_;
  Schema intake_schema_;
  AssessmentLog log_;

  mutable std::mutex mu_;
  std::vector<AssessmentResult> ordered_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::string> by_key_;  // idempotency key -> assessment id
  std::map<std::string, bool> consents_;
};

}  // namespace bdscreen::service
