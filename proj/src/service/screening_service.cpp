#include "bdscreen/service/screening_service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <random>

namespace bdscreen::service {
namespace {

using nlohmann::json;

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(millis));
  return buf;
}

std::string random_token() {
  static thread_local std::mt19937_64 rng{[] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

std::string json_value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

json to_json(const AssessmentResult& r) {
  return {{"assessment_id", r.assessment_id},
          {"label", code(r.label)},
          {"label_name", std::string(label_name(r.label))},
          {"disclaimer", r.disclaimer},
          {"model_kind", r.model_kind},
          {"timestamp", r.timestamp}};
}

json to_json(const ConsentOutcome& c) {
  json j = {{"assessment_id", c.assessment_id}, {"agreed", c.agreed}};
  if (c.route) {
    j["route"] = *c.route;
  } else {
    j["message"] = "Consent declined. No therapy content will be shown.";
  }
  return j;
}

json to_json(const VcbtCatalogEntry& entry) {
  json items = json::array();
  for (const auto& item : entry.items) {
    json i = {{"title", item.title}, {"description", item.description}, {"kind", std::string(to_string(item.kind))}};
    if (item.link) i["link"] = *item.link;
    items.push_back(std::move(i));
  }
  return {{"disorder", entry.disorder}, {"heading", entry.heading}, {"items", items}};
}

json schema_to_json(const Schema& schema) {
  json features = json::array();
  for (const auto& spec : schema.features()) {
    json f = {{"name", spec.name},
              {"kind", std::string(to_string(spec.kind))},
              {"required", spec.required},
              {"integral", spec.integral},
              {"min", spec.bounds.min},
              {"max", spec.bounds.max}};
    if (!spec.category_codes.empty()) {
      json codes = json::array();
      for (const auto& [text, c] : spec.category_codes) codes.push_back({{"label", text}, {"code", c}});
      f[spec.is_categorical() ? "categories" : "aliases"] = codes;
    }
    features.push_back(std::move(f));
  }
  return {{"version", 1}, {"features", features}};
}

ScreeningService::ScreeningService(std::optional<TrainedModel> model, const std::string& log_path)
    : model_(std::move(model)),
      intake_schema_(builtin_schema().with_all_required()),
      log_(log_path) {
  if (model_) model_->preprocessor.check_compatible(intake_schema_);
  if (!log_path.empty()) restore(AssessmentLog::replay(log_path));
}

void ScreeningService::restore(const std::vector<json>& records) {
  for (const auto& rec : records) {
    const std::string type = rec.value("type", "");
    if (type == "assessment") {
      AssessmentResult r;
      r.assessment_id = rec.at("assessment_id").get<std::string>();
      auto label = label_from_code(rec.at("label").get<int>());
      if (!label) throw std::runtime_error("assessment log: bad label for " + r.assessment_id);
      r.label = *label;
      r.disclaimer = std::string(kDisclaimer);
      r.model_kind = rec.value("model_kind", "");
      r.timestamp = rec.value("timestamp", "");
      by_id_[r.assessment_id] = ordered_.size();
      if (rec.contains("idempotency_key")) by_key_[rec["idempotency_key"].get<std::string>()] = r.assessment_id;
      ordered_.push_back(std::move(r));
    } else if (type == "consent") {
      consents_[rec.at("assessment_id").get<std::string>()] = rec.at("agreed").get<bool>();
    }
  }
}

RespondentRecord ScreeningService::parse_answers(const json& answers) const {
  if (!answers.is_object()) {
    throw ValidationError({{"answers", json_value_text(answers), "expected a JSON object keyed by feature name"}});
  }
  RespondentRecord record;
  record.values.assign(intake_schema_.size(), std::nullopt);
  std::vector<Violation> problems;
  for (const auto& [name, value] : answers.items()) {
    const auto idx = intake_schema_.index_of(name);
    if (!idx) {
      problems.push_back({name, json_value_text(value), "unknown field"});
      continue;
    }
    const FeatureSpec& spec = intake_schema_[*idx];
    if (value.is_null()) continue;
    if (value.is_number()) {
      record.values[*idx] = value.get<double>();
    } else if (value.is_string()) {
      auto ingested = ingest_value(spec, value.get<std::string>());
      if (ingested.error) {
        problems.push_back(std::move(*ingested.error));
      } else {
        record.values[*idx] = ingested.value;
      }
    } else if (value.is_boolean() && spec.kind == FeatureKind::kBinary) {
      record.values[*idx] = value.get<bool>() ? 1.0 : 0.0;
    } else {
      problems.push_back({name, json_value_text(value), "expected a number or text answer"});
    }
  }
  for (auto& v : validate_record(record, intake_schema_)) {
    const bool already = std::any_of(problems.begin(), problems.end(),
                                     [&](const Violation& p) { return p.feature == v.feature; });
    if (!already) problems.push_back(std::move(v));
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return record;
}

AssessOutcome ScreeningService::assess(const json& answers, const std::optional<std::string>& idempotency_key) {
  if (!model_) throw ServiceUnavailable("no model loaded");
  if (idempotency_key) {
    std::lock_guard lock(mu_);
    if (auto it = by_key_.find(*idempotency_key); it != by_key_.end()) {
      return {ordered_[by_id_.at(it->second)], true};
    }
  }
  RespondentRecord record = parse_answers(answers);
  const ModelPrediction prediction = predict(*model_, record);

  AssessmentResult result;
  result.label = prediction.label;
  result.disclaimer = std::string(kDisclaimer);
  result.model_kind = std::string(to_string(model_->kind()));
  result.timestamp = now_iso8601();

  json stored_answers = json::object();
  for (std::size_t i = 0; i < intake_schema_.size(); ++i) {
    stored_answers[intake_schema_[i].name] = *record.values[i];
  }

  std::lock_guard lock(mu_);
  if (idempotency_key) {
    // A concurrent request with the same key may have won the race.
    if (auto it = by_key_.find(*idempotency_key); it != by_key_.end()) {
      return {ordered_[by_id_.at(it->second)], true};
    }
  }
  do {
    result.assessment_id = random_token();
  } while (by_id_.count(result.assessment_id));

  json entry = {{"type", "assessment"},
                {"timestamp", result.timestamp},
                {"assessment_id", result.assessment_id},
                {"answers", stored_answers},
                {"label", code(result.label)},
                {"model_kind", result.model_kind}};
  if (idempotency_key) entry["idempotency_key"] = *idempotency_key;
  log_.append(entry);

  by_id_[result.assessment_id] = ordered_.size();
  if (idempotency_key) by_key_[*idempotency_key] = result.assessment_id;
  ordered_.push_back(result);
  return {std::move(result), false};
}

ConsentOutcome ScreeningService::record_consent(const std::string& assessment_id, bool agreed) {
  std::lock_guard lock(mu_);
  auto it = by_id_.find(assessment_id);
  if (it == by_id_.end()) throw NotFound("unknown assessment '" + assessment_id + "'");
  if (consents_.count(assessment_id)) throw Conflict("consent already recorded for '" + assessment_id + "'");

  log_.append({{"type", "consent"}, {"timestamp", now_iso8601()}, {"assessment_id", assessment_id}, {"agreed", agreed}});
  consents_[assessment_id] = agreed;

  ConsentOutcome out{assessment_id, agreed, std::nullopt};
  if (agreed) out.route = vcbt_route(ordered_[it->second].label);
  return out;
}

std::optional<AssessmentResult> ScreeningService::find(const std::string& assessment_id) const {
  std::lock_guard lock(mu_);
  auto it = by_id_.find(assessment_id);
  if (it == by_id_.end()) return std::nullopt;
  return ordered_[it->second];
}

std::vector<AssessmentResult> ScreeningService::assessments() const {
  std::lock_guard lock(mu_);
  return ordered_;
}

std::size_t ScreeningService::consent_count() const {
  std::lock_guard lock(mu_);
  return consents_.size();
}

}  // namespace bdscreen::service
