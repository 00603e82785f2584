#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "bdscreen/data_model.hpp"
#include "bdscreen/knn.hpp"
#include "bdscreen/preprocess.hpp"
#include "bdscreen/svm.hpp"

namespace bdscreen {

enum class ClassifierKind { kKnn, kSvm };
std::string_view to_string(ClassifierKind kind);
/// Throws std::invalid_argument for anything but "knn" or "svm".
ClassifierKind classifier_kind_from_string(std::string_view name);

struct ClassifierParams {
  int knn_k = 3;
  SvmOptions svm;
};

/// Preprocessor plus fitted classifier: everything needed to score a raw record.
struct TrainedModel {
  PreprocessorModel preprocessor;
  std::variant<KnnModel, MulticlassSvmModel> classifier;

  ClassifierKind kind() const noexcept {
    return std::holds_alternative<KnnModel>(classifier) ? ClassifierKind::kKnn : ClassifierKind::kSvm;
  }
};

struct ModelPrediction {
  DisorderLabel label = DisorderLabel::kDepression;
  FeatureVector features;
  std::array<double, kLabelCount> scores{};  // svm: decision values; knn: neighbor votes
};

/// Fits the preprocessor on `train` then the requested classifier. Every
/// record must be labeled.
TrainedModel train_model(const Dataset& train, ClassifierKind kind, const ClassifierParams& params,
                         bool parallel = true);

ModelPrediction predict(const TrainedModel& model, const RespondentRecord& record);
std::vector<DisorderLabel> predict_all(const TrainedModel& model, const Dataset& ds, bool parallel = true);

/// Model file: a JSON envelope {"format", "version", "model_kind", "preprocessor",
/// and a "knn" or "svm" body}.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace bdscreen
