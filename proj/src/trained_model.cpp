#include "bdscreen/trained_model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bdscreen {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "bdscreen-model";
constexpr int kVersion = 1;

json preprocessor_to_json(const PreprocessorModel& p) {
  json bounds = json::array();
  for (const auto& b : p.bounds()) bounds.push_back({b.min, b.max});
  json categorical = json::array();
  for (bool c : p.categorical()) categorical.push_back(c);
  return {{"feature_order", p.feature_order()},
          {"imputation", p.imputation()},
          {"bounds", bounds},
          {"categorical", categorical}};
}

PreprocessorModel preprocessor_from_json(const json& j) {
  std::vector<Bounds> bounds;
  for (const auto& b : j.at("bounds")) bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  std::vector<bool> categorical;
  for (const auto& c : j.at("categorical")) categorical.push_back(c.get<bool>());
  auto order = j.at("feature_order").get<std::vector<std::string>>();
  auto imputation = j.at("imputation").get<std::vector<double>>();
  return PreprocessorModel(std::move(order), std::move(imputation), std::move(bounds), std::move(categorical));
}

DisorderLabel label_from_json(const json& j) {
  auto label = label_from_code(j.get<int>());
  if (!label) throw std::runtime_error("model file: label code " + j.dump() + " is not 1, 2 or 3");
  return *label;
}

json knn_to_json(const KnnModel& m) {
  json exemplars = json::array();
  json labels = json::array();
  for (const auto& e : m.exemplars()) {
    exemplars.push_back(e.x);
    labels.push_back(code(e.label));
  }
  return {{"k", m.k()}, {"metric", std::string(m.metric())}, {"exemplars", exemplars}, {"labels", labels}};
}

KnnModel knn_from_json(const json& j) {
  if (j.at("metric").get<std::string>() != kEuclidean) {
    throw std::runtime_error("model file: unsupported knn metric " + j.at("metric").dump());
  }
  const auto& xs = j.at("exemplars");
  const auto& ys = j.at("labels");
  if (xs.size() != ys.size()) throw std::runtime_error("model file: exemplar/label count mismatch");
  std::vector<Example> exemplars;
  exemplars.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const DisorderLabel label = label_from_json(ys[i]);
    exemplars.push_back({xs[i].get<std::vector<double>>(), label});
  }
  return KnnModel(std::move(exemplars), j.at("k").get<int>());
}

json svm_to_json(const MulticlassSvmModel& m) {
  json classes = json::array();
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    const auto& b = m.per_class[c];
    classes.push_back({{"label", code(kAllLabels[c])},
                       {"weights", b.weights},
                       {"bias", b.bias},
                       {"converged", b.converged},
                       {"iterations", b.iterations},
                       {"epochs", b.epochs},
                       {"final_violation", b.final_violation}});
  }
  return {{"kernel", "linear"},
          {"scheme", "one-vs-rest"},
          {"C", m.options.C},
          {"tol", m.options.tol},
          {"max_epochs", m.options.max_epochs},
          {"seed", m.options.seed},
          {"classes", classes}};
}

MulticlassSvmModel svm_from_json(const json& j) {
  MulticlassSvmModel m;
  m.options.C = j.at("C").get<double>();
  m.options.tol = j.at("tol").get<double>();
  m.options.max_epochs = j.at("max_epochs").get<int>();
  m.options.seed = j.at("seed").get<std::uint64_t>();
  const auto& classes = j.at("classes");
  if (classes.size() != kLabelCount) throw std::runtime_error("model file: svm needs exactly 3 class models");
  std::array<bool, kLabelCount> seen{};
  for (const auto& c : classes) {
    const DisorderLabel label = label_from_json(c.at("label"));
    if (seen[label_index(label)]) throw std::runtime_error("model file: duplicate svm class model");
    seen[label_index(label)] = true;
    BinarySvmModel& b = m.per_class[label_index(label)];
    b.weights = c.at("weights").get<std::vector<double>>();
    b.bias = c.at("bias").get<double>();
    b.C = m.options.C;
    b.converged = c.at("converged").get<bool>();
    b.iterations = c.value("iterations", std::size_t{0});
    b.epochs = c.value("epochs", std::size_t{0});
    b.final_violation = c.value("final_violation", 0.0);
  }
  return m;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  return kind == ClassifierKind::kKnn ? "knn" : "svm";
}

ClassifierKind classifier_kind_from_string(std::string_view name) {
  if (name == "knn") return ClassifierKind::kKnn;
  if (name == "svm") return ClassifierKind::kSvm;
  throw std::invalid_argument("unknown classifier kind '" + std::string(name) + "' (expected knn or svm)");
}

TrainedModel train_model(const Dataset& train, ClassifierKind kind, const ClassifierParams& params,
                         bool parallel) {
  if (!train.fully_labeled()) throw std::invalid_argument("train_model: training data has unlabeled records");
  PreprocessorModel pre = fit_preprocessor(train);
  std::vector<Example> examples;
  examples.reserve(train.size());
  for (const auto& rec : train.records) examples.push_back({transform(rec, pre).values, *rec.label});
  if (kind == ClassifierKind::kKnn) {
    return {std::move(pre), knn_fit(std::move(examples), params.knn_k)};
  }
  return {std::move(pre), svm_train_multiclass(examples, params.svm, parallel)};
}

ModelPrediction predict(const TrainedModel& model, const RespondentRecord& record) {
  ModelPrediction out;
  out.features = transform(record, model.preprocessor);
  if (const auto* knn = std::get_if<KnnModel>(&model.classifier)) {
    auto p = knn_predict(*knn, out.features.values);
    out.label = p.label;
    for (const auto& n : p.neighbors) out.scores[label_index(n.label)] += 1.0;
  } else {
    auto p = svm_predict(std::get<MulticlassSvmModel>(model.classifier), out.features.values);
    out.label = p.label;
    out.scores = p.decision_values;
  }
  return out;
}

std::vector<DisorderLabel> predict_all(const TrainedModel& model, const Dataset& ds, bool parallel) {
  std::vector<std::vector<double>> xs;
  xs.reserve(ds.size());
  for (const auto& rec : ds.records) xs.push_back(transform(rec, model.preprocessor).values);
  if (const auto* knn = std::get_if<KnnModel>(&model.classifier)) {
    return knn_predict_batch(*knn, xs, parallel);
  }
  const auto& svm = std::get<MulticlassSvmModel>(model.classifier);
  std::vector<DisorderLabel> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(svm_predict(svm, x).label);
  return out;
}

std::string model_to_json(const TrainedModel& model) {
  json j = {{"format", kFormat},
            {"version", kVersion},
            {"model_kind", to_string(model.kind())},
            {"preprocessor", preprocessor_to_json(model.preprocessor)}};
  if (const auto* knn = std::get_if<KnnModel>(&model.classifier)) {
    j["knn"] = knn_to_json(*knn);
  } else {
    j["svm"] = svm_to_json(std::get<MulticlassSvmModel>(model.classifier));
  }
  return j.dump(1);
}

TrainedModel model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("model file: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat) throw std::runtime_error("model file: unknown format");
    if (j.at("version").get<int>() != kVersion) throw std::runtime_error("model file: unsupported version");
    PreprocessorModel pre = preprocessor_from_json(j.at("preprocessor"));
    const auto kind = classifier_kind_from_string(j.at("model_kind").get<std::string>());
    auto classifier = kind == ClassifierKind::kKnn
                          ? std::variant<KnnModel, MulticlassSvmModel>(knn_from_json(j.at("knn")))
                          : std::variant<KnnModel, MulticlassSvmModel>(svm_from_json(j.at("svm")));
    TrainedModel model{std::move(pre), std::move(classifier)};
    const std::size_t dim = model.preprocessor.dimension();
    if (const auto* knn = std::get_if<KnnModel>(&model.classifier); knn && knn->dimension() != dim) {
      throw std::runtime_error("model file: exemplar dimension does not match preprocessor");
    }
    if (const auto* svm = std::get_if<MulticlassSvmModel>(&model.classifier)) {
      for (const auto& b : svm->per_class) {
        if (b.weights.size() != dim) throw std::runtime_error("model file: svm weight dimension mismatch");
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model file: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  out << model_to_json(model) << '\n';
  if (!out) throw std::runtime_error("failed writing model file '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace bdscreen
