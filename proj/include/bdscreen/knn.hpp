#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "bdscreen/schema.hpp"

namespace bdscreen {

/// A training vector with its label.
struct Example {
  std::vector<double> x;
  DisorderLabel label = DisorderLabel::kDepression;
};

struct Neighbor {
  double distance = 0.0;
  DisorderLabel label = DisorderLabel::kDepression;
  std::size_t index = 0;  // position in the model's exemplar list
};

struct KnnPrediction {
  DisorderLabel label = DisorderLabel::kDepression;
  std::vector<Neighbor> neighbors;  // the k nearest, closest first
};

inline constexpr std::string_view kEuclidean = "euclidean";

/// Instance-based classifier: stores exemplars verbatim and searches them
/// exhaustively at prediction time.
class KnnModel {
 public:
  KnnModel(std::vector<Example> exemplars, int k);

  int k() const noexcept { return k_; }
  std::string_view metric() const noexcept { return kEuclidean; }
  const std::vector<Example>& exemplars() const noexcept { return exemplars_; }
  std::size_t dimension() const noexcept { return exemplars_.front().x.size(); }

 private:
  std::vector<Example> exemplars_;
  int k_;
};

KnnModel knn_fit(std::vector<Example> train, int k = 3);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Majority vote over the k nearest exemplars. Distance ties go to the lower
/// exemplar index; vote ties go to the label with the smaller summed neighbor
/// distance, then to the smaller label code.
KnnPrediction knn_predict(const KnnModel& model, std::span<const double> x);

/// Predicts every query; runs across hardware threads when `parallel` is set.
/// Output equals sequential prediction element for element.
std::vector<DisorderLabel> knn_predict_batch(const KnnModel& model,
                                             const std::vector<std::vector<double>>& queries,
                                             bool parallel = true);

}  // namespace bdscreen
