#include "bdscreen/knn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace bdscreen {

KnnModel::KnnModel(std::vector<Example> exemplars, int k) : exemplars_(std::move(exemplars)), k_(k) {
  if (exemplars_.empty()) throw std::invalid_argument("knn: no training exemplars");
  if (k_ < 1 || static_cast<std::size_t>(k_) > exemplars_.size()) {
    throw std::invalid_argument("knn: k=" + std::to_string(k_) + " must be in [1, " +
                                std::to_string(exemplars_.size()) + "]");
  }
  const std::size_t dim = exemplars_.front().x.size();
  for (const auto& e : exemplars_) {
    if (e.x.size() != dim) throw std::invalid_argument("knn: exemplars differ in dimension");
  }
}

KnnModel knn_fit(std::vector<Example> train, int k) { return KnnModel(std::move(train), k); }

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("euclidean_distance: length " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

KnnPrediction knn_predict(const KnnModel& model, std::span<const double> x) {
  const auto& ex = model.exemplars();
  if (x.size() != model.dimension()) {
    throw std::invalid_argument("knn_predict: query has dimension " + std::to_string(x.size()) +
                                ", model " + std::to_string(model.dimension()));
  }
  std::vector<Neighbor> all;
  all.reserve(ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    all.push_back({euclidean_distance(x, ex[i].x), ex[i].label, i});
  }
  const auto k = static_cast<std::size_t>(model.k());
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
  all.resize(k);

  std::array<int, kLabelCount> votes{};
  std::array<double, kLabelCount> dist_sum{};
  for (const auto& n : all) {
    ++votes[label_index(n.label)];
    dist_sum[label_index(n.label)] += n.distance;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kLabelCount; ++c) {
    // Strictly better only; equal count and equal sum keep the smaller code.
    if (votes[c] > votes[best] || (votes[c] == votes[best] && dist_sum[c] < dist_sum[best])) {
      best = c;
    }
  }
  return {kAllLabels[best], std::move(all)};
}

std::vector<DisorderLabel> knn_predict_batch(const KnnModel& model,
                                             const std::vector<std::vector<double>>& queries,
                                             bool parallel) {
  for (const auto& q : queries) {
    if (q.size() != model.dimension()) {
      throw std::invalid_argument("knn_predict_batch: query dimension mismatch");
    }
  }
  std::vector<DisorderLabel> out(queries.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = knn_predict(model, queries[i]).label;
  };
  const std::size_t threads =
      parallel ? std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                                       queries.size() / 64 + 1)
               : 1;
  if (threads <= 1) {
    work(0, queries.size());
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (queries.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(queries.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
  }  // joins
  return out;
}

}  // namespace bdscreen
