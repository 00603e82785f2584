#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "bdscreen/knn.hpp"

namespace bdscreen::testing {

// Full sort of every exemplar by (distance, index), then the vote rule.
inline DisorderLabel knn_oracle(const std::vector<Example>& ex, int k, const std::vector<double>& q) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    double s = 0;
    for (std::size_t d = 0; d < q.size(); ++d) s += (ex[i].x[d] - q[d]) * (ex[i].x[d] - q[d]);
    all.emplace_back(std::sqrt(s), i);
  }
  std::sort(all.begin(), all.end());
  std::array<int, 3> votes{};
  std::array<double, 3> dist{};
  for (int j = 0; j < k; ++j) {
    const auto c = label_index(ex[all[j].second].label);
    ++votes[c];
    dist[c] += all[j].first;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < 3; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && dist[c] < dist[best])) best = c;
  }
  return kAllLabels[best];
}

// Random KNN trial; every third trial draws coordinates from a tiny grid so
// distance and vote ties are frequent.
struct KnnTrial {
  std::vector<Example> exemplars;
  int k = 1;
  std::vector<double> query;
};

inline KnnTrial random_knn_trial(std::mt19937_64& rng, std::size_t trial, std::size_t dim = 18) {
  KnnTrial t;
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
  t.k = std::uniform_int_distribution<int>(1, static_cast<int>(std::min<std::size_t>(7, n)))(rng);
  const bool ties = trial % 3 == 0;
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> grid(0, 1);
  std::uniform_int_distribution<int> lab(0, 2);
  auto coord = [&] { return ties ? static_cast<double>(grid(rng)) : u(rng); };
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    e.x.resize(dim);
    for (auto& v : e.x) v = coord();
    e.label = kAllLabels[lab(rng)];
    t.exemplars.push_back(std::move(e));
  }
  if (ties && n > 1 && trial % 2 == 0) {
    // exact duplicates with different labels
    t.exemplars[1].x = t.exemplars[0].x;
    t.exemplars[1].label = kAllLabels[(label_index(t.exemplars[0].label) + 1) % 3];
  }
  t.query.resize(dim);
  for (auto& v : t.query) v = coord();
  return t;
}

}  // namespace bdscreen::testing
