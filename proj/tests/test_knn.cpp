#include <gtest/gtest.h>

#include <cmath>

#include "bdscreen/knn.hpp"
#include "oracles.hpp"

using namespace bdscreen;
using bdscreen::testing::knn_oracle;

namespace {

Example ex(std::vector<double> x, int label) { return {std::move(x), *label_from_code(label)}; }

}  // namespace

TEST(Euclidean, EighteenOnes) {
  const std::vector<double> zeros(18, 0.0), ones(18, 1.0);
  EXPECT_NEAR(euclidean_distance(zeros, ones), 4.242640687119285, 1e-12);
  EXPECT_DOUBLE_EQ(euclidean_distance(ones, ones), 0.0);
}

TEST(Euclidean, LengthMismatchThrows) {
  const std::vector<double> a(3, 0.0), b(4, 0.0);
  EXPECT_THROW(euclidean_distance(a, b), std::invalid_argument);
}

TEST(KnnModel, RejectsBadK) {
  std::vector<Example> e{ex({0}, 1), ex({1}, 2)};
  EXPECT_THROW(knn_fit(e, 0), std::invalid_argument);
  EXPECT_THROW(knn_fit(e, 3), std::invalid_argument);
  EXPECT_THROW(knn_fit({}, 1), std::invalid_argument);
  EXPECT_THROW(knn_fit({ex({0}, 1), ex({0, 1}, 2)}, 1), std::invalid_argument);
}

TEST(KnnPredict, MajorityOfThree) {
  const auto m = knn_fit({ex({0}, 1), ex({1}, 2), ex({2}, 2), ex({10}, 3)}, 3);
  const auto p = knn_predict(m, std::vector<double>{1.2});
  EXPECT_EQ(p.label, DisorderLabel::kInternetAddiction);
  ASSERT_EQ(p.neighbors.size(), 3u);
  EXPECT_EQ(p.neighbors[0].index, 1u);
  EXPECT_EQ(p.neighbors[1].index, 2u);
  EXPECT_EQ(p.neighbors[2].index, 0u);
}

TEST(KnnPredict, DistanceTieGoesToLowerIndex) {
  const auto m = knn_fit({ex({-1}, 3), ex({1}, 2)}, 1);
  EXPECT_EQ(knn_predict(m, std::vector<double>{0}).label, DisorderLabel::kAnxiety);
  const auto m2 = knn_fit({ex({1}, 2), ex({-1}, 3)}, 1);
  EXPECT_EQ(knn_predict(m2, std::vector<double>{0}).label, DisorderLabel::kInternetAddiction);
}

TEST(KnnPredict, VoteTieGoesToSmallerSummedDistance) {
  // 1-1 between labels 3 and 2 with k=2; label 3 is closer.
  const auto m = knn_fit({ex({0.5}, 2), ex({0.2}, 3), ex({9}, 1)}, 2);
  EXPECT_EQ(knn_predict(m, std::vector<double>{0}).label, DisorderLabel::kAnxiety);
}

TEST(KnnPredict, FullTieGoesToSmallerCode) {
  const auto m = knn_fit({ex({1}, 3), ex({-1}, 2)}, 2);
  EXPECT_EQ(knn_predict(m, std::vector<double>{0}).label, DisorderLabel::kInternetAddiction);
}

TEST(KnnPredict, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  for (std::size_t trial = 0; trial < 300; ++trial) {
    const auto t = bdscreen::testing::random_knn_trial(rng, trial);
    const auto m = knn_fit(t.exemplars, t.k);
    ASSERT_EQ(knn_predict(m, t.query).label, knn_oracle(t.exemplars, t.k, t.query)) << "trial " << trial;
  }
}

TEST(KnnPredict, BatchEqualsSequential) {
  std::mt19937_64 rng(5);
  const auto t = bdscreen::testing::random_knn_trial(rng, 1);
  const auto m = knn_fit(t.exemplars, t.k);
  std::vector<std::vector<double>> queries;
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> q(18);
    for (auto& v : q) v = u(rng);
    queries.push_back(q);
  }
  const auto par = knn_predict_batch(m, queries, true);
  const auto seq = knn_predict_batch(m, queries, false);
  ASSERT_EQ(par.size(), queries.size());
  EXPECT_EQ(par, seq);
  for (std::size_t i = 0; i < queries.size(); ++i) EXPECT_EQ(par[i], knn_predict(m, queries[i]).label);
}

TEST(KnnPredict, BatchRejectsWrongDimension) {
  const auto m = knn_fit({ex({0, 0}, 1)}, 1);
  EXPECT_THROW(knn_predict_batch(m, {{0, 0}, {1}}), std::invalid_argument);
}
