#include <gtest/gtest.h>

#include <sstream>

#include "bdscreen/synth.hpp"

using namespace bdscreen;

namespace {

std::array<std::size_t, 3> label_counts(const Dataset& ds) {
  std::array<std::size_t, 3> c{};
  for (const auto& r : ds.records) ++c[label_index(*r.label)];
  return c;
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  write_dataset(out, ds);
  return out.str();
}

}  // namespace

TEST(Generate, ExactLabelCountsFromPriors) {
  GeneratorConfig cfg;
  EXPECT_EQ(label_counts(generate(cfg)), (std::array<std::size_t, 3>{610, 290, 100}));
  cfg.n = 101;
  const auto c = label_counts(generate(cfg));
  EXPECT_EQ(c[0] + c[1] + c[2], 101u);
  EXPECT_EQ(c[0], 62u);
}

TEST(Generate, DeterministicForSeed) {
  GeneratorConfig cfg;
  cfg.n = 200;
  cfg.seed = 7;
  EXPECT_EQ(to_csv(generate(cfg)), to_csv(generate(cfg)));
  GeneratorConfig other = cfg;
  other.seed = 8;
  EXPECT_NE(to_csv(generate(cfg)), to_csv(generate(other)));
}

TEST(Generate, RecordsAreCompleteAndValid) {
  GeneratorConfig cfg;
  cfg.n = 300;
  cfg.separability = 1.0;
  const Dataset ds = generate(cfg);
  const Schema required = builtin_schema().with_all_required();
  for (const auto& r : ds.records) {
    EXPECT_TRUE(validate_record(r, required).empty()) << r.id;
    ASSERT_TRUE(r.label.has_value());
  }
  EXPECT_EQ(ds.records.front().id, "s00001");
}

TEST(Generate, ConfigValidation) {
  GeneratorConfig cfg;
  cfg.n = 5;
  EXPECT_THROW(generate(cfg), std::invalid_argument);
  cfg = {};
  cfg.class_priors = {0.5, 0.3, 0.1};
  EXPECT_THROW(validate_config(cfg), std::invalid_argument);
  cfg = {};
  cfg.separability = 1.5;
  EXPECT_THROW(validate_config(cfg), std::invalid_argument);
  cfg = {};
  cfg.marginals.female_fraction = 1.2;
  EXPECT_THROW(validate_config(cfg), std::invalid_argument);
}

TEST(Generate, ConfigFromJson) {
  const auto cfg = generator_config_from_json(R"({"n": 120, "seed": 9, "separability": 0.25})");
  EXPECT_EQ(cfg.n, 120u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_DOUBLE_EQ(cfg.separability, 0.25);
  EXPECT_DOUBLE_EQ(cfg.class_priors[0], 0.61);
}

TEST(Generate, SeparabilityShiftsClassMeans) {
  auto sleep_gap = [](double s) {
    GeneratorConfig cfg;
    cfg.n = 3000;
    cfg.separability = s;
    const Dataset ds = generate(cfg);
    std::array<double, 3> sum{};
    std::array<double, 3> cnt{};
    for (const auto& r : ds.records) {
      sum[label_index(*r.label)] += *r.values[feature::kSleepingHour];
      cnt[label_index(*r.label)] += 1;
    }
    double lo = 1e9, hi = -1e9;
    for (int c = 0; c < 3; ++c) {
      lo = std::min(lo, sum[c] / cnt[c]);
      hi = std::max(hi, sum[c] / cnt[c]);
    }
    return hi - lo;
  };
  EXPECT_LT(sleep_gap(0.0), 0.3);
  EXPECT_GT(sleep_gap(1.0), 1.0);
}

TEST(GenerateSeparable, EqualThirdsAndValid) {
  const Dataset ds = generate_separable(300, 1);
  EXPECT_EQ(label_counts(ds), (std::array<std::size_t, 3>{100, 100, 100}));
  for (const auto& r : ds.records) EXPECT_TRUE(validate_record(r, builtin_schema().with_all_required()).empty());
}
