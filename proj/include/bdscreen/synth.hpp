#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "bdscreen/data_model.hpp"

namespace bdscreen {

/// Cohort-level targets the generator reproduces in expectation.
struct MarginalTargets {
  double mean_age = 23.0;
  double female_fraction = 0.22;
  double employed_fraction = 0.489;
  double chronic_disease_fraction = 0.162;
};

struct GeneratorConfig {
  std::size_t n = 1000;
  std::array<double, kLabelCount> class_priors{0.61, 0.29, 0.10};
  std::uint64_t seed = 42;
  /// 0: every feature has the same distribution under each label.
  /// 1: class-conditional distributions are pushed to their extremes.
  double separability = 0.5;
  MarginalTargets marginals;
};

/// Throws std::invalid_argument unless n >= 30, priors are non-negative and
/// sum to 1 (within 1e-9), separability is in [0,1] and the marginal targets
/// are feasible.
void validate_config(const GeneratorConfig& config);

/// Labeled synthetic cohort. Label counts are allocated to the priors by
/// largest remainder and shuffled; features are drawn from label-conditional
/// distributions whose shifts are centered so the cohort marginals stay on
/// target.
Dataset generate(const GeneratorConfig& config);

/// Three tight, far-apart clusters (one per label, equal shares). A test
/// fixture where any reasonable classifier should be perfect.
Dataset generate_separable(std::size_t n, std::uint64_t seed);

/// Reads a GeneratorConfig from JSON; absent keys keep their defaults.
GeneratorConfig generator_config_from_json(const std::string& text);

}  // namespace bdscreen
