#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bdscreen/knn.hpp"
#include "bdscreen/schema.hpp"

namespace bdscreen {

using Matrix = std::vector<std::vector<double>>;

struct SvmOptions {
  double C = 1.0;
  double tol = 1e-3;        // stop when the maximal KKT violation is at most tol
  int max_epochs = 10000;   // one epoch = n pair updates
  std::uint64_t seed = 42;  // orders candidate scans during pair selection
};

/// Linear soft-margin SVM, decision value dot(weights, x) + bias.
struct BinarySvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  double C = 1.0;
  // Solver diagnostics.
  std::vector<double> alphas;
  std::size_t iterations = 0;
  std::size_t epochs = 0;
  double final_violation = 0.0;
  bool converged = false;

  double decision(std::span<const double> x) const;
};

/// Solves the soft-margin dual by sequential two-variable updates (maximal
/// violating pair with second-order partner selection). Labels must be +1/-1
/// with both present. A model that hits max_epochs is returned with
/// converged == false.
BinarySvmModel svm_train_binary(const Matrix& X, const std::vector<int>& y, const SvmOptions& opts = {});

/// 0.5*|w|^2 + C * sum(max(0, 1 - y*f(x))).
double hinge_objective(const BinarySvmModel& model, const Matrix& X, const std::vector<int>& y, double C);
/// sum(alpha) - 0.5*|w|^2 with w rebuilt from the dual variables.
double dual_objective(const BinarySvmModel& model, const Matrix& X, const std::vector<int>& y);

/// One-vs-rest: one binary model per label, that label +1, the others -1.
struct MulticlassSvmModel {
  std::array<BinarySvmModel, kLabelCount> per_class;
  SvmOptions options;
};

struct SvmPrediction {
  DisorderLabel label = DisorderLabel::kDepression;
  std::array<double, kLabelCount> decision_values{};
};

/// Trains the three one-vs-rest models (concurrently when `parallel`).
/// Throws std::invalid_argument if a label is absent.
MulticlassSvmModel svm_train_multiclass(const std::vector<Example>& train, const SvmOptions& opts = {},
                                        bool parallel = true);

/// Argmax of the decision values; exact ties go to the smaller label code.
SvmPrediction svm_predict(const MulticlassSvmModel& model, std::span<const double> x);

}  // namespace bdscreen
