#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bdscreen/data_model.hpp"
#include "bdscreen/schema.hpp"
#include "bdscreen/trained_model.hpp"

namespace bdscreen {

/// Counts indexed [true label][predicted label], class order 1, 2, 3.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kLabelCount>, kLabelCount> counts{};

  std::size_t total() const noexcept;
  std::size_t support(DisorderLabel truth) const noexcept;  // row sum
  std::size_t trace() const noexcept;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other) noexcept;
  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
  DisorderLabel label = DisorderLabel::kDepression;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  std::array<ClassMetrics, kLabelCount> per_class;
  double accuracy = 0.0;
  MetricTriple macro;
  MetricTriple weighted;
  std::size_t total_support = 0;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);

ConfusionMatrix confusion(const std::vector<DisorderLabel>& truth, const std::vector<DisorderLabel>& predicted);
ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Metrics from a confusion matrix; zero denominators give 0.
ClassificationReport report(const ConfusionMatrix& cm);

struct ClassSummary {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double support = 0.0;
};

struct Aggregate {
  double accuracy_proxy = 0.0;  // support-weighted recall
  MetricTriple macro;
  MetricTriple weighted;
};

/// Macro (unweighted) and support-weighted means of per-class values, for
/// checking reported per-class figures directly.
Aggregate aggregate(const std::array<ClassSummary, kLabelCount>& per_class);

/// Two decimals, halves rounded up.
double round_half_up(double value, int decimals = 2);

std::string format_report_text(const ClassificationReport& rep, std::string_view title = {});
std::string report_to_json(const ClassificationReport& rep);

// --- splitting --------------------------------------------------------------

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle; test size is round(n * test_fraction), clamped so that
/// both parts are non-empty.
Split train_test_split_indices(std::size_t n, double test_fraction, std::uint64_t seed);
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // fold index per record

  std::vector<std::size_t> fold(std::size_t f) const;
  std::vector<std::size_t> complement(std::size_t f) const;
};

/// Seeded shuffle dealt into k folds whose sizes differ by at most one (the
/// first n mod k folds take the extra element).
FoldPlan kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);
/// Stratified variant: each label's shuffled indices are dealt round-robin.
FoldPlan stratified_kfold_indices(const std::vector<DisorderLabel>& labels, std::size_t k, std::uint64_t seed);

// --- model comparison ---------------------------------------------------------

struct CvOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  bool stratified = false;
  bool parallel = true;
};

struct CvResult {
  ClassifierKind kind = ClassifierKind::kKnn;
  FoldPlan plan;
  std::vector<ConfusionMatrix> fold_confusions;
  std::vector<ClassificationReport> fold_reports;
  ClassificationReport pooled;  // report of the summed confusion matrices
  double mean_weighted_f1 = 0.0;
  double std_weighted_f1 = 0.0;  // population standard deviation over folds
};

/// Fits preprocessor and classifier on labeled `train`, predicts `test`.
ConfusionMatrix fit_and_evaluate(const Dataset& train, const Dataset& test, ClassifierKind kind,
                                 const ClassifierParams& params, std::uint64_t seed);

/// k-fold cross-validation. Each fold's preprocessor and classifier are fitted
/// on the out-of-fold records only. Throws std::invalid_argument when a fold's
/// training part lacks a label.
CvResult cross_validate(const Dataset& ds, ClassifierKind kind, const ClassifierParams& params,
                        const CvOptions& opts);

/// Highest weighted F1, then higher accuracy, then knn before svm.
ClassifierKind select_model(const std::map<ClassifierKind, ClassificationReport>& reports);

}  // namespace bdscreen
