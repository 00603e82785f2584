#include "bdscreen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "bdscreen/rng.hpp"

namespace bdscreen {

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t sum = 0;
  for (const auto& row : counts) sum += std::accumulate(row.begin(), row.end(), std::size_t{0});
  return sum;
}

std::size_t ConfusionMatrix::support(DisorderLabel truth) const noexcept {
  const auto& row = counts[label_index(truth)];
  return std::accumulate(row.begin(), row.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const noexcept {
  std::size_t sum = 0;
  for (std::size_t c = 0; c < kLabelCount; ++c) sum += counts[c][c];
  return sum;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) noexcept {
  for (std::size_t t = 0; t < kLabelCount; ++t) {
    for (std::size_t p = 0; p < kLabelCount; ++p) counts[t][p] += other.counts[t][p];
  }
  return *this;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

ConfusionMatrix confusion(const std::vector<DisorderLabel>& truth, const std::vector<DisorderLabel>& predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(truth.size()) + " truths vs " +
                                std::to_string(predicted.size()) + " predictions");
  }
  if (truth.empty()) throw std::invalid_argument("confusion: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++cm.counts[label_index(truth[i])][label_index(predicted[i])];
  }
  return cm;
}

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted) {
  auto convert = [](const std::vector<int>& codes) {
    std::vector<DisorderLabel> out;
    out.reserve(codes.size());
    for (int c : codes) {
      auto label = label_from_code(c);
      if (!label) throw std::invalid_argument("confusion: label " + std::to_string(c) + " outside {1,2,3}");
      out.push_back(*label);
    }
    return out;
  };
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(truth.size()) + " truths vs " +
                                std::to_string(predicted.size()) + " predictions");
  }
  return confusion(convert(truth), convert(predicted));
}

ClassificationReport report(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw std::invalid_argument("report: empty confusion matrix");
  ClassificationReport rep;
  rep.total_support = total;
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    std::size_t predicted = 0;
    for (std::size_t t = 0; t < kLabelCount; ++t) predicted += cm.counts[t][c];
    const std::size_t tp = cm.counts[c][c];
    const std::size_t support = cm.support(kAllLabels[c]);
    ClassMetrics& m = rep.per_class[c];
    m.label = kAllLabels[c];
    m.support = support;
    m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    m.f1 = f1_score(m.precision, m.recall);
  }
  rep.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  std::array<ClassSummary, kLabelCount> summary;
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    const auto& m = rep.per_class[c];
    summary[c] = {m.precision, m.recall, m.f1, static_cast<double>(m.support)};
  }
  // Weighted means here use row-sum supports, so weighted recall == accuracy.
  double sum_support = 0.0;
  for (const auto& s : summary) sum_support += s.support;
  for (const auto& s : summary) {
    rep.macro.precision += s.precision / kLabelCount;
    rep.macro.recall += s.recall / kLabelCount;
    rep.macro.f1 += s.f1 / kLabelCount;
    rep.weighted.precision += s.precision * s.support / sum_support;
    rep.weighted.recall += s.recall * s.support / sum_support;
    rep.weighted.f1 += s.f1 * s.support / sum_support;
  }
  return rep;
}

Aggregate aggregate(const std::array<ClassSummary, kLabelCount>& per_class) {
  double total = 0.0;
  for (const auto& s : per_class) {
    if (s.support < 0.0) throw std::invalid_argument("aggregate: negative support");
    total += s.support;
  }
  if (!(total > 0.0)) throw std::invalid_argument("aggregate: zero total support");
  Aggregate out;
  for (const auto& s : per_class) {
    out.macro.precision += s.precision;
    out.macro.recall += s.recall;
    out.macro.f1 += s.f1;
    out.weighted.precision += s.precision * s.support;
    out.weighted.recall += s.recall * s.support;
    out.weighted.f1 += s.f1 * s.support;
  }
  const double k = static_cast<double>(kLabelCount);
  out.macro = {out.macro.precision / k, out.macro.recall / k, out.macro.f1 / k};
  out.weighted = {out.weighted.precision / total, out.weighted.recall / total, out.weighted.f1 / total};
  out.accuracy_proxy = out.weighted.recall;
  return out;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The epsilon keeps binary representations of exact halves (0.805 ->
  // 80.49999...) rounding up.
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

std::string format_report_text(const ClassificationReport& rep, std::string_view title) {
  std::string out;
  char line[160];
  if (!title.empty()) {
    out += title;
    out += '\n';
  }
  std::snprintf(line, sizeof line, "%12s %10s %9s %9s %9s\n", "", "Precision", "Recall", "F1-score", "Support");
  out += line;
  for (const auto& m : rep.per_class) {
    std::snprintf(line, sizeof line, "%12d %10.2f %9.2f %9.2f %9zu\n", code(m.label),
                  round_half_up(m.precision), round_half_up(m.recall), round_half_up(m.f1), m.support);
    out += line;
  }
  std::snprintf(line, sizeof line, "%12s %10s %9s %9.2f %9zu\n", "Accuracy", "", "",
                round_half_up(rep.accuracy), rep.total_support);
  out += line;
  std::snprintf(line, sizeof line, "%12s %10.2f %9.2f %9.2f %9zu\n", "Macro avg",
                round_half_up(rep.macro.precision), round_half_up(rep.macro.recall),
                round_half_up(rep.macro.f1), rep.total_support);
  out += line;
  std::snprintf(line, sizeof line, "%12s %10.2f %9.2f %9.2f %9zu\n", "Weighted avg",
                round_half_up(rep.weighted.precision), round_half_up(rep.weighted.recall),
                round_half_up(rep.weighted.f1), rep.total_support);
  out += line;
  return out;
}

std::string report_to_json(const ClassificationReport& rep) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& m : rep.per_class) {
    per_class.push_back({{"label", code(m.label)},
                         {"name", std::string(label_name(m.label))},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support}});
  }
  auto triple = [](const MetricTriple& t) {
    return nlohmann::json{{"precision", t.precision}, {"recall", t.recall}, {"f1", t.f1}};
  };
  nlohmann::json j = {{"per_class", per_class},
                      {"accuracy", rep.accuracy},
                      {"macro_avg", triple(rep.macro)},
                      {"weighted_avg", triple(rep.weighted)},
                      {"total_support", rep.total_support}};
  return j.dump(2);
}

Split train_test_split_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("train_test_split: test fraction must be in (0, 1)");
  }
  if (n < 2) throw std::invalid_argument("train_test_split: need at least 2 records");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto test_n = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  test_n = std::clamp<std::size_t>(test_n, 1, n - 1);
  Split split;
  split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_n));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_n), order.end());
  return split;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  const Split s = train_test_split_indices(ds.size(), test_fraction, seed);
  return {subset(ds, s.train), subset(ds, s.test)};
}

std::vector<std::size_t> FoldPlan::fold(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == f) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::complement(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != f) out.push_back(i);
  }
  return out;
}

FoldPlan kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold: need at least 2 folds");
  if (n < k) {
    throw std::invalid_argument("kfold: " + std::to_string(k) + " folds exceed " + std::to_string(n) + " records");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  FoldPlan plan{k, seed, std::vector<std::size_t>(n)};
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t s = 0; s < size; ++s) plan.assignments[order[pos++]] = f;
  }
  return plan;
}

FoldPlan stratified_kfold_indices(const std::vector<DisorderLabel>& labels, std::size_t k, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (k < 2) throw std::invalid_argument("kfold: need at least 2 folds");
  if (n < k) {
    throw std::invalid_argument("kfold: " + std::to_string(k) + " folds exceed " + std::to_string(n) + " records");
  }
  std::mt19937_64 rng(seed);
  FoldPlan plan{k, seed, std::vector<std::size_t>(n)};
  std::size_t dealt = 0;
  for (DisorderLabel label : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == label) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) plan.assignments[i] = dealt++ % k;
  }
  return plan;
}

ConfusionMatrix fit_and_evaluate(const Dataset& train, const Dataset& test, ClassifierKind kind,
                                 const ClassifierParams& params, std::uint64_t seed) {
  ClassifierParams p = params;
  p.svm.seed = seed;
  const TrainedModel model = train_model(train, kind, p, /*parallel=*/false);
  const auto predicted = predict_all(model, test, /*parallel=*/false);
  std::vector<DisorderLabel> truth;
  truth.reserve(test.size());
  for (const auto& rec : test.records) truth.push_back(*rec.label);
  return confusion(truth, predicted);
}

CvResult cross_validate(const Dataset& ds, ClassifierKind kind, const ClassifierParams& params,
                        const CvOptions& opts) {
  if (!ds.fully_labeled()) throw std::invalid_argument("cross_validate: dataset has unlabeled records");
  CvResult result;
  result.kind = kind;
  if (opts.stratified) {
    std::vector<DisorderLabel> labels;
    labels.reserve(ds.size());
    for (const auto& rec : ds.records) labels.push_back(*rec.label);
    result.plan = stratified_kfold_indices(labels, opts.folds, opts.seed);
  } else {
    result.plan = kfold_indices(ds.size(), opts.folds, opts.seed);
  }

  // Check label coverage up front so failures do not depend on scheduling.
  std::vector<Dataset> trains;
  std::vector<Dataset> tests;
  for (std::size_t f = 0; f < opts.folds; ++f) {
    trains.push_back(subset(ds, result.plan.complement(f)));
    tests.push_back(subset(ds, result.plan.fold(f)));
    std::array<bool, kLabelCount> present{};
    for (const auto& rec : trains.back().records) present[label_index(*rec.label)] = true;
    for (DisorderLabel label : kAllLabels) {
      if (!present[label_index(label)]) {
        throw std::invalid_argument("cross_validate: fold " + std::to_string(f) +
                                    " training part lacks label " + std::to_string(code(label)));
      }
    }
  }

  auto run_fold = [&](std::size_t f) {
    return fit_and_evaluate(trains[f], tests[f], kind, params, derive_seed(opts.seed, f));
  };
  result.fold_confusions.resize(opts.folds);
  if (opts.parallel) {
    std::vector<std::future<ConfusionMatrix>> jobs;
    for (std::size_t f = 0; f < opts.folds; ++f) jobs.push_back(std::async(std::launch::async, run_fold, f));
    for (std::size_t f = 0; f < opts.folds; ++f) result.fold_confusions[f] = jobs[f].get();
  } else {
    for (std::size_t f = 0; f < opts.folds; ++f) result.fold_confusions[f] = run_fold(f);
  }

  ConfusionMatrix pooled;
  double sum = 0.0;
  for (const auto& cm : result.fold_confusions) {
    result.fold_reports.push_back(report(cm));
    sum += result.fold_reports.back().weighted.f1;
    pooled += cm;
  }
  result.pooled = report(pooled);
  const double k = static_cast<double>(opts.folds);
  result.mean_weighted_f1 = sum / k;
  double var = 0.0;
  for (const auto& r : result.fold_reports) {
    const double d = r.weighted.f1 - result.mean_weighted_f1;
    var += d * d;
  }
  result.std_weighted_f1 = std::sqrt(var / k);
  return result;
}

ClassifierKind select_model(const std::map<ClassifierKind, ClassificationReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("select_model: no reports");
  // std::map iterates knn before svm, which supplies the final tie rule.
  auto best = reports.begin();
  for (auto it = std::next(reports.begin()); it != reports.end(); ++it) {
    const auto& a = it->second;
    const auto& b = best->second;
    if (a.weighted.f1 > b.weighted.f1 || (a.weighted.f1 == b.weighted.f1 && a.accuracy > b.accuracy)) {
      best = it;
    }
  }
  return best->first;
}

}  // namespace bdscreen
