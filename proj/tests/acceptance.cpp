// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "bdscreen/evaluation.hpp"
#include "bdscreen/knn.hpp"
#include "bdscreen/preprocess.hpp"
#include "bdscreen/service/http_server.hpp"
#include "bdscreen/service/screening_service.hpp"
#include "bdscreen/svm.hpp"
#include "bdscreen/synth.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bdscreen;
using nlohmann::json;

namespace {

constexpr double kRoundingTol = 0.005;

// Collects failed checks for one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double actual, double expected, double tol, const std::string& what) {
    if (!(std::abs(actual - expected) <= tol)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: got %.6f, want %.4f +/- %g", what.c_str(), actual, expected, tol);
      failures_.push_back(buf);
    }
  }
  void note(const std::string& text) { notes_.push_back(text); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(Checks&)> body;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ---------------------------------------------------------------------------

struct ReportRow {
  double precision, recall;
  int support;
};

Aggregate rows_aggregate(const std::array<ReportRow, 3>& rows, std::array<double, 3>& f1) {
  std::array<ClassSummary, kLabelCount> per_class;
  for (std::size_t c = 0; c < 3; ++c) {
    f1[c] = f1_score(rows[c].precision, rows[c].recall);
    per_class[c] = {rows[c].precision, rows[c].recall, f1[c], static_cast<double>(rows[c].support)};
  }
  return aggregate(per_class);
}

void svm_report_rows(Checks& ck) {
  std::array<double, 3> f1{};
  const auto agg = rows_aggregate({{{0.86, 0.90, 60}, {0.88, 0.70, 30}, {0.38, 0.50, 10}}}, f1);
  const double want_f1[3] = {0.88, 0.78, 0.43};
  for (int c = 0; c < 3; ++c) ck.near(f1[c], want_f1[c], kRoundingTol, "F1 class " + std::to_string(c + 1));
  ck.near(agg.macro.precision, 0.71, kRoundingTol, "macro precision");
  ck.near(agg.macro.recall, 0.70, kRoundingTol, "macro recall");
  ck.near(agg.macro.f1, 0.70, kRoundingTol, "macro F1");
  ck.near(agg.weighted.precision, 0.82, kRoundingTol, "weighted precision");
  ck.near(agg.weighted.recall, 0.80, kRoundingTol, "weighted recall");
  ck.near(agg.weighted.f1, 0.80, kRoundingTol, "weighted F1");
}

void knn_report_rows(Checks& ck) {
  std::array<double, 3> f1{};
  const auto agg = rows_aggregate({{{0.93, 0.90, 62}, {0.74, 0.82, 28}, {0.44, 0.40, 10}}}, f1);
  const double want_f1[3] = {0.92, 0.78, 0.42};
  for (int c = 0; c < 3; ++c) ck.near(f1[c], want_f1[c], kRoundingTol, "F1 class " + std::to_string(c + 1));
  ck.near(agg.weighted.f1, 0.83, kRoundingTol, "weighted F1");

  ClassificationReport svm, knn;
  svm.weighted.f1 = 0.80;
  knn.weighted.f1 = 0.83;
  ck.expect(select_model({{ClassifierKind::kSvm, svm}, {ClassifierKind::kKnn, knn}}) == ClassifierKind::kKnn,
            "select_model should pick knn");
}

void knn_oracle(Checks& ck) {
  std::mt19937_64 rng(20240501);
  int mismatches = 0;
  for (std::size_t trial = 0; trial < 1000; ++trial) {
    const auto t = bdscreen::testing::random_knn_trial(rng, trial);
    const auto model = knn_fit(t.exemplars, t.k);
    if (knn_predict(model, t.query).label != bdscreen::testing::knn_oracle(t.exemplars, t.k, t.query)) ++mismatches;
  }
  ck.expect(mismatches == 0, std::to_string(mismatches) + " of 1000 trials disagree with the oracle");
}

void svm_checks(Checks& ck) {
  const SvmOptions opts;
  {
    const Matrix X{{1.0}, {-1.0}};
    const auto m = svm_train_binary(X, {1, -1}, opts);
    ck.near(m.weights.at(0), 1.0, 1e-6, "2-point weight");
    ck.near(m.bias, 0.0, 1e-6, "2-point bias");
  }
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst_kkt = 0, worst_gap = 0;
  for (int p = 0; p < 20; ++p) {
    const double angle = u(rng) * M_PI;
    const double nx = std::cos(angle), ny = std::sin(angle), offset = 0.3 * u(rng);
    Matrix X;
    std::vector<int> y;
    while (X.size() < 40) {
      const double a = u(rng), b = u(rng);
      const double s = nx * a + ny * b - offset;
      if (std::abs(s) < 0.1) continue;
      X.push_back({a, b});
      y.push_back(s > 0 ? 1 : -1);
    }
    if (std::set<int>(y.begin(), y.end()).size() < 2) {
      --p;
      continue;
    }
    const auto m = svm_train_binary(X, y, opts);
    ck.expect(m.converged, "problem " + std::to_string(p) + " did not converge");
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double margin = y[i] * m.decision(X[i]);
      const double a = m.alphas[i];
      double r;
      if (a <= 0) {
        r = std::max(0.0, 1 - margin);
      } else if (a >= m.C) {
        r = std::max(0.0, margin - 1);
      } else {
        r = std::abs(margin - 1);
      }
      worst_kkt = std::max(worst_kkt, r);
    }
    worst_gap = std::max(worst_gap, hinge_objective(m, X, y, m.C) - dual_objective(m, X, y));
  }
  ck.expect(worst_kkt <= opts.tol, "max KKT residual " + fmt("%.3g", worst_kkt) + " exceeds tol");
  ck.expect(worst_gap <= 1e-3, "max duality gap " + fmt("%.3g", worst_gap) + " exceeds 1e-3");
  ck.note("max KKT residual " + fmt("%.2e", worst_kkt) + ", max gap " + fmt("%.2e", worst_gap));
}

void pipeline(Checks& ck) {
  CvOptions opts;  // 10 folds, seed 42
  const Dataset separable = generate_separable(300, 42);
  GeneratorConfig noise_cfg;
  noise_cfg.separability = 0.0;
  const Dataset noise = generate(noise_cfg);
  for (const ClassifierKind kind : {ClassifierKind::kKnn, ClassifierKind::kSvm}) {
    const std::string name(to_string(kind));
    const auto sep = cross_validate(separable, kind, {}, opts);
    ck.expect(sep.mean_weighted_f1 >= 0.99, name + " separable weighted F1 " + fmt("%.4f", sep.mean_weighted_f1));
    const auto flat = cross_validate(noise, kind, {}, opts);
    ck.expect(flat.mean_weighted_f1 < 0.55, name + " separability=0 weighted F1 " + fmt("%.4f", flat.mean_weighted_f1));
    ck.note(name + ": separable " + fmt("%.4f", sep.mean_weighted_f1) + ", separability=0 " +
            fmt("%.4f", flat.mean_weighted_f1));
  }
}

void folds(Checks& ck) {
  const FoldPlan plan = kfold_indices(1000, 10, 42);
  std::vector<int> seen(1000, 0);
  for (std::size_t f = 0; f < 10; ++f) {
    const auto idx = plan.fold(f);
    ck.expect(idx.size() == 100, "fold " + std::to_string(f) + " has " + std::to_string(idx.size()));
    for (auto i : idx) ++seen[i];
  }
  ck.expect(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }), "folds are not a partition");
  const Split s = train_test_split_indices(1000, 0.2, 42);
  ck.expect(s.train.size() == 800 && s.test.size() == 200,
            "split " + std::to_string(s.train.size()) + "/" + std::to_string(s.test.size()));
}

void marginals(Checks& ck) {
  GeneratorConfig cfg;
  cfg.n = 1000;
  cfg.seed = 42;
  const Dataset ds = generate(cfg);
  double age = 0, female = 0, employed = 0, chronic = 0;
  std::array<double, 3> labels{};
  for (const auto& r : ds.records) {
    age += *r.values[feature::kAge];
    female += *r.values[feature::kSex] == 0 ? 1 : 0;
    employed += *r.values[feature::kEmployed];
    chronic += *r.values[feature::kChronicDisease];
    labels[label_index(*r.label)] += 1;
  }
  const double n = static_cast<double>(ds.size());
  ck.near(age / n, 23, 1, "mean age");
  ck.near(female / n, 0.22, 0.04, "female fraction");
  ck.near(employed, 489, 40, "employed count");
  ck.near(chronic, 162, 40, "chronic disease count");
  const double priors[3] = {0.61, 0.29, 0.10};
  for (int c = 0; c < 3; ++c) ck.near(labels[c] / n, priors[c], 0.03, "prior " + std::to_string(c + 1));
  ck.note("age " + fmt("%.2f", age / n) + ", female " + fmt("%.3f", female / n) + ", employed " +
          fmt("%.0f", employed) + ", chronic " + fmt("%.0f", chronic));
}

void normalization(Checks& ck) {
  ck.expect(normalize_value(5, {0, 10}) == 0.5, "normalize_value(5, [0,10]) != 0.5");
  ck.expect(normalize_value(0, {0, 10}) == 0.0, "lower endpoint != 0");
  ck.expect(normalize_value(10, {0, 10}) == 1.0, "upper endpoint != 1");
  for (const auto& spec : builtin_schema().features()) {
    ck.expect(normalize_value(spec.bounds.min, spec.bounds) == 0.0, spec.name + " min != 0");
    ck.expect(normalize_value(spec.bounds.max, spec.bounds) == 1.0, spec.name + " max != 1");
  }

  // 10,000 random valid records drawn uniformly over each feature's domain.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<RespondentRecord> records;
  for (int i = 0; i < 10000; ++i) {
    RespondentRecord r;
    r.id = "n" + std::to_string(i);
    for (const auto& spec : builtin_schema().features()) {
      if (u(rng) < 0.05) {
        r.values.push_back(std::nullopt);
      } else if (spec.is_categorical()) {
        const auto& codes = spec.category_codes;
        r.values.push_back(codes[static_cast<std::size_t>(u(rng) * codes.size()) % codes.size()].second);
      } else {
        double v = spec.bounds.min + u(rng) * (spec.bounds.max - spec.bounds.min);
        if (spec.integral) v = std::round(v);
        r.values.push_back(v);
      }
    }
    records.push_back(std::move(r));
  }
  const Dataset ds = make_dataset(builtin_schema(), std::move(records));
  const auto pp = fit_preprocessor(ds);
  std::size_t outside = 0;
  for (const auto& fv : transform_all(ds, pp)) {
    for (double v : fv.values) outside += (v < 0.0 || v > 1.0) ? 1 : 0;
  }
  ck.expect(outside == 0, std::to_string(outside) + " components outside [0,1]");
}

void service_flow(Checks& ck) {
  using namespace bdscreen::service;
  bdscreen::testing::TempDir dir;
  const std::string log = dir.file("assessments.jsonl");
  const TrainedModel model = train_model(generate(GeneratorConfig{}), ClassifierKind::kKnn, {});

  std::vector<std::pair<std::string, int>> created;
  {
    ScreeningService svc(model, log);
    HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    std::thread t([&] { server.listen(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    auto post = [&](const std::string& path, const json& body) {
      return client.Post(path, body.dump(), "application/json");
    };

    GeneratorConfig varied;
    varied.n = 30;
    varied.seed = 5;
    const Dataset queries = generate(varied);
    for (const auto& rec : queries.records) {
      json answers;
      for (std::size_t i = 0; i < kFeatureCount; ++i) answers[builtin_schema()[i].name] = *rec.values[i];
      auto res = post("/api/v1/assessments", {{"answers", answers}});
      if (!res || res->status != 201) {
        ck.expect(false, "POST /assessments did not return 201");
        break;
      }
      const auto body = json::parse(res->body);
      const int label = body.at("label");
      ck.expect(label >= 1 && label <= 3, "label code " + std::to_string(label));
      ck.expect(!body.at("disclaimer").get<std::string>().empty(), "empty disclaimer");
      created.emplace_back(body.at("assessment_id"), label);
    }

    if (!created.empty()) {
      const auto& [id, label] = created.front();
      auto res = post("/api/v1/assessments/" + id + "/consent", {{"agreed", true}});
      const std::string want = "vcbt/" + std::string(label_name(*label_from_code(label)));
      ck.expect(res && res->status == 200 && json::parse(res->body).value("route", "") == want,
                "consent route should be " + want);
      res = post("/api/v1/assessments/" + id + "/consent", {{"agreed", true}});
      ck.expect(res && res->status == 409, "duplicate consent should return 409");
      res = post("/api/v1/assessments/" + created.back().first + "/consent", {{"agreed", false}});
      ck.expect(res && res->status == 200 && !json::parse(res->body).contains("route"), "declined consent has a route");
    }

    const std::pair<const char*, std::size_t> catalogs[] = {
        {"depression", 6}, {"internet_addiction", 5}, {"anxiety", 4}};
    for (const auto& [name, count] : catalogs) {
      auto res = client.Get(std::string("/api/v1/vcbt/") + name);
      if (!res || res->status != 200) {
        ck.expect(false, std::string("GET vcbt/") + name + " failed");
        continue;
      }
      const auto items = json::parse(res->body).at("items");
      ck.expect(items.size() == count, std::string(name) + " has " + std::to_string(items.size()) + " items");
      if (std::string(name) == "depression") {
        bool music = false;
        for (const auto& item : items) {
          std::string title = item.at("title");
          std::transform(title.begin(), title.end(), title.begin(), ::tolower);
          music |= title.find("music") != std::string::npos;
        }
        ck.expect(music, "depression catalog lacks a music-therapy item");
      }
    }
    server.stop();
    t.join();
  }

  ScreeningService replayed(model, log);
  const auto restored = replayed.assessments();
  ck.expect(restored.size() == created.size(), "replay restored " + std::to_string(restored.size()) + " of " +
                                                   std::to_string(created.size()) + " assessments");
  for (std::size_t i = 0; i < std::min(restored.size(), created.size()); ++i) {
    ck.expect(restored[i].assessment_id == created[i].first && code(restored[i].label) == created[i].second,
              "replayed assessment " + std::to_string(i) + " differs");
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"SVM report arithmetic", 1, svm_report_rows},
      {"KNN report arithmetic", 1, knn_report_rows},
      {"KNN oracle equivalence", 10, knn_oracle},
      {"SVM analytic case, KKT and duality gap", 30, svm_checks},
      {"Pipeline soundness", 120, pipeline},
      {"Fold arithmetic", 1, folds},
      {"Cohort marginals", 5, marginals},
      {"Normalization fixture", 5, normalization},
      {"Service flow", 30, service_flow},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Checks ck;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(ck);
    } catch (const std::exception& e) {
      ck.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.budget_seconds) {
      ck.expect(false, "took " + fmt("%.2f", secs) + " s, budget " + fmt("%.0f", c.budget_seconds) + " s");
    }
    const bool ok = ck.failures().empty();
    failed += ok ? 0 : 1;
    std::printf("%s  %s (%.3f s)\n", ok ? "PASS" : "FAIL", c.name.c_str(), secs);
    for (const auto& f : ck.failures()) std::printf("      - %s\n", f.c_str());
    for (const auto& n : ck.notes()) std::printf("      %s\n", n.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
