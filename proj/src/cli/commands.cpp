#include "bdscreen/cli/commands.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <pthread.h>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdscreen/evaluation.hpp"
#include "bdscreen/service/http_server.hpp"
#include "bdscreen/service/screening_service.hpp"
#include "bdscreen/synth.hpp"
#include "bdscreen/trained_model.hpp"

namespace bdscreen::cli {
namespace {

using nlohmann::json;

ClassifierParams params_from(const RunConfig& cfg) {
  ClassifierParams p;
  p.knn_k = cfg.k;
  p.svm.C = cfg.C;
  p.svm.tol = cfg.tol;
  p.svm.max_epochs = cfg.max_epochs;
  p.svm.seed = cfg.seed;
  return p;
}

Dataset load_labeled(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw UsageError("--data is required");
  Dataset ds = load_dataset_file(cfg.data_path);
  if (ds.empty()) throw std::runtime_error("'" + cfg.data_path + "' holds no records");
  if (!ds.fully_labeled()) throw std::runtime_error("'" + cfg.data_path + "' has records without a target label");
  return ds;
}

std::vector<ClassifierKind> kinds_of(const RunConfig& cfg) {
  if (cfg.kind == "both") return {ClassifierKind::kKnn, ClassifierKind::kSvm};
  return {classifier_kind_from_string(cfg.kind)};
}

void print_violations(std::ostream& err, const std::vector<Violation>& violations) {
  for (const auto& v : violations) {
    err << "  ";
    if (v.row) err << "row " << v.row << ": ";
    err << v.feature << ": " << v.message;
    if (!v.value.empty()) err << " (got '" << v.value << "')";
    err << '\n';
  }
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round_half_up(v));
  return buf;
}

}  // namespace

int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Dataset ds;
  try {
    if (cfg.separable) {
      ds = generate_separable(cfg.n, cfg.seed);
    } else {
      GeneratorConfig g;
      g.n = cfg.n;
      g.seed = cfg.seed;
      g.separability = cfg.separability;
      ds = generate(g);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.out_path.empty()) {
    write_dataset(out, ds);
  } else {
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + cfg.out_path + "'");
    write_dataset(f, ds);
    if (!f.flush()) throw std::runtime_error("failed writing '" + cfg.out_path + "'");
    err << "wrote " << ds.size() << " records to " << cfg.out_path << " (seed " << cfg.seed << ")\n";
  }
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.kind == "both") throw UsageError("train needs --kind knn or --kind svm");
  const ClassifierKind kind = classifier_kind_from_string(cfg.kind);
  if (cfg.out_path.empty()) throw UsageError("--out is required");
  const Dataset ds = load_labeled(cfg);
  auto [train, test] = train_test_split(ds, cfg.test_fraction, cfg.seed);
  const ClassifierParams params = params_from(cfg);
  const TrainedModel model = train_model(train, kind, params);
  save_model(model, cfg.out_path);

  std::vector<DisorderLabel> truth;
  for (const auto& r : test.records) truth.push_back(*r.label);
  const ClassificationReport rep = report(confusion(truth, predict_all(model, test)));
  out << "seed: " << cfg.seed << '\n'
      << "model: " << to_string(kind) << " -> " << cfg.out_path << '\n'
      << "train/test: " << train.size() << '/' << test.size() << '\n'
      << format_report_text(rep, "holdout");
  if (const auto* svm = std::get_if<MulticlassSvmModel>(&model.classifier)) {
    for (std::size_t c = 0; c < kLabelCount; ++c) {
      if (!svm->per_class[c].converged) {
        err << "warning: svm class " << c + 1 << " stopped at max_epochs (violation "
            << svm->per_class[c].final_violation << ")\n";
      }
    }
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const Dataset ds = load_labeled(cfg);
  const ClassifierParams params = params_from(cfg);
  const bool holdout = cfg.mode == "holdout" || cfg.mode == "all";
  const bool cv = cfg.mode == "cv" || cfg.mode == "all";
  const bool table = cfg.mode == "table" || cfg.mode == "all";

  out << "seed: " << cfg.seed << '\n' << "data: " << cfg.data_path << " (" << ds.size() << " records)\n";
  json doc = {{"seed", cfg.seed}, {"records", ds.size()}, {"results", json::object()}};
  std::map<ClassifierKind, ClassificationReport> for_selection;

  for (const ClassifierKind kind : kinds_of(cfg)) {
    const std::string name(to_string(kind));
    json& entry = doc["results"][name];

    if (holdout) {
      auto [train, test] = train_test_split(ds, cfg.test_fraction, cfg.seed);
      const ClassificationReport rep = report(fit_and_evaluate(train, test, kind, params, cfg.seed));
      out << '\n'
          << format_report_text(rep, name + " holdout (train " + std::to_string(train.size()) + " / test " +
                                         std::to_string(test.size()) + ")");
      entry["holdout"] = json::parse(report_to_json(rep));
      for_selection[kind] = rep;
    }
    if (table) {
      const FoldPlan plan = kfold_indices(ds.size(), static_cast<std::size_t>(cfg.folds), cfg.seed);
      const Dataset test = subset(ds, plan.fold(0));
      const Dataset train = subset(ds, plan.complement(0));
      const ClassificationReport rep = report(fit_and_evaluate(train, test, kind, params, cfg.seed));
      out << '\n'
          << format_report_text(rep, name + " table (fold 1 of " + std::to_string(cfg.folds) + ", " +
                                         std::to_string(test.size()) + " test records)");
      entry["table"] = json::parse(report_to_json(rep));
      if (!holdout) for_selection[kind] = rep;
    }
    if (cv) {
      CvOptions opts;
      opts.folds = static_cast<std::size_t>(cfg.folds);
      opts.seed = cfg.seed;
      opts.stratified = cfg.stratified;
      const CvResult res = cross_validate(ds, kind, params, opts);
      out << '\n'
          << format_report_text(res.pooled, name + " " + std::to_string(cfg.folds) + "-fold cv (pooled)")
          << "mean weighted F1 over folds: " << fmt2(res.mean_weighted_f1) << " (std " << fmt2(res.std_weighted_f1)
          << ")\n";
      json folds = json::array();
      for (const auto& r : res.fold_reports) folds.push_back(json::parse(report_to_json(r)));
      entry["cv"] = {{"folds", cfg.folds},
                     {"stratified", cfg.stratified},
                     {"pooled", json::parse(report_to_json(res.pooled))},
                     {"fold_reports", folds},
                     {"mean_weighted_f1", res.mean_weighted_f1},
                     {"std_weighted_f1", res.std_weighted_f1}};
      for_selection[kind] = res.pooled;
    }
  }

  if (for_selection.size() > 1) {
    const std::string selected(to_string(select_model(for_selection)));
    out << "\nselected: " << selected << '\n';
    doc["selected"] = selected;
  }
  if (!cfg.json_path.empty()) {
    std::ofstream f(cfg.json_path);
    if (!f) throw std::runtime_error("cannot write '" + cfg.json_path + "'");
    f << doc.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_assess(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.model_path.empty()) throw UsageError("--model is required");
  json answers = json::object();
  if (!cfg.answers_path.empty()) {
    std::ifstream in(cfg.answers_path);
    if (!in) throw std::runtime_error("cannot read answers file '" + cfg.answers_path + "'");
    try {
      answers = json::parse(in);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("answers file '" + cfg.answers_path + "': " + e.what());
    }
    if (answers.is_object() && answers.contains("answers")) answers = answers["answers"];
  }
  for (const auto& kv : cfg.answers) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects name=value, got '" + kv + "'");
    answers[kv.substr(0, eq)] = kv.substr(eq + 1);
  }

  service::ScreeningService svc(load_model(cfg.model_path), "");
  try {
    const auto res = svc.assess(answers).result;
    out << "code=" << code(res.label) << ' ' << label_name(res.label) << '\n' << res.disclaimer << '\n';
  } catch (const ValidationError& e) {
    err << "invalid answers:\n";
    print_violations(err, e.violations());
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_serve(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  if (cfg.model_path.empty()) throw UsageError("--model (or BDSCREEN_MODEL) is required");
  TrainedModel model = load_model(cfg.model_path);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGUSR1);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::ScreeningService svc(std::move(model), cfg.log_path);
  service::HttpServer server(svc);
  const int port = server.bind(cfg.host, cfg.port);
  err << "serving on http://" << cfg.host << ':' << port << " (log " << cfg.log_path << ", "
      << svc.assessments().size() << " assessments restored)" << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  pthread_kill(waiter.native_handle(), SIGUSR1);
  waiter.join();
  svc.flush();
  err << "stopped" << std::endl;
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Behavioral-disorder screening: synthetic cohorts, KNN/SVM training and evaluation, "
               "and the screening service."};
  app.footer(kPrecedenceHelp);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::string config_path;
  FlagValues f;
  std::vector<std::string> sets;
  bool separable = false;
  bool stratified = false;
  app.add_option("--config", config_path, "JSON settings file")->check(CLI::ExistingFile);

  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", f.seed, "Random seed (default 42)"); };
  auto add_classifier = [&](CLI::App* s) {
    s->add_option("--k", f.k, "Neighbors for knn (default 3)");
    s->add_option("--C", f.C, "Soft-margin penalty for svm (default 1.0)");
    s->add_option("--tol", f.tol, "SMO stopping tolerance (default 1e-3)");
    s->add_option("--max-epochs", f.max_epochs, "SMO iteration cap in epochs of n steps (default 10000)");
  };

  auto* gen = app.add_subcommand("generate", "Write a synthetic labeled cohort as CSV");
  gen->add_option("--n", f.n, "Number of records (>= 30, default 1000)");
  gen->add_option("--separability", f.separability, "Class separation in [0,1] (default 0.5)");
  gen->add_flag("--separable", separable, "Emit the three-cluster test fixture instead");
  gen->add_option("--out,-o", f.out_path, "Output CSV (default stdout)");
  add_seed(gen);

  auto* train = app.add_subcommand("train", "Fit a classifier and write a model file");
  train->add_option("--kind", f.kind, "knn or svm")->required();
  train->add_option("--data", f.data_path, "Labeled CSV");
  train->add_option("--out,-o", f.out_path, "Model file to write");
  train->add_option("--test-fraction", f.test_fraction, "Held-out share (default 0.2)");
  add_classifier(train);
  add_seed(train);

  auto* eval = app.add_subcommand("evaluate", "Holdout, k-fold and table-style reports");
  eval->add_option("--kind", f.kind, "knn, svm or both (default knn)");
  eval->add_option("--mode", f.mode, "holdout, cv, table or all (default all)");
  eval->add_option("--data", f.data_path, "Labeled CSV");
  eval->add_option("--folds", f.folds, "Number of folds, >= 2 (default 10)");
  eval->add_flag("--stratified", stratified, "Stratify cv folds by label");
  eval->add_option("--test-fraction", f.test_fraction, "Held-out share (default 0.2)");
  eval->add_option("--json", f.json_path, "Also write the reports as JSON");
  add_classifier(eval);
  add_seed(eval);

  auto* assess = app.add_subcommand("assess", "Screen one questionnaire offline");
  assess->add_option("--model", f.model_path, "Model file");
  assess->add_option("--answers", f.answers_path, "JSON object of answers keyed by feature name");
  assess->add_option("--set", sets, "Answer as name=value (repeatable)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP screening service");
  serve->add_option("--model", f.model_path, "Model file");
  serve->add_option("--log", f.log_path, "Assessment log (JSON lines, default assessments.jsonl)");
  serve->add_option("--host", f.host, "Bind address (default 127.0.0.1)");
  serve->add_option("--port", f.port, "Port, 0 picks a free one (default 8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunConfig cfg = resolve(config_path, f);
    if (separable) cfg.separable = true;
    if (stratified) cfg.stratified = true;
    cfg.answers = sets;
    validate(cfg);
    if (*gen) return cmd_generate(cfg, out, err);
    if (*train) return cmd_train(cfg, out, err);
    if (*eval) return cmd_evaluate(cfg, out, err);
    if (*assess) return cmd_assess(cfg, out, err);
    if (*serve) return cmd_serve(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    print_violations(err, e.violations());
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace bdscreen::cli
