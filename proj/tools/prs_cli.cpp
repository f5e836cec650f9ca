// prs_cli: command line front end for the PRS feature pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "prs/atomic_file.hpp"
#include "prs/prs.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string manifest;
  std::string out;
  std::uint64_t seed{0};
  int threads{1};

  // features
  double rel_threshold{0.01};
  bool centered_variance{false};
  std::string median_mode{"psd"};

  // soil / growth
  std::string sample;
  std::string fill{"stacked"};
  int days{10};
  int limit{2};
  std::string radicle{"0,5"};
  bool no_barren{false};
  int restarts{25};
  std::string dump_frames;

  // classifiers
  std::string classifier{"LR"};
  std::string variant{"PRS"};
  double rate{0.6};
  double lr_learning_rate{0.1};
  int lr_max_iter{5000};
  double ridge{1e-6};
  int svm_degree{3};
  double svm_c{1.0};
  double svm_gamma{1.0};
  double svm_coef0{1.0};

  // evaluate
  int reps{100};
  std::vector<double> rates{0.4, 0.5, 0.6, 0.7, 0.8};
  std::vector<std::string> variants{"BASE", "BASE_NF", "BASE_RF", "PRS", "COMPARISON"};
  std::vector<std::string> classifiers{"LR", "SVM_POLY", "LDA", "QDA"};
  bool global_prep{false};

  // synth
  std::size_t n_per_class{40};
  std::size_t length{2000};
};

prs::SoilFill parse_fill(const std::string& s) {
  if (s == "stacked") return prs::SoilFill::Stacked;
  if (s == "onehot") return prs::SoilFill::OneHot;
  if (s == "graded") return prs::SoilFill::Graded;
  throw prs::ArgumentError("unknown soil fill '" + s + "'");
}

// "r,c" or "r,c;r,c" with 0-based coordinates.
std::vector<prs::Cell> parse_radicle(const std::string& s) {
  std::vector<prs::Cell> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    prs::Cell c;
    char comma = 0;
    std::stringstream is(item);
    if (!(is >> c.row >> comma >> c.col) || comma != ',' || !(is >> std::ws).eof())
      throw prs::ArgumentError("radicle must look like 'row,col' or 'row,col;row,col'");
    out.push_back(c);
  }
  return out;
}

prs::BaseFeatureOptions feature_options(const Options& o) {
  prs::BaseFeatureOptions f;
  f.relative_threshold = o.rel_threshold;
  f.centered_variance = o.centered_variance;
  return f;
}

prs::MedianMode median_mode(const Options& o) {
  return o.median_mode == "freq" ? prs::MedianMode::MedianFrequency : prs::MedianMode::PsdValue;
}

prs::PrsConfig prs_config(const Options& o) {
  prs::PrsConfig c;
  c.growth.days = o.days;
  c.growth.division_limit = o.limit;
  c.growth.radicle = parse_radicle(o.radicle);
  c.growth.grow_into_barren = !o.no_barren;
  c.fill = parse_fill(o.fill);
  c.kmeans_restarts = o.restarts;
  prs::validate(c.growth);
  return c;
}

prs::ClassifierSpec classifier_spec(const Options& o, const std::string& name) {
  prs::ClassifierSpec s;
  s.kind = prs::parse_classifier(name);
  s.logistic.learning_rate = o.lr_learning_rate;
  s.logistic.max_iter = o.lr_max_iter;
  s.discriminant.ridge_scale = o.ridge;
  s.svm.degree = o.svm_degree;
  s.svm.C = o.svm_c;
  s.svm.gamma = o.svm_gamma;
  s.svm.coef0 = o.svm_coef0;
  return s;
}

json feature_settings(const Options& o) {
  return {{"rel_threshold", o.rel_threshold}, {"centered_variance", o.centered_variance},
          {"median_mode", o.median_mode}};
}

std::size_t row_of(const prs::DatasetFeatures& f, const std::string& id) {
  for (std::size_t i = 0; i < f.ids.size(); ++i)
    if (f.ids[i] == id) return i;
  throw prs::DataError("no segment with id '" + id + "'");
}

prs::DatasetFeatures load_features(const Options& o) {
  return prs::compute_dataset_features(prs::load_dataset(o.manifest), feature_options(o), median_mode(o), o.threads);
}

void say(const std::string& line) { std::cout << line << "\n"; }

// ---- commands -------------------------------------------------------------

void cmd_synth(const Options& o) {
  auto ds = prs::generate_synthetic(o.n_per_class, o.length, o.seed);
  auto manifest = prs::write_dataset(ds, o.out);
  say("wrote " + manifest.string() + " (" + std::to_string(ds.size()) + " segments)");
}

void cmd_extract(const Options& o) {
  auto f = load_features(o);
  prs::write_file_atomic(fs::path(o.out) / "features.csv", prs::feature_csv(f.ids, f.class_names, f.base));
  say("wrote " + (fs::path(o.out) / "features.csv").string());
}

void cmd_spectral(const Options& o) {
  auto f = load_features(o);
  prs::write_file_atomic(fs::path(o.out) / "features_spectral.csv",
                         prs::feature_csv(f.ids, f.class_names, f.base.append_columns(f.spectral)));
  say("wrote " + (fs::path(o.out) / "features_spectral.csv").string());
}

void cmd_rank(const Options& o) {
  auto f = load_features(o);
  auto prep = prs::fit_prep(f.base, o.seed, o.restarts);
  std::vector<std::size_t> position(prep.permutation.size());
  for (std::size_t p = 0; p < prep.permutation.size(); ++p) position[prep.permutation[p]] = p;
  std::string csv = "feature,gain,position\n";
  for (std::size_t c = 0; c < f.base.cols; ++c)
    csv += f.base.names[c] + "," + prs::detail::fmt("%.17g", prep.gains[c]) + "," + std::to_string(position[c] + 1) +
           "\n";
  prs::write_file_atomic(fs::path(o.out) / "rank.csv", csv);
  say("wrote " + (fs::path(o.out) / "rank.csv").string());
}

void cmd_soil_dump(const Options& o) {
  auto f = load_features(o);
  const auto cfg = prs_config(o);
  auto prep = prs::fit_prep(f.base, o.seed, cfg.kmeans_restarts);
  const auto row = row_of(f, o.sample);
  auto discrete = prs::soil_for(prep, f.base.row(row), cfg.fill);
  auto nutrients = prs::convolve_soil(discrete);
  const fs::path dir(o.out);
  prs::write_file_atomic(dir / (o.sample + "_discrete.csv"), prs::grid_csv(discrete.grid));
  prs::write_file_atomic(dir / (o.sample + "_nutrients.csv"), prs::grid_csv(nutrients.grid));
  say("wrote " + (dir / (o.sample + "_discrete.csv")).string() + " and " +
      (dir / (o.sample + "_nutrients.csv")).string());
}

void cmd_grow(const Options& o) {
  auto f = load_features(o);
  const auto cfg = prs_config(o);
  auto prep = prs::fit_prep(f.base, o.seed, cfg.kmeans_restarts);
  const auto row = row_of(f, o.sample);
  auto st = prs::grow_for(prep, f.base.row(row), cfg);
  auto pair = prs::extract_prs(st);

  json summary;
  summary["sample"] = o.sample;
  summary["nf"] = pair.nf;
  summary["rf"] = pair.rf;
  summary["days"] = cfg.growth.days;
  summary["l"] = cfg.growth.division_limit;
  summary["radicle"] = prs::to_json(cfg.growth)["radicle"];
  summary["days_grown"] = st.day_log.size();
  summary["grow_into_barren"] = cfg.growth.grow_into_barren;
  summary["soil_fill"] = prs::to_string(cfg.fill);
  summary["seed"] = o.seed;

  if (!o.dump_frames.empty()) {
    const fs::path dir(o.dump_frames);
    prs::OccupancyGrid occ;
    for (const auto& c : cfg.growth.radicle) occ(c.row, c.col) = 1;
    prs::write_file_atomic(dir / "day_00.csv", prs::grid_csv(occ));
    for (std::size_t d = 0; d < st.day_log.size(); ++d) {
      for (const auto& c : st.day_log[d]) occ(c.row, c.col) = 1;
      char name[32];
      std::snprintf(name, sizeof name, "day_%02zu.csv", d + 1);
      prs::write_file_atomic(dir / name, prs::grid_csv(occ));
    }
    prs::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  }
  say(summary.dump());
}

void cmd_classify(const Options& o) {
  auto f = load_features(o);
  prs::ExperimentConfig cfg;
  cfg.seed = o.seed;
  cfg.rates = {o.rate};
  cfg.variants = {prs::parse_variant(o.variant)};
  cfg.classifiers = {classifier_spec(o, o.classifier)};
  cfg.prs = prs_config(o);
  prs::validate(cfg);
  std::optional<prs::FittedPrep> global;
  if (o.global_prep) global = prs::fit_prep(f.base, prs::detail::global_prep_seed(o.seed), cfg.prs.kmeans_restarts);
  auto folds = prs::prepare_rep(f, cfg, 0, 0, global);
  auto pair = prs::normalize_folds(prs::assemble_variant(f, folds.prs, cfg.variants[0]), folds.split);
  auto model = prs::train(cfg.classifiers[0], pair.train);
  auto pred = prs::predict(model, pair.test);

  std::vector<int> truth;
  std::string csv = "id,truth,predicted\n";
  for (std::size_t k = 0; k < folds.split.test.size(); ++k) {
    const auto i = folds.split.test[k];
    truth.push_back(f.base.labels[i]);
    csv += f.ids[i] + "," + f.class_names[f.base.labels[i]] + "," + f.class_names[pred[k]] + "\n";
  }
  const double acc = prs::accuracy(prs::confusion(truth, pred));
  prs::write_file_atomic(fs::path(o.out) / "predictions.csv", csv);
  json summary = {{"classifier", prs::to_json(cfg.classifiers[0])},
                  {"variant", o.variant},
                  {"rate", o.rate},
                  {"seed", o.seed},
                  {"n_train", folds.split.train.size()},
                  {"n_test", folds.split.test.size()},
                  {"accuracy", acc}};
  prs::write_file_atomic(fs::path(o.out) / "classify.json", summary.dump(2) + "\n");
  say(summary.dump());
}

void cmd_evaluate(const Options& o) {
  auto f = load_features(o);
  prs::ExperimentConfig cfg;
  cfg.seed = o.seed;
  cfg.reps = o.reps;
  cfg.rates = o.rates;
  cfg.threads = o.threads;
  cfg.global_prep = o.global_prep;
  cfg.variants.clear();
  for (const auto& v : o.variants) cfg.variants.push_back(prs::parse_variant(v));
  cfg.classifiers.clear();
  for (const auto& c : o.classifiers) cfg.classifiers.push_back(classifier_spec(o, c));
  cfg.prs = prs_config(o);
  auto report = prs::run_experiment(f, cfg);

  json extra = feature_settings(o);
  extra["manifest"] = fs::path(o.manifest).filename().string();
  const fs::path dir(o.out);
  prs::write_file_atomic(dir / "eval_report.csv", prs::eval_report_csv(report));
  prs::write_file_atomic(dir / "eval_report.json", prs::eval_report_json(report, extra).dump(2) + "\n");
  say("wrote " + (dir / "eval_report.csv").string() + " and " + (dir / "eval_report.json").string());
}

void cmd_correlate(const Options& o) {
  auto f = load_features(o);
  auto table = prs::full_feature_table(f, prs_config(o), o.seed);
  auto corr = prs::correlation_matrix(table);
  const fs::path dir(o.out);
  prs::write_file_atomic(dir / "correlation.csv", prs::correlation_csv(corr));
  prs::write_file_atomic(dir / "features_all.csv", prs::feature_csv(f.ids, f.class_names, table));
  say("wrote " + (dir / "correlation.csv").string());
}

// ---- config file ----------------------------------------------------------

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// Flat `key = value` lines; `#` starts a comment. Each key is the long flag
// name without dashes. Keys already given on the command line are skipped so
// that flags win over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") path = eq != std::string::npos ? a.substr(eq + 1) : (i + 1 < args.size() ? args[i + 1] : "");
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read config file '" + path + "'");
  std::vector<std::string> out = args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--config", path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config") throw CLI::ValidationError("--config", "config files cannot include other config files");
    if (given.count(key)) continue;
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

// ---- wiring ---------------------------------------------------------------

void add_manifest(CLI::App* c, Options& o) {
  c->add_option("--manifest", o.manifest, "dataset manifest CSV")->required()->check(CLI::ExistingFile);
}
void add_out(CLI::App* c, Options& o) { c->add_option("--out", o.out, "output directory")->required(); }
void add_seed(CLI::App* c, Options& o) { c->add_option("--seed", o.seed, "random seed")->required(); }
void add_config(CLI::App* c) {
  c->add_option("--config", "flat key = value file mirroring the long flags; flags override it");
}
void add_threads(CLI::App* c, Options& o) {
  c->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 1024));
}
void add_feature_flags(CLI::App* c, Options& o) {
  c->add_option("--rel-threshold", o.rel_threshold, "ZC/WAMP/SSC threshold as a fraction of max|x|")
      ->check(CLI::Range(0.0, 1e300));
  c->add_flag("--centered-variance", o.centered_variance, "mean-centered VAR instead of the uncentered form");
  c->add_option("--median-mode", o.median_mode, "MedPSD as the median PSD value or the median frequency")
      ->check(CLI::IsMember({"psd", "freq"}));
}
void add_growth_flags(CLI::App* c, Options& o) {
  c->add_option("--days", o.days, "growth days")->check(CLI::Range(0, 100000));
  c->add_option("--limit", o.limit, "division limit (new cells per day)")->check(CLI::Range(1, 180));
  c->add_option("--radicle", o.radicle, "0-based start cell(s): 'row,col' or 'row,col;row,col'");
  c->add_flag("--no-barren", o.no_barren, "never occupy zero-nutrient cells");
  c->add_option("--fill", o.fill, "soil column fill")->check(CLI::IsMember({"stacked", "onehot", "graded"}));
  c->add_option("--restarts", o.restarts, "k-means restarts per column")->check(CLI::Range(1, 100000));
}
void add_classifier_flags(CLI::App* c, Options& o) {
  c->add_option("--lr-learning-rate", o.lr_learning_rate, "logistic regression initial step")
      ->check(CLI::PositiveNumber);
  c->add_option("--lr-max-iter", o.lr_max_iter, "logistic regression iterations")->check(CLI::NonNegativeNumber);
  c->add_option("--ridge", o.ridge, "LDA/QDA covariance ridge scale")->check(CLI::NonNegativeNumber);
  c->add_option("--svm-degree", o.svm_degree, "polynomial kernel degree")->check(CLI::Range(1, 20));
  c->add_option("--svm-c", o.svm_c, "SVM box constraint")->check(CLI::PositiveNumber);
  c->add_option("--svm-gamma", o.svm_gamma, "kernel scale")->check(CLI::PositiveNumber);
  c->add_option("--svm-coef0", o.svm_coef0, "kernel offset")->check(CLI::NonNegativeNumber);
}

int report_error(const std::string& kind, const std::string& message) {
  std::string flat = message;
  for (auto& ch : flat)
    if (ch == '\n' || ch == '\r') ch = ' ';
  std::cerr << "error: kind=" << kind << " message=" << flat << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"PRS feature pipeline"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "write a synthetic two-class dataset");
  synth->add_option("--n", o.n_per_class, "segments per class")->check(CLI::Range(2, 1000000));
  synth->add_option("--len", o.length, "samples per segment")->check(CLI::Range(16, 100000000));
  add_seed(synth, o);
  add_out(synth, o);
  add_config(synth);

  auto* extract = app.add_subcommand("extract", "12 base features per segment -> features.csv");
  auto* spectral = app.add_subcommand("spectral", "base features plus MaxPSD, MedPSD -> features_spectral.csv");
  for (auto* c : {extract, spectral}) {
    add_manifest(c, o);
    add_out(c, o);
    add_feature_flags(c, o);
    add_threads(c, o);
    add_config(c);
  }

  auto* rank = app.add_subcommand("rank", "information gain and soil position per feature -> rank.csv");
  add_manifest(rank, o);
  add_out(rank, o);
  add_seed(rank, o);
  add_feature_flags(rank, o);
  add_threads(rank, o);
  rank->add_option("--restarts", o.restarts, "k-means restarts per column")->check(CLI::Range(1, 100000));
  add_config(rank);

  auto* soil = app.add_subcommand("soil-dump", "discrete soil and nutrient grids of one segment");
  auto* grow = app.add_subcommand("grow", "grow the root system of one segment");
  for (auto* c : {soil, grow}) {
    add_manifest(c, o);
    add_seed(c, o);
    c->add_option("--sample", o.sample, "segment id")->required();
    add_feature_flags(c, o);
    add_growth_flags(c, o);
    add_threads(c, o);
    add_config(c);
  }
  add_out(soil, o);
  grow->add_option("--dump-frames", o.dump_frames, "directory for per-day occupancy CSVs and summary.json");

  auto* classify = app.add_subcommand("classify", "one stratified split, one classifier, one feature set");
  add_manifest(classify, o);
  add_out(classify, o);
  add_seed(classify, o);
  classify->add_option("--classifier", o.classifier, "LR, SVM_POLY, LDA or QDA");
  classify->add_option("--variant", o.variant, "BASE, BASE_NF, BASE_RF, PRS or COMPARISON");
  classify->add_option("--rate", o.rate, "learning (train) fraction")->check(CLI::Range(0.0, 1.0));
  classify->add_flag("--global-prep", o.global_prep, "fit soil preparation on all rows");
  add_feature_flags(classify, o);
  add_growth_flags(classify, o);
  add_classifier_flags(classify, o);
  add_threads(classify, o);
  add_config(classify);

  auto* evaluate = app.add_subcommand("evaluate", "repeated-split evaluation grid");
  add_manifest(evaluate, o);
  add_out(evaluate, o);
  add_seed(evaluate, o);
  evaluate->add_option("--reps", o.reps, "repetitions per cell")->check(CLI::Range(1, 1000000));
  evaluate->add_option("--rates", o.rates, "learning rates")->delimiter(',')->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--variants", o.variants, "feature sets")->delimiter(',');
  evaluate->add_option("--classifiers", o.classifiers, "classifiers")->delimiter(',');
  evaluate->add_flag("--global-prep", o.global_prep, "fit soil preparation on all rows instead of per train fold");
  add_feature_flags(evaluate, o);
  add_growth_flags(evaluate, o);
  add_classifier_flags(evaluate, o);
  add_threads(evaluate, o);
  add_config(evaluate);

  auto* correlate = app.add_subcommand("correlate", "16x16 Pearson correlation of all features");
  add_manifest(correlate, o);
  add_out(correlate, o);
  add_seed(correlate, o);
  add_feature_flags(correlate, o);
  add_growth_flags(correlate, o);
  add_threads(correlate, o);
  add_config(correlate);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) cmd_synth(o);
    else if (*extract) cmd_extract(o);
    else if (*spectral) cmd_spectral(o);
    else if (*rank) cmd_rank(o);
    else if (*soil) cmd_soil_dump(o);
    else if (*grow) cmd_grow(o);
    else if (*classify) cmd_classify(o);
    else if (*evaluate) cmd_evaluate(o);
    else if (*correlate) cmd_correlate(o);
  } catch (const prs::ArgumentError& e) {
    report_error(e.kind(), e.what());
    return 2;
  } catch (const prs::Error& e) {
    return report_error(e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error("io", e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
