#pragma once

#include <json.hpp>

#include <cstdio>
#include <string>

#include "prs/eval_harness.hpp"
#include "prs/root_growth.hpp"
#include "prs/soil.hpp"
#include "prs/stats.hpp"

namespace prs {

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string num(double v) { return fmt("%.10g", v); }

}  // namespace detail

inline nlohmann::ordered_json to_json(const GrowthConfig& g) {
  nlohmann::ordered_json radicle = nlohmann::ordered_json::array();
  for (const auto& c : g.radicle) radicle.push_back({c.row, c.col});
  return {{"days", g.days}, {"division_limit", g.division_limit}, {"radicle", radicle},
          {"grow_into_barren", g.grow_into_barren}};
}

inline std::string_view to_string(SoilFill f) {
  switch (f) {
    case SoilFill::Stacked: return "stacked";
    case SoilFill::OneHot: return "onehot";
    case SoilFill::Graded: return "graded";
  }
  return "?";
}

inline nlohmann::ordered_json to_json(const ClassifierSpec& s) {
  nlohmann::ordered_json j = {{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case ClassifierKind::LR:
      j["learning_rate"] = s.logistic.learning_rate;
      j["max_iter"] = s.logistic.max_iter;
      j["tol"] = s.logistic.tol;
      break;
    case ClassifierKind::LDA:
    case ClassifierKind::QDA:
      j["ridge_scale"] = s.discriminant.ridge_scale;
      break;
    case ClassifierKind::SVM_POLY:
      j["degree"] = s.svm.degree;
      j["C"] = s.svm.C;
      j["gamma"] = s.svm.gamma;
      j["coef0"] = s.svm.coef0;
      j["tol"] = s.svm.tol;
      break;
  }
  return j;
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["rates"] = c.rates;
  auto& vars = j["variants"] = nlohmann::ordered_json::array();
  for (auto v : c.variants) vars.push_back(to_string(v));
  auto& cls = j["classifiers"] = nlohmann::ordered_json::array();
  for (const auto& s : c.classifiers) cls.push_back(to_json(s));
  j["growth"] = to_json(c.prs.growth);
  j["soil_fill"] = to_string(c.prs.fill);
  j["kmeans_restarts"] = c.prs.kmeans_restarts;
  j["global_prep"] = c.global_prep;
  j["max_split_retries"] = c.max_split_retries;
  return j;
}

// Long format: classifier,variant,rate,rep_mean,rep_std,n_reps
inline std::string eval_report_csv(const EvalReport& r) {
  std::string out = "classifier,variant,rate,rep_mean,rep_std,n_reps\n";
  for (const auto& c : r.cells) {
    out += std::string(to_string(c.classifier)) + "," + std::string(to_string(c.variant)) + "," +
           detail::fmt("%.2f", c.rate) + "," + detail::num(c.mean) + "," + detail::num(c.std) + "," +
           std::to_string(c.accuracies.size()) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json eval_report_json(const EvalReport& r, const nlohmann::ordered_json& extra = {}) {
  nlohmann::ordered_json j;
  j["config"] = to_json(r.config);
  if (!extra.is_null())
    for (auto it = extra.begin(); it != extra.end(); ++it) j["config"][it.key()] = it.value();
  j["n_samples"] = r.n_samples;
  auto& cells = j["results"] = nlohmann::ordered_json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"classifier", to_string(c.classifier)},
                     {"variant", to_string(c.variant)},
                     {"rate", c.rate},
                     {"mean", c.mean},
                     {"std", c.std},
                     {"min", c.min},
                     {"max", c.max},
                     {"n_reps", c.accuracies.size()},
                     {"accuracies", c.accuracies}});
  }
  auto& anova = j["anova"] = nlohmann::ordered_json::array();
  for (const auto& a : r.anova) {
    nlohmann::ordered_json e = {{"classifier", to_string(a.classifier)},
                                {"rate", a.rate},
                                {"df_between", a.result.df_between},
                                {"df_within", a.result.df_within},
                                {"f_infinite", a.result.infinite}};
    e["F"] = a.result.infinite ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(a.result.f);
    anova.push_back(std::move(e));
  }
  // Pairwise mean differences (row variant minus column variant) per
  // (classifier, rate).
  auto& diffs = j["pairwise_mean_differences"] = nlohmann::ordered_json::array();
  for (const auto& a : r.cells) {
    for (const auto& b : r.cells) {
      if (a.classifier != b.classifier || a.rate != b.rate || a.variant == b.variant) continue;
      diffs.push_back({{"classifier", to_string(a.classifier)},
                       {"rate", a.rate},
                       {"a", to_string(a.variant)},
                       {"b", to_string(b.variant)},
                       {"mean_difference", a.mean - b.mean}});
    }
  }
  return j;
}

inline std::string correlation_csv(const CorrelationReport& r) {
  std::string out = "feature";
  for (const auto& n : r.names) out += "," + n;
  out += "\n";
  for (std::size_t i = 0; i < r.size; ++i) {
    out += r.names[i];
    for (std::size_t j = 0; j < r.size; ++j) out += "," + detail::num(r(i, j));
    out += "\n";
  }
  return out;
}

template <typename T, std::size_t R, std::size_t C>
std::string grid_csv(const Grid<T, R, C>& g) {
  std::string out;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      if (c) out += ",";
      out += detail::num(static_cast<double>(g(r, c)));
    }
    out += "\n";
  }
  return out;
}

inline std::string feature_csv(const std::vector<std::string>& ids, const std::array<std::string, 2>& class_names,
                               const FeatureMatrix& m) {
  std::string out = "id,label";
  for (const auto& n : m.names) out += "," + n;
  out += "\n";
  for (std::size_t r = 0; r < m.rows; ++r) {
    out += ids[r] + "," + class_names[m.labels[r]];
    for (std::size_t c = 0; c < m.cols; ++c) out += "," + detail::fmt("%.17g", m(r, c));
    out += "\n";
  }
  return out;
}

}  // namespace prs
