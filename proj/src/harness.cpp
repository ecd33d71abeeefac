#include "sctx/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sctx/error.hpp"

namespace sctx {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kDeriveProse = "derive-from-tokens";

std::string num(double v) { return fmt::format("{}", v); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

template <typename T>
void read_field(const json& j, const char* key, T& into) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) into = it->get<T>();
}

ordered_json report_json(const EvalReport& r, const FoldPredictions* target,
                         const FoldPredictions& baseline) {
  ordered_json j;
  j["dependent"] = to_string(r.dependent);
  j["group"] = to_string(r.group);
  j["delta_mse"] = r.delta_mse;
  j["p_value"] = r.p_value;
  j["n_tokens"] = r.n_tokens;
  j["folds"] = r.folds;
  j["seed"] = r.seed;
  j["permutations"] = r.permutations;
  j["permutation_seed"] = permutation_seed(r.seed);
  j["converged"] = r.converged;
  j["per_fold_expected_mse_target"] = r.per_fold_expected_mse_target;
  j["per_fold_expected_mse_baseline"] = r.per_fold_expected_mse_baseline;
  ordered_json fold_seeds = ordered_json::array();
  for (int f = 0; f < r.folds; ++f) fold_seeds.push_back(fold_seed(r.seed, f));
  j["fit_seeds"] = fold_seeds;
  j["per_doc_expected_mse_target"] = r.per_doc_target;
  j["per_doc_expected_mse_baseline"] = r.per_doc_baseline;
  j["target_columns"] = target ? target->columns : baseline.columns;
  j["dropped_columns"] = target ? target->dropped : baseline.dropped;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  if (dependents.empty()) throw std::invalid_argument("no dependent variables selected");
  if (groups.empty()) throw std::invalid_argument("no predictor groups selected");
  fit.validate();
  for (const auto* path : {&corpus.tokens, &corpus.rst_trees}) {
    if (path->empty()) throw std::invalid_argument("corpus path is not set");
    if (!fs::exists(*path)) throw std::invalid_argument("'" + *path + "' does not exist");
  }
  if (corpus.prose_trees && !fs::exists(*corpus.prose_trees))
    throw std::invalid_argument("'" + *corpus.prose_trees + "' does not exist");
  if (extract.rst_ancestor_levels < 0) throw std::invalid_argument("rst_ancestor_levels < 0");
  if (extract.hier_max_depth < 1) throw std::invalid_argument("hier_max_depth must be >= 1");
}

std::vector<DependentKind> parse_dependent_list(const std::vector<std::string>& names) {
  std::vector<DependentKind> out;
  for (const auto& n : names) {
    if (n == "all") return {kAllDependents.begin(), kAllDependents.end()};
    const auto k = parse_dependent(n);
    if (!k) throw std::invalid_argument("unknown dependent variable '" + n + "'");
    out.push_back(*k);
  }
  return out;
}

std::vector<Group> parse_group_list(const std::vector<std::string>& names) {
  std::vector<Group> out;
  for (const auto& n : names) {
    if (n == "all") return {kAllGroups.begin(), kAllGroups.end()};
    const auto g = parse_group(n);
    if (!g) throw std::invalid_argument("unknown predictor group '" + n + "'");
    out.push_back(*g);
  }
  return out;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  read_field(j, "tokens", c.corpus.tokens);
  read_field(j, "rst_trees", c.corpus.rst_trees);
  if (auto it = j.find("prose_trees"); it != j.end() && !it->is_null()) {
    const auto value = it->get<std::string>();
    if (value != kDeriveProse) c.corpus.prose_trees = value;
  }
  read_field(j, "strict", c.corpus.strict);
  if (j.contains("dependents"))
    c.dependents = parse_dependent_list(j.at("dependents").get<std::vector<std::string>>());
  if (j.contains("groups"))
    c.groups = parse_group_list(j.at("groups").get<std::vector<std::string>>());
  if (auto it = j.find("fit"); it != j.end()) {
    read_field(*it, "learning_rate", c.fit.learning_rate);
    read_field(*it, "steps", c.fit.steps);
    read_field(*it, "prior_scale", c.fit.prior_scale);
    read_field(*it, "seed", c.fit.seed);
    read_field(*it, "folds", c.fit.folds);
    read_field(*it, "permutations", c.fit.permutations);
  }
  if (auto it = j.find("extract"); it != j.end()) {
    read_field(*it, "rst_ancestor_levels", c.extract.rst_ancestor_levels);
    read_field(*it, "hier_max_depth", c.extract.hier_max_depth);
  }
  read_field(j, "out", c.out_dir);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  return run_config_from_json(json::parse(in));
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["tokens"] = c.corpus.tokens;
  j["rst_trees"] = c.corpus.rst_trees;
  j["prose_trees"] = c.corpus.prose_trees.value_or(kDeriveProse);
  j["strict"] = c.corpus.strict;
  ordered_json deps = ordered_json::array();
  for (auto d : c.dependents) deps.push_back(to_string(d));
  j["dependents"] = deps;
  ordered_json groups = ordered_json::array();
  for (auto g : c.groups) groups.push_back(to_string(g));
  j["groups"] = groups;
  j["fit"] = {{"learning_rate", c.fit.learning_rate}, {"steps", c.fit.steps},
              {"prior_scale", c.fit.prior_scale},     {"seed", c.fit.seed},
              {"folds", c.fit.folds},                 {"permutations", c.fit.permutations}};
  j["extract"] = {{"rst_ancestor_levels", c.extract.rst_ancestor_levels},
                  {"hier_max_depth", c.extract.hier_max_depth}};
  j["out"] = c.out_dir;
  return j;
}

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec s;
  read_field(j, "documents", s.documents);
  read_field(j, "min_tokens", s.min_tokens);
  read_field(j, "max_tokens", s.max_tokens);
  read_field(j, "min_edu_tokens", s.min_edu_tokens);
  read_field(j, "max_edu_tokens", s.max_edu_tokens);
  read_field(j, "max_branching", s.max_branching);
  read_field(j, "max_depth", s.max_depth);
  if (j.contains("effects")) s.effects = j.at("effects").get<std::map<std::string, double>>();
  read_field(j, "intercept", s.intercept);
  read_field(j, "noise_sd", s.noise_sd);
  read_field(j, "seed", s.seed);
  return s;
}

ordered_json to_json(const SynthSpec& s) {
  ordered_json j;
  j["documents"] = s.documents;
  j["min_tokens"] = s.min_tokens;
  j["max_tokens"] = s.max_tokens;
  j["min_edu_tokens"] = s.min_edu_tokens;
  j["max_edu_tokens"] = s.max_edu_tokens;
  j["max_branching"] = s.max_branching;
  j["max_depth"] = s.max_depth;
  ordered_json effects = ordered_json::object();
  for (const auto& [name, coef] : s.effects) effects[name] = coef;
  j["effects"] = effects;
  j["intercept"] = s.intercept;
  j["noise_sd"] = s.noise_sd;
  j["seed"] = s.seed;
  return j;
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
  std::vector<std::string> warnings;
  const auto issues = validate_corpus(config.corpus, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << '\n';
  for (const auto& issue : issues) {
    if (issue.doc_id.empty())
      log << "error: " << issue.message << '\n';
    else
      log << "error: document '" << issue.doc_id << "': " << issue.message << '\n';
  }
  if (!issues.empty()) {
    log << issues.size() << " problem(s) found\n";
    return kExitValidation;
  }
  log << "ok\n";
  return kExitOk;
}

FeatureTable cmd_features(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::vector<std::string> warnings;
  const auto corpus = load_corpus(config.corpus, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << '\n';
  auto table = build_feature_table(corpus, config.extract, config.fit.folds, config.fit.seed);
  fs::create_directories(config.out_dir);
  auto csv = open_out(fs::path(config.out_dir) / "features.csv");
  write_feature_csv(csv, table);
  auto manifest = open_out(fs::path(config.out_dir) / "features.manifest.json");
  write_feature_manifest(manifest, table);
  log << "wrote " << table.rows() << " rows x " << table.predictors.size() << " predictors for "
      << table.documents() << " documents\n";
  return table;
}

std::vector<EvalReport> cmd_run(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::vector<std::string> warnings;
  const auto corpus = load_corpus(config.corpus, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << '\n';
  const auto table = build_feature_table(corpus, config.extract, config.fit.folds, config.fit.seed);
  fs::create_directories(config.out_dir);

  std::vector<EvalReport> reports;
  ordered_json details = ordered_json::array();
  auto contours = open_out(fs::path(config.out_dir) / "contours.csv");
  contours << "doc_id,token_index,dependent,observed,baseline";
  for (auto g : config.groups) {
    if (g != Group::baseline) contours << ',' << to_string(g);
  }
  contours << '\n';
  const auto row_docs = table.row_documents();

  for (DependentKind dep : config.dependents) {
    const auto baseline = cv_predictions(table, Group::baseline, dep, config.fit);
    std::vector<FoldPredictions> targets;
    targets.reserve(config.groups.size());
    for (Group g : config.groups) {
      const FoldPredictions* target = nullptr;
      if (g != Group::baseline) {
        targets.push_back(cv_predictions(table, g, dep, config.fit));
        target = &targets.back();
      }
      const auto report =
          compare_predictions(table, target ? *target : baseline, baseline, g, dep, config.fit);
      for (const auto& name : target ? target->dropped : baseline.dropped)
        log << "warning: " << to_string(dep) << '/' << to_string(g)
            << ": dropped zero-variance column " << name << '\n';
      if (!report.converged)
        log << "warning: " << to_string(dep) << '/' << to_string(g)
            << ": ELBO still improving at the final step\n";
      log << fmt::format("{:<14} {:<16} dMSE={:+.6f} p={:.4g}\n", to_string(dep), to_string(g),
                         report.delta_mse, report.p_value);
      details.push_back(report_json(report, target, baseline));
      reports.push_back(report);
    }

    const auto& observed = table.dependent(dep).values;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      contours << table.doc_ids[static_cast<std::size_t>(row_docs[r])] << ','
               << table.token_index[r] << ',' << to_string(dep) << ',' << num(observed[r]) << ','
               << num(baseline.prediction[r]);
      for (const auto& t : targets) contours << ',' << num(t.prediction[r]);
      contours << '\n';
    }
  }

  auto csv = open_out(fs::path(config.out_dir) / "report.csv");
  write_report_csv(csv, reports);
  ordered_json doc;
  doc["config"] = to_json(config);
  // The output location is not part of the result; keeps reports comparable across directories.
  doc["config"].erase("out");
  doc["documents"] = table.documents();
  doc["reports"] = details;
  auto js = open_out(fs::path(config.out_dir) / "report.json");
  js << doc.dump(2) << '\n';
  return reports;
}

void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << "dependent,group,delta_mse,p_value,n_tokens,folds\n";
  for (const auto& r : reports)
    out << to_string(r.dependent) << ',' << to_string(r.group) << ',' << num(r.delta_mse) << ','
        << num(r.p_value) << ',' << r.n_tokens << ',' << r.folds << '\n';
}

void cmd_synth(const SynthSpec& spec, const std::string& out_dir, std::ostream& log) {
  const auto corpus = generate_corpus(spec);
  write_corpus(out_dir, corpus);
  auto manifest = open_out(fs::path(out_dir) / "synth.json");
  manifest << to_json(spec).dump(2) << '\n';
  std::size_t tokens = 0;
  for (const auto& d : corpus) tokens += d.doc.tokens.size();
  log << "wrote " << corpus.size() << " documents (" << tokens << " tokens) to " << out_dir << '\n';
}

void cmd_report(const std::string& report_json_path, const std::string& out_dir, std::ostream& log) {
  std::ifstream in(report_json_path);
  if (!in) throw std::invalid_argument("cannot open report '" + report_json_path + "'");
  const json doc = json::parse(in);
  const fs::path dir = out_dir.empty() ? fs::path(report_json_path).parent_path() : fs::path(out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  auto csv = open_out(dir / "figure_data.csv");
  csv << "dependent,group,family,delta_mse,se,p_value,significant_001\n";
  log << fmt::format("{:<14} {:<16} {:>12} {:>10} {:>10}\n", "dependent", "group", "delta_mse",
                     "se", "p");
  for (const auto& r : doc.at("reports")) {
    const auto group = r.at("group").get<std::string>();
    const auto target = r.at("per_doc_expected_mse_target").get<std::vector<double>>();
    const auto base = r.at("per_doc_expected_mse_baseline").get<std::vector<double>>();
    // Standard error of the mean per-document difference.
    double se = 0.0;
    if (target.size() > 1) {
      double mean = 0.0;
      for (std::size_t i = 0; i < target.size(); ++i) mean += target[i] - base[i];
      mean /= static_cast<double>(target.size());
      double ss = 0.0;
      for (std::size_t i = 0; i < target.size(); ++i) {
        const double dev = target[i] - base[i] - mean;
        ss += dev * dev;
      }
      se = std::sqrt(ss / static_cast<double>(target.size() - 1) /
                     static_cast<double>(target.size()));
    }
    const std::string family = group.starts_with("rst_") ? "rst"
                               : group.starts_with("ps_") ? "ps"
                                                          : "baseline";
    const double delta = r.at("delta_mse").get<double>();
    const double p = r.at("p_value").get<double>();
    const auto dependent = r.at("dependent").get<std::string>();
    csv << dependent << ',' << group << ',' << family << ',' << num(delta) << ',' << num(se) << ','
        << num(p) << ',' << (p < 0.001 ? 1 : 0) << '\n';
    log << fmt::format("{:<14} {:<16} {:>+12.6f} {:>10.6f} {:>10.4g}\n", dependent, group, delta,
                       se, p);
  }
}

}  // namespace sctx
