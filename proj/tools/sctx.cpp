// Command-line entry point: validate, features, run, synth, report.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sctx/error.hpp"
#include "sctx/harness.hpp"
#include "sctx/kernels.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string tokens;
  std::string rst;
  std::string prose;
  bool lenient = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  std::optional<int> steps;
  std::optional<int> permutations;
  std::optional<double> learning_rate;
  std::vector<std::string> groups;
  std::vector<std::string> dependents;
  std::string out;
};

sctx::RunConfig resolve(const Overrides& o) {
  sctx::RunConfig c = o.config.empty() ? sctx::RunConfig{} : sctx::load_run_config(o.config);
  if (!o.tokens.empty()) c.corpus.tokens = o.tokens;
  if (!o.rst.empty()) c.corpus.rst_trees = o.rst;
  if (!o.prose.empty()) {
    if (o.prose == "derive-from-tokens")
      c.corpus.prose_trees.reset();
    else
      c.corpus.prose_trees = o.prose;
  }
  if (o.lenient) c.corpus.strict = false;
  if (o.seed) c.fit.seed = *o.seed;
  if (o.folds) c.fit.folds = *o.folds;
  if (o.steps) c.fit.steps = *o.steps;
  if (o.permutations) c.fit.permutations = *o.permutations;
  if (o.learning_rate) c.fit.learning_rate = *o.learning_rate;
  if (!o.groups.empty()) c.groups = sctx::parse_group_list(o.groups);
  if (!o.dependents.empty()) c.dependents = sctx::parse_dependent_list(o.dependents);
  if (!o.out.empty()) c.out_dir = o.out;
  return c;
}

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--tokens", o.tokens, "token file (JSON Lines)");
  cmd->add_option("--rst", o.rst, "RST tree file");
  cmd->add_option("--prose", o.prose, "prose tree file, or derive-from-tokens");
  cmd->add_flag("--lenient", o.lenient, "warn on unknown token fields instead of failing");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--folds", o.folds, "cross-validation folds");
  cmd->add_option("--steps", o.steps, "optimizer steps per fit");
  cmd->add_option("--permutations", o.permutations, "sign-flip permutations");
  cmd->add_option("--lr", o.learning_rate, "learning rate");
  cmd->add_option("--groups", o.groups, "predictor groups (or 'all')")->delimiter(',');
  cmd->add_option("--dependents", o.dependents, "dependent variables (or 'all')")->delimiter(',');
  cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* workers = std::getenv(sctx::kWorkersEnv)) {
    const int n = std::atoi(workers);
    if (n > 0) sctx::kernels::set_threads(n);
  }

  CLI::App app{"Discourse-structure predictors of surprisal contours"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* validate = app.add_subcommand("validate", "check token/tree alignment and channels");
  add_run_options(validate, run_opts);
  auto* features = app.add_subcommand("features", "write the feature table and manifest");
  add_run_options(features, run_opts);
  auto* run = app.add_subcommand("run", "cross-validate every dependent x group cell");
  add_run_options(run, run_opts);

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with a planted signal");
  std::string spec_path;
  std::optional<int> documents;
  std::optional<double> noise_sd;
  std::optional<std::uint64_t> synth_seed;
  std::vector<std::string> effects;
  std::string synth_out = "synth";
  synth->add_option("--spec", spec_path, "JSON synth spec");
  synth->add_option("--documents", documents, "number of documents");
  synth->add_option("--noise-sd", noise_sd, "noise standard deviation");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--effect", effects, "planted effect, name=coefficient (repeatable)");
  synth->add_option("--out", synth_out, "output directory");

  auto* report = app.add_subcommand("report", "summarize report.json as plot-ready CSV");
  std::string report_path;
  std::string report_out;
  report->add_option("report", report_path, "report.json from `run`")->required();
  report->add_option("--out", report_out, "output directory (default: next to the report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? sctx::kExitOk : sctx::kExitRuntime;
  }

  try {
    if (*validate) return sctx::cmd_validate(resolve(run_opts), std::cout);
    if (*features) {
      sctx::cmd_features(resolve(run_opts), std::cerr);
      return sctx::kExitOk;
    }
    if (*run) {
      sctx::cmd_run(resolve(run_opts), std::cerr);
      return sctx::kExitOk;
    }
    if (*synth) {
      sctx::SynthSpec spec;
      if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw std::invalid_argument("cannot open spec '" + spec_path + "'");
        spec = sctx::synth_spec_from_json(nlohmann::json::parse(in));
      }
      if (documents) spec.documents = *documents;
      if (noise_sd) spec.noise_sd = *noise_sd;
      if (synth_seed) spec.seed = *synth_seed;
      for (const auto& e : effects) {
        const auto eq = e.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--effect expects name=coefficient");
        spec.effects[e.substr(0, eq)] = std::stod(e.substr(eq + 1));
      }
      sctx::cmd_synth(spec, synth_out, std::cerr);
      return sctx::kExitOk;
    }
    if (*report) {
      sctx::cmd_report(report_path, report_out, std::cout);
      return sctx::kExitOk;
    }
  } catch (const sctx::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return sctx::kExitValidation;
  } catch (const sctx::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return sctx::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sctx::kExitRuntime;
  }
  return sctx::kExitOk;
}
