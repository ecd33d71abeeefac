#ifndef SCTX_HARNESS_HPP
#define SCTX_HARNESS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sctx/corpus.hpp"
#include "sctx/features.hpp"
#include "sctx/inference.hpp"
#include "sctx/synth.hpp"

namespace sctx {

// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

// Environment variable holding the worker-thread count.
inline constexpr const char* kWorkersEnv = "SCTX_WORKERS";

struct RunConfig {
  CorpusPaths corpus;
  std::vector<DependentKind> dependents{kAllDependents.begin(), kAllDependents.end()};
  std::vector<Group> groups{kAllGroups.begin(), kAllGroups.end()};
  FitConfig fit;
  ExtractOptions extract;
  std::string out_dir = "out";

  // Throws std::invalid_argument.
  void validate() const;
};

// Reads a JSON config; missing fields keep their defaults. A prose_trees value
// of "derive-from-tokens" (or null) derives prose trees from the tokens.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::ordered_json to_json(const RunConfig& config);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const SynthSpec& spec);

std::vector<DependentKind> parse_dependent_list(const std::vector<std::string>& names);
std::vector<Group> parse_group_list(const std::vector<std::string>& names);

// Checks token/tree alignment, channel finiteness and leaf contiguity; writes
// one line per problem. Returns kExitOk or kExitValidation.
int cmd_validate(const RunConfig& config, std::ostream& log);

// Writes features.csv and features.manifest.json into the output directory.
FeatureTable cmd_features(const RunConfig& config, std::ostream& log);

// One EvalReport per (dependent, group); writes report.csv, report.json and
// contours.csv into the output directory.
std::vector<EvalReport> cmd_run(const RunConfig& config, std::ostream& log);

// Generates a corpus and writes it, plus synth.json, into `out_dir`.
void cmd_synth(const SynthSpec& spec, const std::string& out_dir, std::ostream& log);

// Reads report.json; prints a summary and writes figure_data.csv next to it
// (or into out_dir when given).
void cmd_report(const std::string& report_json, const std::string& out_dir, std::ostream& log);

// dependent,group,delta_mse,p_value,n_tokens,folds
void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports);

}  // namespace sctx

#endif  // SCTX_HARNESS_HPP
