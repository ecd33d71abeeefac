#ifndef SCTX_FEATURES_HPP
#define SCTX_FEATURES_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sctx/contours.hpp"
#include "sctx/corpus.hpp"

namespace sctx {

// Predictor-group selectors. `baseline` adds nothing to the baseline columns;
// the *_all selectors take every column of one tree family.
enum class Group {
  baseline,
  rst_relpos,
  rst_boundary,
  rst_hier,
  rst_transitions,
  rst_all,
  ps_relpos,
  ps_boundary,
  ps_hier,
  ps_transitions,
  ps_all,
};

inline constexpr std::array<Group, 11> kAllGroups = {
    Group::baseline,   Group::rst_relpos,  Group::rst_boundary, Group::rst_hier,
    Group::rst_transitions, Group::rst_all, Group::ps_relpos,   Group::ps_boundary,
    Group::ps_hier,    Group::ps_transitions, Group::ps_all};

const char* to_string(Group g);
std::optional<Group> parse_group(std::string_view name);

struct ExtractOptions {
  int rst_ancestor_levels = 3;  // RST relative-position windows above the EDU
  int hier_max_depth = 4;
};

// `group` is the column's tag: "baseline", a group name, or "dependent".
struct Column {
  std::string name;
  std::string group;
  std::vector<double> values;
};

struct DocumentFeatures {
  std::vector<Column> dependents;  // one per DependentKind, kAllDependents order
  std::vector<Column> predictors;  // baseline first, then RST, then prose groups
};

// Pure per-document extraction.
DocumentFeatures extract_document(const CorpusDocument& doc, const ExtractOptions& options);

// Document-level fold assignment: a seeded shuffle dealt round-robin.
std::vector<int> assign_folds(std::size_t documents, int folds, std::uint64_t seed);

struct FeatureTable {
  std::vector<std::string> doc_ids;
  std::vector<std::size_t> doc_offsets;  // rows of doc k are [doc_offsets[k], doc_offsets[k+1])
  std::vector<int> doc_folds;
  std::vector<int> token_index;
  std::vector<Column> dependents;
  std::vector<Column> predictors;
  int folds = 0;
  std::uint64_t fold_seed = 0;
  ExtractOptions options;

  std::size_t rows() const { return token_index.size(); }
  std::size_t documents() const { return doc_ids.size(); }
  int fold_of_row(std::size_t row) const;
  std::vector<int> row_folds() const;
  std::vector<int> row_documents() const;
  const Column& dependent(DependentKind kind) const;
  // Indices into `predictors` of the group's own columns (empty for baseline).
  std::vector<std::size_t> group_columns(Group g) const;
  std::vector<std::size_t> baseline_columns() const;
};

// Extracts every document (in parallel) and merges in document order.
FeatureTable build_feature_table(std::span<const CorpusDocument> corpus,
                                 const ExtractOptions& options, int folds, std::uint64_t seed);

struct ColumnStats {
  double mean = 0.0;
  double sd = 1.0;
};

// Regression inputs for one (group, dependent) cell. X covers every row of the
// table, z-scored with statistics from the training rows only.
struct DesignMatrix {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;
  std::vector<ColumnStats> stats;
  std::vector<std::string> dropped;  // zero-variance columns left out
};

inline constexpr double kMinColumnSd = 1e-12;

// held_out_fold < 0 trains on every row. Throws std::invalid_argument when the
// group has no columns in the table.
DesignMatrix build_design_matrix(const FeatureTable& table, Group group, DependentKind dependent,
                                 int held_out_fold = -1);

// Mean and (population) sd of `values` over rows whose fold differs from
// held_out_fold.
ColumnStats training_stats(std::span<const double> values, std::span<const int> row_folds,
                           int held_out_fold);

// doc_id,token_index,fold_id,<dependents...>,<predictors...>
void write_feature_csv(std::ostream& out, const FeatureTable& table);
// Column tags, fold assignment and per-fold standardization statistics.
void write_feature_manifest(std::ostream& out, const FeatureTable& table);

}  // namespace sctx

#endif  // SCTX_FEATURES_HPP
