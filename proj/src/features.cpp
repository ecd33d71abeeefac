#include "sctx/features.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "sctx/error.hpp"
#include "sctx/predictors.hpp"

namespace sctx {

namespace {

constexpr std::array<const char*, 11> kGroupNames = {
    "baseline",  "rst_relpos",  "rst_boundary", "rst_hier",       "rst_transitions", "rst_all",
    "ps_relpos", "ps_boundary", "ps_hier",      "ps_transitions", "ps_all"};

void add_position_columns(std::vector<Column>& out, const DiscourseTree& tree,
                          std::span<const TokenSpan> spans, std::span<const TokenRecord> tokens,
                          const std::string& family, std::span<const std::string> level_names,
                          std::span<const int> ancestor_steps) {
  std::vector<Column> boundary;
  for (std::size_t k = 0; k < level_names.size(); ++k) {
    const auto windows = containing_windows(tree, spans, tokens, ancestor_steps[k]);
    out.push_back({family + "_relpos_" + level_names[k], family + "_relpos",
                   relative_position(tokens, windows)});
    boundary.push_back({family + "_boundary_" + level_names[k], family + "_boundary",
                        nearest_boundary(tokens, windows)});
  }
  for (auto& c : boundary) out.push_back(std::move(c));
}

void add_tree_columns(std::vector<Column>& out, const DiscourseTree& tree,
                      std::span<const TokenRecord> tokens, const std::string& family,
                      std::span<const std::string> level_names, std::span<const int> ancestor_steps,
                      int hier_max_depth) {
  const auto spans = leaf_spans(tree, tokens);
  add_position_columns(out, tree, spans, tokens, family, level_names, ancestor_steps);

  auto hier = hierarchical_position(tokens, tree, spans, hier_max_depth);
  for (std::size_t d = 0; d < hier.size(); ++d) {
    const std::string name = d + 1 == hier.size() ? family + "_hier_leaf"
                                                  : family + "_hier_d" + std::to_string(d + 1);
    out.push_back({name, family + "_hier", std::move(hier[d])});
  }

  for (auto& c : transition_features(right_binarize(tree), tokens, family + "_trans"))
    out.push_back({std::move(c.name), family + "_transitions", std::move(c.values)});
}

std::string format_double(double v) { return fmt::format("{}", v); }

}  // namespace

const char* to_string(Group g) { return kGroupNames[static_cast<std::size_t>(g)]; }

std::optional<Group> parse_group(std::string_view name) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i) {
    if (name == kGroupNames[i]) return static_cast<Group>(i);
  }
  return std::nullopt;
}

DocumentFeatures extract_document(const CorpusDocument& doc, const ExtractOptions& options) {
  const std::span<const TokenRecord> tokens = doc.doc.tokens;
  DocumentFeatures out;
  for (DependentKind kind : kAllDependents)
    out.dependents.push_back({to_string(kind), "dependent", compute_dependent(tokens, kind).values});

  auto base = baseline_features(tokens);
  out.predictors.push_back({"char_len", "baseline", std::move(base.char_len)});
  out.predictors.push_back({"prev_surprisal", "baseline", std::move(base.prev_surprisal)});

  std::vector<std::string> rst_levels{"edu"};
  std::vector<int> rst_steps{0};
  for (int k = 1; k <= options.rst_ancestor_levels; ++k) {
    rst_levels.push_back("anc" + std::to_string(k));
    rst_steps.push_back(k);
  }
  add_tree_columns(out.predictors, doc.rst, tokens, "rst", rst_levels, rst_steps,
                   options.hier_max_depth);

  const std::vector<std::string> ps_levels{"sentence", "paragraph", "document"};
  const std::vector<int> ps_steps{0, 1, 2};
  add_tree_columns(out.predictors, doc.prose, tokens, "ps", ps_levels, ps_steps,
                   options.hier_max_depth);
  return out;
}

std::vector<int> assign_folds(std::size_t documents, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("need at least 2 folds");
  if (documents < static_cast<std::size_t>(folds))
    throw std::invalid_argument("fewer documents (" + std::to_string(documents) + ") than folds (" +
                                std::to_string(folds) + ")");
  std::vector<std::size_t> order(documents);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(documents, 0);
  for (std::size_t k = 0; k < documents; ++k) fold[order[k]] = static_cast<int>(k % folds);
  return fold;
}

int FeatureTable::fold_of_row(std::size_t row) const {
  const auto it = std::upper_bound(doc_offsets.begin(), doc_offsets.end(), row);
  return doc_folds[static_cast<std::size_t>(it - doc_offsets.begin() - 1)];
}

std::vector<int> FeatureTable::row_documents() const {
  std::vector<int> out(rows());
  for (std::size_t d = 0; d < documents(); ++d)
    std::fill(out.begin() + static_cast<long>(doc_offsets[d]),
              out.begin() + static_cast<long>(doc_offsets[d + 1]), static_cast<int>(d));
  return out;
}

std::vector<int> FeatureTable::row_folds() const {
  auto out = row_documents();
  for (int& v : out) v = doc_folds[static_cast<std::size_t>(v)];
  return out;
}

const Column& FeatureTable::dependent(DependentKind kind) const {
  for (const auto& c : dependents) {
    if (c.name == to_string(kind)) return c;
  }
  throw std::invalid_argument(std::string("table has no dependent ") + to_string(kind));
}

std::vector<std::size_t> FeatureTable::group_columns(Group g) const {
  std::vector<std::size_t> out;
  if (g == Group::baseline) return out;
  const std::string tag = to_string(g);
  const bool family = g == Group::rst_all || g == Group::ps_all;
  const std::string prefix = g == Group::rst_all ? "rst_" : "ps_";
  for (std::size_t i = 0; i < predictors.size(); ++i) {
    const auto& group = predictors[i].group;
    if (family ? group.starts_with(prefix) : group == tag) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FeatureTable::baseline_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < predictors.size(); ++i) {
    if (predictors[i].group == "baseline") out.push_back(i);
  }
  return out;
}

FeatureTable build_feature_table(std::span<const CorpusDocument> corpus,
                                 const ExtractOptions& options, int folds, std::uint64_t seed) {
  FeatureTable table;
  table.folds = folds;
  table.fold_seed = seed;
  table.options = options;
  table.doc_folds = assign_folds(corpus.size(), folds, seed);

  std::vector<DocumentFeatures> per_doc(corpus.size());
  std::vector<std::exception_ptr> failure(corpus.size());
  const long n = static_cast<long>(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      per_doc[static_cast<std::size_t>(i)] =
          extract_document(corpus[static_cast<std::size_t>(i)], options);
    } catch (...) {
      failure[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!failure[i]) continue;
    try {
      std::rethrow_exception(failure[i]);
    } catch (const std::exception& e) {
      throw ValidationError("document '" + corpus[i].doc.doc_id + "': " + e.what());
    }
  }

  table.doc_offsets.push_back(0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& doc = corpus[i].doc;
    auto& feats = per_doc[i];
    table.doc_ids.push_back(doc.doc_id);
    for (const auto& t : doc.tokens) table.token_index.push_back(t.token_index);
    table.doc_offsets.push_back(table.token_index.size());

    auto merge = [](std::vector<Column>& into, std::vector<Column>& from) {
      if (into.empty()) {
        into = std::move(from);
        return;
      }
      for (std::size_t c = 0; c < into.size(); ++c)
        into[c].values.insert(into[c].values.end(), from[c].values.begin(), from[c].values.end());
    };
    merge(table.dependents, feats.dependents);
    merge(table.predictors, feats.predictors);
  }
  return table;
}

ColumnStats training_stats(std::span<const double> values, std::span<const int> row_folds,
                           int held_out_fold) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (row_folds[i] == held_out_fold) continue;
    sum += values[i];
    ++count;
  }
  if (count == 0) throw std::invalid_argument("no training rows");
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (row_folds[i] == held_out_fold) continue;
    ss += (values[i] - mean) * (values[i] - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(count))};
}

DesignMatrix build_design_matrix(const FeatureTable& table, Group group, DependentKind dependent,
                                 int held_out_fold) {
  std::vector<std::size_t> columns = table.baseline_columns();
  if (group != Group::baseline) {
    const auto own = table.group_columns(group);
    if (own.empty())
      throw std::invalid_argument(std::string("predictor group ") + to_string(group) +
                                  " has no columns");
    columns.insert(columns.end(), own.begin(), own.end());
  }

  const auto folds = table.row_folds();
  DesignMatrix dm;
  std::vector<std::size_t> kept;
  for (std::size_t c : columns) {
    const auto& col = table.predictors[c];
    const ColumnStats s = training_stats(col.values, folds, held_out_fold);
    if (s.sd < kMinColumnSd) {
      dm.dropped.push_back(col.name);
      continue;
    }
    kept.push_back(c);
    dm.names.push_back(col.name);
    dm.stats.push_back(s);
  }

  const auto n = static_cast<Eigen::Index>(table.rows());
  dm.X.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto& values = table.predictors[kept[k]].values;
    const auto& s = dm.stats[k];
    for (Eigen::Index i = 0; i < n; ++i)
      dm.X(i, static_cast<Eigen::Index>(k)) = (values[static_cast<std::size_t>(i)] - s.mean) / s.sd;
  }
  const auto& y = table.dependent(dependent).values;
  dm.y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  return dm;
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << "doc_id,token_index,fold_id";
  for (const auto& c : table.dependents) out << ',' << c.name;
  for (const auto& c : table.predictors) out << ',' << c.name;
  out << '\n';
  const auto docs = table.row_documents();
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const auto d = static_cast<std::size_t>(docs[r]);
    out << table.doc_ids[d] << ',' << table.token_index[r] << ',' << table.doc_folds[d];
    for (const auto& c : table.dependents) out << ',' << format_double(c.values[r]);
    for (const auto& c : table.predictors) out << ',' << format_double(c.values[r]);
    out << '\n';
  }
}

void write_feature_manifest(std::ostream& out, const FeatureTable& table) {
  using nlohmann::ordered_json;
  ordered_json m;
  m["rows"] = table.rows();
  m["documents"] = table.documents();
  m["folds"] = table.folds;
  m["fold_seed"] = table.fold_seed;
  m["options"] = {{"rst_ancestor_levels", table.options.rst_ancestor_levels},
                  {"hier_max_depth", table.options.hier_max_depth}};

  ordered_json cols = ordered_json::array();
  for (const auto& c : table.dependents)
    cols.push_back({{"name", c.name}, {"role", "dependent"}, {"group", c.group}});
  for (const auto& c : table.predictors)
    cols.push_back({{"name", c.name},
                    {"role", c.group == "baseline" ? "baseline" : "predictor"},
                    {"group", c.group}});
  m["columns"] = cols;

  ordered_json assignment = ordered_json::object();
  for (std::size_t d = 0; d < table.documents(); ++d)
    assignment[table.doc_ids[d]] = table.doc_folds[d];
  m["fold_assignment"] = assignment;

  // Statistics used when fold f is held out.
  const auto folds = table.row_folds();
  ordered_json standardization = ordered_json::array();
  for (int f = 0; f < table.folds; ++f) {
    ordered_json per_col = ordered_json::object();
    for (const auto& c : table.predictors) {
      const auto s = training_stats(c.values, folds, f);
      per_col[c.name] = {{"mean", s.mean}, {"sd", s.sd}};
    }
    standardization.push_back({{"held_out_fold", f}, {"columns", per_col}});
  }
  m["standardization"] = standardization;
  out << m.dump(2) << '\n';
}

}  // namespace sctx
