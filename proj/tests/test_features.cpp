#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sctx/features.hpp"
#include "sctx/synth.hpp"

using namespace sctx;

namespace {

const std::vector<CorpusDocument>& corpus() {
  static const auto c = [] {
    SynthSpec spec;
    spec.documents = 12;
    spec.seed = 5;
    return generate_corpus(spec);
  }();
  return c;
}

const FeatureTable& table() {
  static const FeatureTable t = build_feature_table(corpus(), ExtractOptions{}, 5, 17);
  return t;
}

}  // namespace

TEST_CASE("fold assignment partitions documents evenly") {
  const auto folds = assign_folds(23, 5, 3);
  std::vector<int> sizes(5, 0);
  for (int f : folds) ++sizes[static_cast<std::size_t>(f)];
  for (int s : sizes) CHECK((s == 4 || s == 5));
  CHECK(assign_folds(23, 5, 3) == folds);
  CHECK(assign_folds(23, 5, 4) != folds);
  CHECK_THROWS(assign_folds(4, 5, 0));
}

TEST_CASE("feature table shape") {
  const auto& t = table();
  std::size_t tokens = 0;
  for (const auto& d : corpus()) tokens += d.doc.tokens.size();
  CHECK(t.rows() == tokens);
  CHECK(t.documents() == corpus().size());
  CHECK(t.dependents.size() == kAllDependents.size());

  CHECK(t.baseline_columns().size() == 2);
  CHECK(t.group_columns(Group::baseline).empty());
  CHECK(t.group_columns(Group::rst_relpos).size() == 4);
  CHECK(t.group_columns(Group::rst_boundary).size() == 4);
  CHECK(t.group_columns(Group::rst_hier).size() == 5);
  CHECK(t.group_columns(Group::rst_transitions).size() == 12);
  CHECK(t.group_columns(Group::rst_all).size() == 25);
  CHECK(t.group_columns(Group::ps_relpos).size() == 3);
  CHECK(t.group_columns(Group::ps_boundary).size() == 3);
  CHECK(t.group_columns(Group::ps_hier).size() == 5);
  CHECK(t.group_columns(Group::ps_transitions).size() == 12);
  CHECK(t.group_columns(Group::ps_all).size() == 23);

  for (const auto& c : t.predictors) {
    REQUIRE(c.values.size() == t.rows());
    for (double v : c.values) {
      CHECK(std::isfinite(v));
      if (v == -1.0) CHECK(c.group.ends_with("_hier"));
    }
  }
  // Every document sits in exactly one fold.
  const auto rows = t.row_folds();
  for (std::size_t d = 0; d < t.documents(); ++d)
    for (std::size_t r = t.doc_offsets[d]; r < t.doc_offsets[d + 1]; ++r)
      CHECK(rows[r] == t.doc_folds[d]);
}

TEST_CASE("design matrix columns and standardization") {
  const auto& t = table();
  const auto base = build_design_matrix(t, Group::baseline, DependentKind::doc_surprisal, 0);
  CHECK(base.X.cols() == 2);
  const auto trans = build_design_matrix(t, Group::rst_transitions, DependentKind::doc_surprisal, 0);
  CHECK(trans.X.cols() + static_cast<Eigen::Index>(trans.dropped.size()) == 14);

  const auto rows = t.row_folds();
  for (int held = 0; held < t.folds; ++held) {
    const auto dm = build_design_matrix(t, Group::rst_all, DependentKind::pmi_edu, held);
    for (Eigen::Index c = 0; c < dm.X.cols(); ++c) {
      double sum = 0.0, ss = 0.0;
      int n = 0;
      for (Eigen::Index i = 0; i < dm.X.rows(); ++i) {
        if (rows[static_cast<std::size_t>(i)] == held) continue;
        sum += dm.X(i, c);
        ++n;
      }
      const double mean = sum / n;
      for (Eigen::Index i = 0; i < dm.X.rows(); ++i) {
        if (rows[static_cast<std::size_t>(i)] == held) continue;
        ss += (dm.X(i, c) - mean) * (dm.X(i, c) - mean);
      }
      CHECK(std::abs(mean) <= 1e-9);
      CHECK(std::abs(std::sqrt(ss / n) - 1.0) <= 1e-9);
    }
    const auto& y = t.dependent(DependentKind::pmi_edu).values;
    for (Eigen::Index i = 0; i < dm.y.size(); ++i) CHECK(dm.y[i] == y[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("zero-variance columns are dropped") {
  auto t = table();
  t.predictors.push_back({"rst_relpos_const", "rst_relpos", std::vector<double>(t.rows(), 0.3)});
  const auto dm = build_design_matrix(t, Group::rst_relpos, DependentKind::doc_surprisal, 1);
  REQUIRE(dm.dropped.size() == 1);
  CHECK(dm.dropped[0] == "rst_relpos_const");
  CHECK(dm.X.cols() == 6);
}

TEST_CASE("group names round-trip") {
  for (auto g : kAllGroups) CHECK(parse_group(to_string(g)) == g);
  CHECK_FALSE(parse_group("rst").has_value());
}

TEST_CASE("feature CSV and manifest") {
  const auto& t = table();
  std::ostringstream csv;
  write_feature_csv(csv, t);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header.starts_with("doc_id,token_index,fold_id,doc_surprisal,"));
  std::size_t count = 0;
  for (std::string line; std::getline(lines, line);) ++count;
  CHECK(count == t.rows());

  std::ostringstream manifest;
  write_feature_manifest(manifest, t);
  const auto j = nlohmann::json::parse(manifest.str());
  CHECK(j["rows"] == t.rows());
  CHECK(j["columns"].size() == t.dependents.size() + t.predictors.size());
  CHECK(j["fold_assignment"].size() == t.documents());
  CHECK(j["standardization"].size() == static_cast<std::size_t>(t.folds));
}

TEST_CASE("extraction is deterministic across rebuilds") {
  const auto again = build_feature_table(corpus(), ExtractOptions{}, 5, 17);
  REQUIRE(again.predictors.size() == table().predictors.size());
  for (std::size_t c = 0; c < again.predictors.size(); ++c)
    CHECK(again.predictors[c].values == table().predictors[c].values);
}
