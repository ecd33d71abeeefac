#include <doctest.h>

#include <random>

#include "sctx/error.hpp"
#include "sctx/predictors.hpp"
#include "sctx/treebank.hpp"
#include "support.hpp"

using namespace sctx;

namespace {

const DiscourseTree& figure_tree() {
  static const DiscourseTree t =
      parse_tree("(S (X (leaf 0) (leaf 1)) (Y (leaf 2) (leaf 3)))", TreeKind::rst);
  return t;
}

std::vector<LeafCounts> counts(std::initializer_list<std::pair<int, int>> xs) {
  std::vector<LeafCounts> out;
  for (auto [push, pop] : xs) out.push_back({push, pop});
  return out;
}

}  // namespace

TEST_CASE("baseline features") {
  std::vector<TokenRecord> t(3);
  t[0].text = "because";
  t[0].char_len = 7;
  t[0].s_global = 2;
  t[1].s_global = 5;
  t[2].s_global = 1;
  const auto b = baseline_features(t);
  CHECK(b.char_len[0] == 7.0);
  CHECK(b.prev_surprisal == std::vector<double>{0, 2, 5});
}

TEST_CASE("traversal counts on the figure tree") {
  const auto& t = figure_tree();
  CHECK(traversal_counts(t, Strategy::top_down).leaves == counts({{5, 3}, {5, 4}, {7, 6}, {7, 7}}));
  CHECK(traversal_counts(t, Strategy::bottom_up).leaves == counts({{5, 1}, {5, 2}, {7, 4}, {7, 5}}));
  CHECK(traversal_counts(t, Strategy::left_corner).leaves ==
        counts({{5, 1}, {5, 3}, {7, 5}, {7, 7}}));

  const auto next = next_counts(traversal_counts(t, Strategy::bottom_up), t);
  CHECK(next.direction == Direction::next);
  std::vector<int> pops;
  for (auto c : next.leaves) pops.push_back(c.pops);
  CHECK(pops == std::vector<int>{2, 4, 5, 7});
}

TEST_CASE("traversal counts: single leaf and non-binary input") {
  const auto one = parse_tree("(leaf 0)", TreeKind::rst);
  for (auto s : kAllStrategies) {
    const auto prev = traversal_counts(one, s);
    CHECK(prev.leaves == counts({{1, 1}}));
    CHECK(next_counts(prev, one).leaves == counts({{1, 1}}));
  }
  CHECK_THROWS_AS(traversal_counts(parse_tree("(R (leaf 0) (leaf 1) (leaf 2))", TreeKind::rst),
                                   Strategy::top_down),
                  ValidationError);
}

TEST_CASE("traversal counts against rank oracle on random binary trees") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int leaves = std::uniform_int_distribution<int>(1, 64)(rng);
    const auto t = testing::to_discourse(testing::random_tree(rng, leaves, true), true);
    const auto r = testing::rank_oracle(t);
    const auto td = traversal_counts(t, Strategy::top_down);
    const auto bu = traversal_counts(t, Strategy::bottom_up);
    const auto lc = traversal_counts(t, Strategy::left_corner);
    for (std::size_t k = 0; k < static_cast<std::size_t>(leaves); ++k) {
      const int push = 1 + 2 * r.internal_before[k];
      CHECK(td.leaves[k] == LeafCounts{push, r.pre[k]});
      CHECK(bu.leaves[k] == LeafCounts{push, r.post[k]});
      CHECK(lc.leaves[k] == LeafCounts{push, r.in[k]});
    }
    for (auto s : kAllStrategies) {
      const auto n = next_counts(traversal_counts(t, s), t);
      CHECK(n.leaves.back().pops == t.node_count());
      CHECK(n.leaves.back().pushes == t.node_count());
    }
  }
}

TEST_CASE("relative position and nearest boundary") {
  std::mt19937_64 rng(1);
  const auto doc = testing::make_document("d", {{{{1, 5}}}}, rng);
  const auto tree = parse_tree("(R (leaf 0) (leaf 1))", TreeKind::rst);
  const auto spans = leaf_spans(tree, doc.tokens);
  const auto edu = containing_windows(tree, spans, doc.tokens, 0);
  const auto r = relative_position(doc.tokens, edu);
  CHECK(r == std::vector<double>{0.0, 0.0, 0.25, 0.5, 0.75, 1.0});
  const auto nb = nearest_boundary(doc.tokens, edu);
  CHECK(nb == std::vector<double>{0.0, 0.0, 0.25, 0.5, 0.25, 0.0});

  // Ancestor windows clamp at the root.
  const auto up = containing_windows(tree, spans, doc.tokens, 5);
  for (const auto& w : up) CHECK(w == TokenSpan{0, 6});
}

TEST_CASE("relative position matches brute force from spans on random documents") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int leaves = std::uniform_int_distribution<int>(1, 16)(rng);
    std::vector<int> sizes;
    for (int i = 0; i < leaves; ++i) sizes.push_back(std::uniform_int_distribution<int>(1, 6)(rng));
    const auto doc = testing::make_document("d", {{{sizes}}}, rng);
    const auto tree = testing::to_discourse(testing::random_tree(rng, leaves, false), false);
    const auto spans = leaf_spans(tree, doc.tokens);
    for (int steps = 0; steps < 4; ++steps) {
      const auto windows = containing_windows(tree, spans, doc.tokens, steps);
      const auto r = relative_position(doc.tokens, windows);
      const auto nb = nearest_boundary(doc.tokens, windows);
      for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        int node = tree.leaf_node(doc.tokens[i].edu_index);
        for (int s = 0; s < steps && tree.parent(node) != -1; ++s) node = tree.parent(node);
        const auto w = spans[static_cast<std::size_t>(node)];
        const double want =
            static_cast<double>(static_cast<int>(i) - w.begin) / std::max(w.length() - 1, 1);
        CHECK(r[i] == want);
        CHECK(nb[i] == std::min(want, 1.0 - want));
      }
    }
  }
}

TEST_CASE("relative position is unchanged by binarization at leaf level") {
  std::mt19937_64 rng(2);
  const auto doc = testing::make_document("d", {{{{2, 3, 1, 4}}}}, rng);
  const auto tree = parse_tree("(R (leaf 0) (leaf 1) (leaf 2) (leaf 3))", TreeKind::rst);
  const auto bin = right_binarize(tree);
  const auto a = relative_position(doc.tokens, containing_windows(tree, leaf_spans(tree, doc.tokens),
                                                                  doc.tokens, 0));
  const auto b = relative_position(doc.tokens, containing_windows(bin, leaf_spans(bin, doc.tokens),
                                                                  doc.tokens, 0));
  CHECK(a == b);
}

TEST_CASE("hierarchical position") {
  std::mt19937_64 rng(3);
  SUBCASE("figure tree, leaf C") {
    const auto doc = testing::make_document("d", {{{{1, 1, 1, 1}}}}, rng);
    const auto& t = figure_tree();
    const auto cols = hierarchical_position(doc.tokens, t, leaf_spans(t, doc.tokens), 4);
    REQUIRE(cols.size() == 5);
    CHECK(cols[0][2] == 1.0);
    CHECK(cols[1][2] == 0.0);
    CHECK(cols[2][2] == kMissingLevel);
    CHECK(cols[3][2] == kMissingLevel);
  }
  SUBCASE("prose: second of three paragraphs") {
    const auto doc = testing::make_document("d", {{{{2}}, {{1}, {3}}, {{1}}}}, rng);
    const auto t = build_prose_tree(doc.tokens);
    const auto cols = hierarchical_position(doc.tokens, t, leaf_spans(t, doc.tokens), 2);
    CHECK(cols[0][2] == 0.5);    // paragraph 1 of 3
    CHECK(cols[1][0] == 0.0);    // only sentence
    CHECK(cols[1][2] == 0.0);    // sentence 0 of 2
    CHECK(cols[1][3] == 1.0);    // sentence 1 of 2
    CHECK(cols[2][4] == 0.5);    // middle of a 3-token sentence
  }
  SUBCASE("errors") {
    const auto doc = testing::make_document("d", {{{{1}}}}, rng);
    const auto t = parse_tree("(leaf 0)", TreeKind::rst);
    CHECK_THROWS(hierarchical_position(doc.tokens, t, leaf_spans(t, doc.tokens), 0));
  }
}

TEST_CASE("transition features") {
  std::mt19937_64 rng(4);
  const auto doc = testing::make_document("d", {{{{2, 1, 3, 1}}}}, rng);
  const auto cols = transition_features(figure_tree(), doc.tokens, "rst_trans");
  REQUIRE(cols.size() == 12);
  const auto find = [&](const std::string& name) -> const std::vector<double>& {
    for (const auto& c : cols)
      if (c.name == name) return c.values;
    FAIL("missing column " << name);
    static std::vector<double> none;
    return none;
  };
  CHECK(find("rst_trans_prev_pop_bu") == std::vector<double>{1, 1, 2, 4, 4, 4, 5});
  CHECK(find("rst_trans_next_pop_bu") == std::vector<double>{2, 2, 4, 5, 5, 5, 7});
  CHECK(find("rst_trans_prev_push_td") == std::vector<double>{5, 5, 5, 7, 7, 7, 7});
  CHECK(find("rst_trans_next_push_lc") == std::vector<double>{5, 5, 7, 7, 7, 7, 7});
  CHECK(find("rst_trans_prev_pop_lc") == std::vector<double>{1, 1, 3, 5, 5, 5, 7});

  const auto flat = parse_tree("(R (leaf 0) (leaf 1) (leaf 2) (leaf 3))", TreeKind::rst);
  CHECK_THROWS_AS(transition_features(flat, doc.tokens, "x"), ValidationError);
}

TEST_CASE("re-extraction is bit-identical") {
  std::mt19937_64 rng(5);
  const auto doc = testing::make_document("d", {{{{2, 3}, {1}}, {{4, 2}}}}, rng);
  const auto tree = right_binarize(parse_tree("(R (A (leaf 0) (leaf 1) (leaf 2)) (B (leaf 3) (leaf 4)))",
                                              TreeKind::rst));
  const auto a = transition_features(tree, doc.tokens, "t");
  const auto b = transition_features(tree, doc.tokens, "t");
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
}
