#ifndef SCTX_TESTS_SUPPORT_HPP
#define SCTX_TESTS_SUPPORT_HPP

// Independent oracles and fixtures shared by the test binaries. Nothing here
// calls into the library code under test except to build trees and tokens.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sctx/corpus.hpp"
#include "sctx/tokens.hpp"
#include "sctx/treebank.hpp"

namespace testing {

// Plain recursive tree used by the oracles; independent of DiscourseTree.
struct RefTree {
  struct Node {
    std::vector<int> children;
    int leaf = -1;
  };
  std::vector<Node> nodes;  // nodes[0] is the root
};

// Random tree with `leaves` leaves. With `binary` every internal node has two
// children, otherwise 1..max_branching children (unary chains allowed).
inline RefTree random_tree(std::mt19937_64& rng, int leaves, bool binary, int max_branching = 5) {
  RefTree t;
  int next_leaf = 0;
  // build(range) returns the node id covering `count` leaves.
  auto build = [&](auto&& self, int count) -> int {
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (count == 1 && (binary || std::uniform_int_distribution<int>(0, 3)(rng) != 0)) {
      t.nodes[static_cast<std::size_t>(id)].leaf = next_leaf++;
      return id;
    }
    int parts = binary ? 2 : std::uniform_int_distribution<int>(1, std::min(max_branching, count + 1))(rng);
    if (count == 1) parts = 1;
    if (parts > count) parts = count;
    // Split `count` into `parts` positive sizes.
    std::vector<int> cuts;
    for (int i = 1; i < count; ++i) cuts.push_back(i);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(static_cast<std::size_t>(parts - 1));
    std::sort(cuts.begin(), cuts.end());
    int prev = 0;
    std::vector<int> sizes;
    for (int c : cuts) {
      sizes.push_back(c - prev);
      prev = c;
    }
    sizes.push_back(count - prev);
    for (int s : sizes) {
      const int child = self(self, s);
      t.nodes[static_cast<std::size_t>(id)].children.push_back(child);
    }
    return id;
  };
  build(build, leaves);
  return t;
}

inline sctx::DiscourseTree to_discourse(const RefTree& t, bool binarized,
                                        sctx::TreeKind kind = sctx::TreeKind::rst) {
  std::vector<sctx::TreeNode> nodes(t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    nodes[i].id = static_cast<int>(i);
    nodes[i].children = t.nodes[i].children;
    if (t.nodes[i].leaf >= 0) nodes[i].leaf_index = t.nodes[i].leaf;
    else nodes[i].label = "N";
  }
  return sctx::DiscourseTree(std::move(nodes), 0, kind, binarized);
}

// Leaf order by a plain recursive walk.
inline void leaf_sequence(const sctx::DiscourseTree& t, int id, std::vector<int>& out) {
  const auto& n = t.node(id);
  if (n.is_leaf()) {
    out.push_back(*n.leaf_index);
    return;
  }
  for (int c : n.children) leaf_sequence(t, c, out);
}

// Rank oracles: 1-based positions of each leaf in the preorder / postorder /
// inorder node sequence, plus the number of internal nodes preceding it in preorder.
struct Ranks {
  std::vector<int> pre, post, in, internal_before;
};

inline Ranks rank_oracle(const sctx::DiscourseTree& t) {
  Ranks r;
  const auto leaves = static_cast<std::size_t>(t.leaf_count());
  r.pre.assign(leaves, 0);
  r.post.assign(leaves, 0);
  r.in.assign(leaves, 0);
  r.internal_before.assign(leaves, 0);
  int pre = 0, post = 0, in = 0, internal = 0;
  auto walk = [&](auto&& self, int id) -> void {
    const auto& n = t.node(id);
    ++pre;
    if (n.is_leaf()) {
      const auto k = static_cast<std::size_t>(*n.leaf_index);
      r.pre[k] = pre;
      r.internal_before[k] = internal;
      r.in[k] = ++in;
      r.post[k] = ++post;
      return;
    }
    ++internal;
    self(self, n.children[0]);
    ++in;
    self(self, n.children[1]);
    ++post;
  };
  walk(walk, 0);
  return r;
}

// One token per character-run "w<i>" with the given unit structure.
struct UnitSizes {
  std::vector<std::vector<std::vector<int>>> paragraphs;  // paragraph -> sentence -> EDU token counts
};

inline sctx::Document make_document(const std::string& id, const UnitSizes& sizes,
                                    std::mt19937_64& rng) {
  sctx::Document doc;
  doc.doc_id = id;
  std::normal_distribution<double> z(0.0, 1.0);
  int edu = 0, sentence = 0;
  for (std::size_t p = 0; p < sizes.paragraphs.size(); ++p) {
    for (const auto& sent : sizes.paragraphs[p]) {
      for (int count : sent) {
        for (int k = 0; k < count; ++k) {
          sctx::TokenRecord t;
          t.doc_id = id;
          t.token_index = static_cast<int>(doc.tokens.size());
          t.text = "w" + std::to_string(t.token_index);
          t.char_len = static_cast<int>(t.text.size());
          t.paragraph_index = static_cast<int>(p);
          t.sentence_index = sentence;
          t.edu_index = edu;
          t.s_global = 4.0 + std::abs(z(rng));
          t.s_sentence = t.s_global + (sentence == 0 ? 0.0 : std::abs(z(rng)));
          t.s_edu = t.s_sentence + std::abs(z(rng));
          t.s_unigram = 6.0 + std::abs(z(rng));
          doc.tokens.push_back(t);
        }
        ++edu;
      }
      ++sentence;
    }
  }
  return doc;
}

// Flat RST tree over `edus` leaves grouped in pairs: (R (R (leaf 0) (leaf 1)) ...).
inline std::string paired_rst(int edus) {
  std::string s = "(Root";
  for (int i = 0; i < edus; i += 2) {
    if (i + 1 < edus)
      s += " (Joint (leaf " + std::to_string(i) + ") (leaf " + std::to_string(i + 1) + "))";
    else
      s += " (leaf " + std::to_string(i) + ")";
  }
  return s + ")";
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sctx_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace testing

#endif  // SCTX_TESTS_SUPPORT_HPP
