#ifndef SCTX_TREEBANK_HPP
#define SCTX_TREEBANK_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sctx/tokens.hpp"

namespace sctx {

enum class TreeKind { rst, prose };

const char* to_string(TreeKind kind);

// A node of a discourse tree. Nodes live in a flat arena owned by
// DiscourseTree; `id` is the node's position in that arena, which is always
// preorder.
struct TreeNode {
  int id = 0;
  std::vector<int> children;
  std::optional<int> leaf_index;  // present iff the node is a leaf
  std::string label;              // relation/nuclearity metadata, never modelled

  bool is_leaf() const { return children.empty(); }
};

class DiscourseTree {
public:
  DiscourseTree() = default;

  // Takes nodes in any order rooted at `root`; renumbers them in preorder and
  // validates leaf contiguity. Throws ValidationError.
  DiscourseTree(std::vector<TreeNode> nodes, int root, TreeKind kind, bool binarized);

  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::span<const TreeNode> nodes() const { return nodes_; }
  TreeKind kind() const { return kind_; }
  bool binarized() const { return binarized_; }
  int leaf_count() const { return leaf_count_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int internal_count() const { return node_count() - leaf_count_; }

  // parent(root) == -1
  int parent(int id) const { return parent_[static_cast<std::size_t>(id)]; }
  // Node id of the leaf carrying `leaf_index`.
  int leaf_node(int leaf_index) const { return leaf_nodes_[static_cast<std::size_t>(leaf_index)]; }
  // Number of edges from the root.
  int depth(int id) const;
  int height() const;
  bool all_binary() const;

  // Bracketed form, `(label child...)` with `(leaf k)` terminals.
  std::string to_sexpr() const;

private:
  std::vector<TreeNode> nodes_;
  std::vector<int> parent_;
  std::vector<int> leaf_nodes_;
  TreeKind kind_ = TreeKind::rst;
  bool binarized_ = false;
  int leaf_count_ = 0;
};

// Parses one bracketed tree. `line` is used for error positions.
DiscourseTree parse_tree(std::string_view text, TreeKind kind, int line = 1);

// Reads a tree file: one s-expression per line, blank lines and `#` comments
// ignored. Throws ParseError with line/column or ValidationError.
std::vector<DiscourseTree> parse_tree_file(const std::string& path, TreeKind kind);
std::vector<DiscourseTree> parse_trees(std::istream& in, TreeKind kind);

void write_trees(std::ostream& out, std::span<const DiscourseTree> trees);

// Right-factored binarization: children c1..cn (n > 2) become
// (c1, aux(c2..cn)) recursively; unary internal nodes collapse into their child.
DiscourseTree right_binarize(const DiscourseTree& tree);

// document -> paragraphs -> sentences, leaf_index = sentence_index.
DiscourseTree build_prose_tree(std::span<const TokenRecord> tokens);

// Half-open token interval [begin, end).
struct TokenSpan {
  int begin = 0;
  int end = 0;
  int length() const { return end - begin; }
  bool contains(int i) const { return i >= begin && i < end; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Token interval covered by each node, indexed by node id. RST leaves align
// with edu_index, prose leaves with sentence_index. Throws ValidationError when
// a leaf has no tokens, a leaf's tokens are not contiguous, or tokens refer to
// units missing from the tree.
std::vector<TokenSpan> leaf_spans(const DiscourseTree& tree, std::span<const TokenRecord> tokens);

// Leaf unit of a token under the tree's alignment.
int unit_index(const TokenRecord& token, TreeKind kind);

}  // namespace sctx

#endif  // SCTX_TREEBANK_HPP
