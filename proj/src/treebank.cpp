#include "sctx/treebank.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sctx/error.hpp"

namespace sctx {

const char* to_string(TreeKind kind) { return kind == TreeKind::rst ? "rst" : "prose"; }

DiscourseTree::DiscourseTree(std::vector<TreeNode> nodes, int root, TreeKind kind, bool binarized)
    : kind_(kind), binarized_(binarized) {
  if (nodes.empty()) throw ValidationError("tree has no nodes");
  const int n = static_cast<int>(nodes.size());
  if (root < 0 || root >= n) throw ValidationError("tree root is out of range");

  // Preorder renumbering with an explicit stack.
  std::vector<int> new_id(nodes.size(), -1);
  std::vector<int> order;
  order.reserve(nodes.size());
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (id < 0 || id >= n) throw ValidationError("child reference out of range");
    if (new_id[static_cast<std::size_t>(id)] != -1)
      throw ValidationError("node " + std::to_string(id) + " is reachable twice");
    new_id[static_cast<std::size_t>(id)] = static_cast<int>(order.size());
    order.push_back(id);
    const auto& children = nodes[static_cast<std::size_t>(id)].children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
  }

  nodes_.reserve(order.size());
  parent_.assign(order.size(), -1);
  for (int old : order) {
    TreeNode node = std::move(nodes[static_cast<std::size_t>(old)]);
    node.id = static_cast<int>(nodes_.size());
    for (int& c : node.children) {
      c = new_id[static_cast<std::size_t>(c)];
      parent_[static_cast<std::size_t>(c)] = node.id;
    }
    nodes_.push_back(std::move(node));
  }

  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      if (!node.leaf_index)
        throw ValidationError("leaf node " + std::to_string(node.id) + " has no leaf index");
      const int expected = static_cast<int>(leaf_nodes_.size());
      const int got = *node.leaf_index;
      if (got != expected) {
        const bool duplicate = got >= 0 && got < expected;
        throw ValidationError(std::string(duplicate ? "duplicate" : "gapped or out-of-order") +
                              " leaf index " + std::to_string(got) + " (expected " +
                              std::to_string(expected) + ")");
      }
      leaf_nodes_.push_back(node.id);
    } else if (node.leaf_index) {
      throw ValidationError("internal node " + std::to_string(node.id) + " carries a leaf index");
    }
  }
  leaf_count_ = static_cast<int>(leaf_nodes_.size());

  if (binarized_ && !all_binary()) throw ValidationError("tree marked binarized is not binary");
  if (kind_ == TreeKind::prose && !binarized_ && height() > 2)
    throw ValidationError("prose tree deeper than document/paragraph/sentence");
}

int DiscourseTree::depth(int id) const {
  int d = 0;
  for (int p = parent(id); p != -1; p = parent(p)) ++d;
  return d;
}

int DiscourseTree::height() const {
  std::vector<int> depth(nodes_.size(), 0);
  int best = 0;
  for (const auto& node : nodes_) {
    for (int c : node.children) {
      depth[static_cast<std::size_t>(c)] = depth[static_cast<std::size_t>(node.id)] + 1;
      best = std::max(best, depth[static_cast<std::size_t>(c)]);
    }
  }
  return best;
}

bool DiscourseTree::all_binary() const {
  return std::all_of(nodes_.begin(), nodes_.end(),
                     [](const TreeNode& n) { return n.is_leaf() || n.children.size() == 2; });
}

namespace {

void append_sexpr(const DiscourseTree& tree, int id, std::string& out) {
  const auto& node = tree.node(id);
  if (node.is_leaf()) {
    out += "(leaf ";
    out += std::to_string(*node.leaf_index);
    out += ')';
    return;
  }
  out += '(';
  out += node.label.empty() ? "node" : node.label;
  for (int c : node.children) {
    out += ' ';
    append_sexpr(tree, c, out);
  }
  out += ')';
}

class SexprParser {
public:
  SexprParser(std::string_view text, int line) : text_(text), line_(line) {}

  // Returns the arena and root id.
  std::pair<std::vector<TreeNode>, int> parse() {
    skip_space();
    if (at_end()) fail("empty tree");
    const int root = parse_node();
    skip_space();
    if (!at_end()) fail("unexpected text after tree");
    return {std::move(nodes_), root};
  }

private:
  int parse_node() {
    skip_space();
    if (at_end()) fail("unexpected end of input, expected '('");
    if (peek() != '(') fail(std::string("expected '(' but found '") + peek() + "'");
    const std::size_t open = pos_;
    ++pos_;
    skip_space();
    const std::size_t label_pos = pos_;
    const std::string_view label = atom();
    if (label.empty()) fail("expected a node label", label_pos);

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{id, {}, std::nullopt, std::string(label)});

    if (label == "leaf") {
      skip_space();
      const std::size_t index_pos = pos_;
      const std::string_view digits = atom();
      int value = 0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || value < 0)
        fail("leaf expects a non-negative integer index", index_pos);
      nodes_[static_cast<std::size_t>(id)].leaf_index = value;
      skip_space();
      if (at_end() || peek() != ')') fail("expected ')' to close leaf");
      ++pos_;
      return id;
    }

    std::vector<int> children;
    for (;;) {
      skip_space();
      if (at_end()) fail("unbalanced parentheses: node opened here is never closed", open);
      if (peek() == ')') {
        ++pos_;
        break;
      }
      children.push_back(parse_node());
    }
    if (children.empty()) fail("internal node '" + std::string(label) + "' has no children", open);
    nodes_[static_cast<std::size_t>(id)].children = std::move(children);
    return id;
  }

  std::string_view atom() {
    const std::size_t start = pos_;
    while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '(' &&
           peek() != ')')
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ParseError(what, line_, static_cast<int>(at) + 1);
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::string DiscourseTree::to_sexpr() const {
  std::string out;
  if (!nodes_.empty()) append_sexpr(*this, 0, out);
  return out;
}

DiscourseTree parse_tree(std::string_view text, TreeKind kind, int line) {
  auto [nodes, root] = SexprParser(text, line).parse();
  return DiscourseTree(std::move(nodes), root, kind, false);
}

std::vector<DiscourseTree> parse_trees(std::istream& in, TreeKind kind) {
  std::vector<DiscourseTree> trees;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (line.back() == '\r') line.pop_back();
    try {
      trees.push_back(parse_tree(line, kind, line_no));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trees;
}

std::vector<DiscourseTree> parse_tree_file(const std::string& path, TreeKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file '" + path + "'");
  return parse_trees(in, kind);
}

void write_trees(std::ostream& out, std::span<const DiscourseTree> trees) {
  for (const auto& t : trees) out << t.to_sexpr() << '\n';
}

namespace {

class Binarizer {
public:
  explicit Binarizer(const DiscourseTree& src) : src_(src) {}

  DiscourseTree run() {
    const int root = convert(0);
    return DiscourseTree(std::move(out_), root, src_.kind(), true);
  }

private:
  int convert(int id) {
    const auto& node = src_.node(id);
    if (node.is_leaf()) return emit(node.label, {}, node.leaf_index);
    if (node.children.size() == 1) return convert(node.children.front());
    return factor(node.label, node.children, 0);
  }

  // Pairs children[first] with the right-factored remainder.
  int factor(const std::string& label, const std::vector<int>& children, std::size_t first) {
    const int head = convert(children[first]);
    const int rest = children.size() - first == 2 ? convert(children[first + 1])
                                                  : factor(aux_label(label), children, first + 1);
    return emit(label, {head, rest}, std::nullopt);
  }

  static std::string aux_label(const std::string& label) {
    return label.ends_with('*') ? label : label + '*';
  }

  int emit(const std::string& label, std::vector<int> children, std::optional<int> leaf) {
    const int id = static_cast<int>(out_.size());
    out_.push_back(TreeNode{id, std::move(children), leaf, label});
    return id;
  }

  const DiscourseTree& src_;
  std::vector<TreeNode> out_;
};

}  // namespace

DiscourseTree right_binarize(const DiscourseTree& tree) { return Binarizer(tree).run(); }

DiscourseTree build_prose_tree(std::span<const TokenRecord> tokens) {
  if (tokens.empty()) throw ValidationError("cannot build a prose tree from zero tokens");

  std::vector<TreeNode> nodes;
  nodes.push_back(TreeNode{0, {}, std::nullopt, "DOC"});
  int paragraph_node = -1;
  int last_paragraph = -1;
  int last_sentence = -1;
  for (const auto& t : tokens) {
    if (t.paragraph_index < last_paragraph || t.sentence_index < last_sentence)
      throw ValidationError("document '" + t.doc_id + "': containment ids decrease at token " +
                            std::to_string(t.token_index));
    if (t.sentence_index == last_sentence) {
      if (t.paragraph_index != last_paragraph)
        throw ValidationError("document '" + t.doc_id + "': sentence " +
                              std::to_string(t.sentence_index) + " spans paragraphs " +
                              std::to_string(last_paragraph) + " and " +
                              std::to_string(t.paragraph_index));
      continue;
    }
    if (t.paragraph_index != last_paragraph) {
      if (t.paragraph_index != last_paragraph + 1)
        throw ValidationError("document '" + t.doc_id + "': paragraph index jumps to " +
                              std::to_string(t.paragraph_index));
      paragraph_node = static_cast<int>(nodes.size());
      nodes.push_back(TreeNode{paragraph_node, {}, std::nullopt, "P"});
      nodes.front().children.push_back(paragraph_node);
      last_paragraph = t.paragraph_index;
    }
    if (t.sentence_index != last_sentence + 1)
      throw ValidationError("document '" + t.doc_id + "': sentence index jumps to " +
                            std::to_string(t.sentence_index));
    const int leaf = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{leaf, {}, t.sentence_index, "leaf"});
    nodes[static_cast<std::size_t>(paragraph_node)].children.push_back(leaf);
    last_sentence = t.sentence_index;
  }
  return DiscourseTree(std::move(nodes), 0, TreeKind::prose, false);
}

int unit_index(const TokenRecord& token, TreeKind kind) {
  return kind == TreeKind::rst ? token.edu_index : token.sentence_index;
}

std::vector<TokenSpan> leaf_spans(const DiscourseTree& tree, std::span<const TokenRecord> tokens) {
  const int leaves = tree.leaf_count();
  std::vector<TokenSpan> unit(static_cast<std::size_t>(leaves), TokenSpan{-1, -1});
  std::vector<int> count(static_cast<std::size_t>(leaves), 0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int u = unit_index(tokens[i], tree.kind());
    if (u < 0 || u >= leaves)
      throw ValidationError("token " + std::to_string(i) + " belongs to " +
                            (tree.kind() == TreeKind::rst ? "EDU " : "sentence ") +
                            std::to_string(u) + ", which the tree does not cover (" +
                            std::to_string(leaves) + " leaves)");
    auto& span = unit[static_cast<std::size_t>(u)];
    if (span.begin < 0) span.begin = static_cast<int>(i);
    span.end = static_cast<int>(i) + 1;
    ++count[static_cast<std::size_t>(u)];
  }
  for (int u = 0; u < leaves; ++u) {
    const auto& span = unit[static_cast<std::size_t>(u)];
    if (span.begin < 0)
      throw ValidationError("leaf " + std::to_string(u) + " has no matching tokens");
    if (span.length() != count[static_cast<std::size_t>(u)])
      throw ValidationError("tokens of leaf " + std::to_string(u) + " are not contiguous");
  }

  std::vector<TokenSpan> spans(static_cast<std::size_t>(tree.node_count()));
  // Children have larger preorder ids than their parent.
  for (int id = tree.node_count() - 1; id >= 0; --id) {
    const auto& node = tree.node(id);
    if (node.is_leaf()) {
      spans[static_cast<std::size_t>(id)] = unit[static_cast<std::size_t>(*node.leaf_index)];
    } else {
      TokenSpan s{spans[static_cast<std::size_t>(node.children.front())].begin,
                  spans[static_cast<std::size_t>(node.children.back())].end};
      spans[static_cast<std::size_t>(id)] = s;
    }
  }
  return spans;
}

}  // namespace sctx
