#include "sctx/predictors.hpp"

#include <algorithm>
#include <stdexcept>

#include "sctx/error.hpp"

namespace sctx {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::top_down: return "td";
    case Strategy::bottom_up: return "bu";
    case Strategy::left_corner: return "lc";
  }
  return "?";
}

const char* to_string(Direction d) { return d == Direction::previous ? "prev" : "next"; }

BaselineColumns baseline_features(std::span<const TokenRecord> tokens) {
  BaselineColumns out;
  out.char_len.reserve(tokens.size());
  out.prev_surprisal.reserve(tokens.size());
  double prev = 0.0;
  for (const auto& t : tokens) {
    out.char_len.push_back(static_cast<double>(t.char_len));
    out.prev_surprisal.push_back(prev);
    prev = t.s_global;
  }
  return out;
}

std::vector<TokenSpan> containing_windows(const DiscourseTree& tree,
                                          std::span<const TokenSpan> spans,
                                          std::span<const TokenRecord> tokens,
                                          int ancestor_steps) {
  if (ancestor_steps < 0) throw std::invalid_argument("ancestor_steps must be >= 0");
  // One lookup per leaf, then broadcast to its tokens.
  std::vector<TokenSpan> per_leaf(static_cast<std::size_t>(tree.leaf_count()));
  for (int leaf = 0; leaf < tree.leaf_count(); ++leaf) {
    int node = tree.leaf_node(leaf);
    for (int k = 0; k < ancestor_steps && tree.parent(node) != -1; ++k) node = tree.parent(node);
    per_leaf[static_cast<std::size_t>(leaf)] = spans[static_cast<std::size_t>(node)];
  }
  std::vector<TokenSpan> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const int u = unit_index(t, tree.kind());
    if (u < 0 || u >= tree.leaf_count())
      throw ValidationError("token " + std::to_string(t.token_index) + " has no leaf in the tree");
    out.push_back(per_leaf[static_cast<std::size_t>(u)]);
  }
  return out;
}

std::vector<double> relative_position(std::span<const TokenRecord> tokens,
                                      std::span<const TokenSpan> windows) {
  if (windows.size() != tokens.size())
    throw ValidationError("window count does not match token count");
  std::vector<double> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& w = windows[i];
    const int pos = static_cast<int>(i);
    if (!w.contains(pos))
      throw ValidationError("token " + std::to_string(pos) + " lies outside its unit");
    out.push_back(static_cast<double>(pos - w.begin) /
                  static_cast<double>(std::max(w.length() - 1, 1)));
  }
  return out;
}

std::vector<double> nearest_boundary(std::span<const TokenRecord> tokens,
                                     std::span<const TokenSpan> windows) {
  auto r = relative_position(tokens, windows);
  for (double& v : r) v = std::min(v, 1.0 - v);
  return r;
}

std::vector<std::vector<double>> hierarchical_position(std::span<const TokenRecord> tokens,
                                                       const DiscourseTree& tree,
                                                       std::span<const TokenSpan> spans,
                                                       int max_depth) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  const auto depth_count = static_cast<std::size_t>(max_depth);

  // Sibling rank of every node, normalised.
  std::vector<double> sibling_pos(static_cast<std::size_t>(tree.node_count()), 0.0);
  for (const auto& node : tree.nodes()) {
    const auto n = node.children.size();
    for (std::size_t k = 0; k < n; ++k)
      sibling_pos[static_cast<std::size_t>(node.children[k])] =
          static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(n - 1, 1));
  }

  std::vector<std::vector<double>> per_leaf(static_cast<std::size_t>(tree.leaf_count()));
  for (int leaf = 0; leaf < tree.leaf_count(); ++leaf) {
    std::vector<int> path;  // leaf up to (excluding) root
    for (int node = tree.leaf_node(leaf); tree.parent(node) != -1; node = tree.parent(node))
      path.push_back(node);
    std::reverse(path.begin(), path.end());
    auto& levels = per_leaf[static_cast<std::size_t>(leaf)];
    levels.assign(depth_count, kMissingLevel);
    for (std::size_t d = 0; d < std::min(depth_count, path.size()); ++d)
      levels[d] = sibling_pos[static_cast<std::size_t>(path[d])];
  }

  const auto windows = containing_windows(tree, spans, tokens, 0);
  const auto within_leaf = relative_position(tokens, windows);

  std::vector<std::vector<double>> columns(depth_count + 1);
  for (auto& c : columns) c.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& levels =
        per_leaf[static_cast<std::size_t>(unit_index(tokens[i], tree.kind()))];
    for (std::size_t d = 0; d < depth_count; ++d) columns[d].push_back(levels[d]);
    columns[depth_count].push_back(within_leaf[i]);
  }
  return columns;
}

TraversalCounts traversal_counts(const DiscourseTree& tree, Strategy strategy) {
  if (!tree.all_binary())
    throw ValidationError("traversal counts need a binarized tree");

  TraversalCounts out{strategy, Direction::previous,
                      std::vector<LeafCounts>(static_cast<std::size_t>(tree.leaf_count()))};
  int pushes = 1;  // the root rule
  int pops = 0;

  struct Frame {
    int node;
    int stage;  // 0 = entering, 1 = left child done, 2 = both children done
  };
  std::vector<Frame> stack{{tree.root().id, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& node = tree.node(f.node);
    if (node.is_leaf()) {
      ++pops;
      out.leaves[static_cast<std::size_t>(*node.leaf_index)] = {pushes, pops};
      stack.pop_back();
      continue;
    }
    switch (f.stage) {
      case 0:
        if (strategy == Strategy::top_down) ++pops;
        pushes += 2;
        f.stage = 1;
        stack.push_back({node.children[0], 0});
        break;
      case 1:
        if (strategy == Strategy::left_corner) ++pops;
        f.stage = 2;
        stack.push_back({node.children[1], 0});
        break;
      default:
        if (strategy == Strategy::bottom_up) ++pops;
        stack.pop_back();
        break;
    }
  }
  return out;
}

TraversalCounts next_counts(const TraversalCounts& previous, const DiscourseTree& tree) {
  TraversalCounts out = previous;
  out.direction = Direction::next;
  const std::size_t n = previous.leaves.size();
  for (std::size_t i = 0; i + 1 < n; ++i) out.leaves[i] = previous.leaves[i + 1];
  // Every node has been pushed and popped once the traversal completes.
  if (n > 0) out.leaves[n - 1] = {tree.node_count(), tree.node_count()};
  return out;
}

std::vector<NamedColumn> transition_features(const DiscourseTree& binarized,
                                             std::span<const TokenRecord> tokens,
                                             const std::string& prefix) {
  std::vector<int> leaf_of_token;
  leaf_of_token.reserve(tokens.size());
  for (const auto& t : tokens) {
    const int u = unit_index(t, binarized.kind());
    if (u < 0 || u >= binarized.leaf_count())
      throw ValidationError("token " + std::to_string(t.token_index) +
                            " does not align with any tree leaf");
    leaf_of_token.push_back(u);
  }

  std::array<TraversalCounts, 3> prev_counts;
  std::array<TraversalCounts, 3> following;
  for (std::size_t k = 0; k < kAllStrategies.size(); ++k) {
    prev_counts[k] = traversal_counts(binarized, kAllStrategies[k]);
    following[k] = next_counts(prev_counts[k], binarized);
  }

  std::vector<NamedColumn> columns;
  columns.reserve(12);
  for (Direction dir : {Direction::previous, Direction::next}) {
    for (const bool push : {true, false}) {
      for (std::size_t k = 0; k < kAllStrategies.size(); ++k) {
        const auto& counts = dir == Direction::previous ? prev_counts[k] : following[k];
        NamedColumn col{prefix + "_" + to_string(dir) + (push ? "_push_" : "_pop_") +
                            to_string(kAllStrategies[k]),
                        {}};
        col.values.reserve(tokens.size());
        for (int leaf : leaf_of_token) {
          const auto& c = counts.leaves[static_cast<std::size_t>(leaf)];
          col.values.push_back(static_cast<double>(push ? c.pushes : c.pops));
        }
        columns.push_back(std::move(col));
      }
    }
  }
  return columns;
}

}  // namespace sctx
