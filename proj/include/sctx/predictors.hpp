#ifndef SCTX_PREDICTORS_HPP
#define SCTX_PREDICTORS_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "sctx/tokens.hpp"
#include "sctx/treebank.hpp"

namespace sctx {

struct BaselineColumns {
  std::vector<double> char_len;
  std::vector<double> prev_surprisal;  // s_global of the previous token, 0 at document start
};

BaselineColumns baseline_features(std::span<const TokenRecord> tokens);

// For every token, the token window of the unit `ancestor_steps` above its
// leaf (0 = the leaf itself); steps past the root stop at the root.
std::vector<TokenSpan> containing_windows(const DiscourseTree& tree,
                                          std::span<const TokenSpan> spans,
                                          std::span<const TokenRecord> tokens, int ancestor_steps);

// (i - begin) / max(L - 1, 1) for the token at position i in its window.
std::vector<double> relative_position(std::span<const TokenRecord> tokens,
                                      std::span<const TokenSpan> windows);

// min(r, 1 - r) over relative_position.
std::vector<double> nearest_boundary(std::span<const TokenRecord> tokens,
                                     std::span<const TokenSpan> windows);

inline constexpr double kMissingLevel = -1.0;

// Position of each depth-d ancestor among its siblings, d = 1..max_depth,
// padded with kMissingLevel below the leaf, followed by the token's position
// within its leaf unit. Returns max_depth + 1 columns. Expects the tree before
// binarization.
std::vector<std::vector<double>> hierarchical_position(std::span<const TokenRecord> tokens,
                                                       const DiscourseTree& tree,
                                                       std::span<const TokenSpan> spans,
                                                       int max_depth);

enum class Strategy { top_down, bottom_up, left_corner };
enum class Direction { previous, next };

inline constexpr std::array<Strategy, 3> kAllStrategies = {Strategy::top_down, Strategy::bottom_up,
                                                          Strategy::left_corner};

const char* to_string(Strategy s);
const char* to_string(Direction d);

struct LeafCounts {
  int pushes = 0;
  int pops = 0;
  friend bool operator==(const LeafCounts&, const LeafCounts&) = default;
};

struct TraversalCounts {
  Strategy strategy = Strategy::top_down;
  Direction direction = Direction::previous;
  std::vector<LeafCounts> leaves;  // indexed by leaf_index
};

// Depth-first traversal of a binarized tree. The push counter starts at 1 for
// the root and grows by 2 whenever an internal node is expanded; the pop
// counter grows when a node is evaluated, in preorder (top-down), postorder
// (bottom-up) or inorder (left-corner). Each leaf records both counters right
// after its own pop. Throws ValidationError on non-binary trees.
TraversalCounts traversal_counts(const DiscourseTree& tree, Strategy strategy);

// The same counts shifted one leaf to the left; the last leaf receives the
// final totals.
TraversalCounts next_counts(const TraversalCounts& previous, const DiscourseTree& tree);

struct NamedColumn {
  std::string name;
  std::vector<double> values;
};

// {previous, next} x {push, pop} x {top_down, bottom_up, left_corner} columns
// over a binarized tree, each token inheriting the values of its leaf.
// Column names are `<prefix>_<direction>_<push|pop>_<strategy>`.
std::vector<NamedColumn> transition_features(const DiscourseTree& binarized,
                                             std::span<const TokenRecord> tokens,
                                             const std::string& prefix);

}  // namespace sctx

#endif  // SCTX_PREDICTORS_HPP
