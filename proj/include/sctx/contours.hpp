#ifndef SCTX_CONTOURS_HPP
#define SCTX_CONTOURS_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sctx/tokens.hpp"

namespace sctx {

enum class DependentKind {
  doc_surprisal,
  rolling_avg_3,
  rolling_avg_5,
  rolling_avg_7,
  pmi_unigram,
  pmi_sentence,
  pmi_edu,
};

inline constexpr std::array<DependentKind, 7> kAllDependents = {
    DependentKind::doc_surprisal, DependentKind::rolling_avg_3, DependentKind::rolling_avg_5,
    DependentKind::rolling_avg_7, DependentKind::pmi_unigram,   DependentKind::pmi_sentence,
    DependentKind::pmi_edu};

const char* to_string(DependentKind kind);
std::optional<DependentKind> parse_dependent(std::string_view name);

enum class LocalContext { sentence, edu };

// One dependent variable over a document, one value per token.
struct DependentSeries {
  DependentKind kind = DependentKind::doc_surprisal;
  std::vector<double> values;
};

DependentSeries doc_surprisal(std::span<const TokenRecord> tokens);

// Centered window of n tokens, shrinking at the document edges. With strict
// set, n must be 3, 5 or 7; otherwise any odd n >= 1 is accepted.
DependentSeries rolling_average(const DependentSeries& series, int n, bool strict = true);

// s_global - s_unigram: positive when the document context made the token
// more surprising than its unigram baseline.
DependentSeries pmi_unigram(std::span<const TokenRecord> tokens);

// s_global - s_sentence (or - s_edu).
DependentSeries pmi_local(std::span<const TokenRecord> tokens, LocalContext local);

DependentSeries compute_dependent(std::span<const TokenRecord> tokens, DependentKind kind);

}  // namespace sctx

#endif  // SCTX_CONTOURS_HPP
