#include "sctx/contours.hpp"

#include <stdexcept>

#include "sctx/error.hpp"
#include "sctx/kernels.hpp"

namespace sctx {

namespace {

constexpr std::array<const char*, 7> kNames = {"doc_surprisal", "rolling_avg_3", "rolling_avg_5",
                                               "rolling_avg_7", "pmi_unigram",   "pmi_sentence",
                                               "pmi_edu"};

void require_tokens(std::span<const TokenRecord> tokens) {
  if (tokens.empty()) throw ValidationError("dependent series of an empty document");
}

template <typename F>
DependentSeries per_token(std::span<const TokenRecord> tokens, DependentKind kind, F f) {
  require_tokens(tokens);
  DependentSeries out{kind, {}};
  out.values.reserve(tokens.size());
  for (const auto& t : tokens) out.values.push_back(f(t));
  return out;
}

}  // namespace

const char* to_string(DependentKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

std::optional<DependentKind> parse_dependent(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (name == kNames[i]) return static_cast<DependentKind>(i);
  }
  return std::nullopt;
}

DependentSeries doc_surprisal(std::span<const TokenRecord> tokens) {
  return per_token(tokens, DependentKind::doc_surprisal,
                   [](const TokenRecord& t) { return t.s_global; });
}

DependentSeries rolling_average(const DependentSeries& series, int n, bool strict) {
  if (series.values.empty()) throw ValidationError("rolling average of an empty series");
  if (n < 1 || n % 2 == 0) throw std::invalid_argument("rolling window must be odd and positive");
  if (strict && n != 3 && n != 5 && n != 7)
    throw std::invalid_argument("rolling window must be 3, 5 or 7");
  DependentSeries out{series.kind, std::vector<double>(series.values.size())};
  switch (n) {
    case 3: out.kind = DependentKind::rolling_avg_3; break;
    case 5: out.kind = DependentKind::rolling_avg_5; break;
    case 7: out.kind = DependentKind::rolling_avg_7; break;
    default: break;
  }
  kernels::rolling_mean(series.values, n, out.values);
  return out;
}

DependentSeries pmi_unigram(std::span<const TokenRecord> tokens) {
  return per_token(tokens, DependentKind::pmi_unigram,
                   [](const TokenRecord& t) { return t.s_global - t.s_unigram; });
}

DependentSeries pmi_local(std::span<const TokenRecord> tokens, LocalContext local) {
  if (local == LocalContext::sentence)
    return per_token(tokens, DependentKind::pmi_sentence,
                     [](const TokenRecord& t) { return t.s_global - t.s_sentence; });
  return per_token(tokens, DependentKind::pmi_edu,
                   [](const TokenRecord& t) { return t.s_global - t.s_edu; });
}

DependentSeries compute_dependent(std::span<const TokenRecord> tokens, DependentKind kind) {
  switch (kind) {
    case DependentKind::doc_surprisal: return doc_surprisal(tokens);
    case DependentKind::rolling_avg_3: return rolling_average(doc_surprisal(tokens), 3);
    case DependentKind::rolling_avg_5: return rolling_average(doc_surprisal(tokens), 5);
    case DependentKind::rolling_avg_7: return rolling_average(doc_surprisal(tokens), 7);
    case DependentKind::pmi_unigram: return pmi_unigram(tokens);
    case DependentKind::pmi_sentence: return pmi_local(tokens, LocalContext::sentence);
    case DependentKind::pmi_edu: return pmi_local(tokens, LocalContext::edu);
  }
  throw std::logic_error("unknown dependent kind");
}

}  // namespace sctx
