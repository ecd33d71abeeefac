#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sctx/contours.hpp"
#include "sctx/error.hpp"
#include "support.hpp"

using namespace sctx;

namespace {

std::vector<double> brute_window_mean(const std::vector<double>& v, int n) {
  const int half = n / 2;
  const int len = static_cast<int>(v.size());
  std::vector<double> out(v.size());
  for (int i = 0; i < len; ++i) {
    double s = 0.0;
    int c = 0;
    for (int j = i - half; j <= i + half; ++j) {
      if (j < 0 || j >= len) continue;
      s += v[static_cast<std::size_t>(j)];
      ++c;
    }
    out[static_cast<std::size_t>(i)] = s / c;
  }
  return out;
}

std::vector<TokenRecord> with_global(const std::vector<double>& s) {
  std::vector<TokenRecord> t(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    t[i].token_index = static_cast<int>(i);
    t[i].s_global = s[i];
    t[i].s_sentence = s[i];
    t[i].s_edu = s[i];
    t[i].s_unigram = s[i];
  }
  return t;
}

}  // namespace

TEST_CASE("doc_surprisal passes s_global through") {
  const auto t = with_global({2.0, 3.0});
  CHECK(doc_surprisal(t).values == std::vector<double>{2.0, 3.0});
  CHECK_THROWS_AS(doc_surprisal(std::vector<TokenRecord>{}), ValidationError);
}

TEST_CASE("rolling_average examples") {
  DependentSeries s{DependentKind::doc_surprisal, {1, 2, 3, 4, 5}};
  const auto r = rolling_average(s, 3);
  CHECK(r.kind == DependentKind::rolling_avg_3);
  CHECK(r.values == std::vector<double>{1.5, 2, 3, 4, 4.5});

  DependentSeries c{DependentKind::doc_surprisal, std::vector<double>(9, 2.75)};
  for (int n : {3, 5, 7})
    for (double v : rolling_average(c, n).values) CHECK(v == doctest::Approx(2.75).epsilon(1e-15));

  CHECK_THROWS_AS(rolling_average(s, 4), std::invalid_argument);
  CHECK_THROWS_AS(rolling_average(s, 9), std::invalid_argument);
  CHECK(rolling_average(s, 9, false).values.size() == 5);
}

TEST_CASE("rolling_average matches brute force and bounded edge effects") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 12.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int len = std::uniform_int_distribution<int>(1, 300)(rng);
    std::vector<double> v(static_cast<std::size_t>(len));
    for (auto& x : v) x = u(rng);
    DependentSeries s{DependentKind::doc_surprisal, v};
    for (int n : {3, 5, 7}) {
      const auto got = rolling_average(s, n).values;
      const auto want = brute_window_mean(v, n);
      double mean_got = 0.0, mean_raw = 0.0;
      for (int i = 0; i < len; ++i) {
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - want[static_cast<std::size_t>(i)]) <= 1e-12);
        mean_got += got[static_cast<std::size_t>(i)];
        mean_raw += v[static_cast<std::size_t>(i)];
      }
      const double maxabs = *std::max_element(v.begin(), v.end());
      CHECK(std::abs(mean_got - mean_raw) / len <= static_cast<double>(n) / len * maxabs);
    }
  }
}

TEST_CASE("PMI variants") {
  auto t = with_global({5.0});
  t[0].s_unigram = 2.0;
  CHECK(pmi_unigram(t).values == std::vector<double>{3.0});

  auto u = with_global({4.0, 6.0});
  u[0].s_edu = 4.0;
  u[1].s_edu = 2.0;
  CHECK(pmi_local(u, LocalContext::edu).values == std::vector<double>{0.0, 4.0});
  CHECK(pmi_unigram(with_global({1, 2, 3})).values == std::vector<double>{0, 0, 0});
}

TEST_CASE("PMI equals channel differences on generated documents") {
  std::mt19937_64 rng(4);
  const auto doc = testing::make_document("d", {{{{3, 2}, {4}}, {{1, 5}}}}, rng);
  const auto uni = pmi_unigram(doc.tokens).values;
  const auto sen = pmi_local(doc.tokens, LocalContext::sentence).values;
  const auto edu = pmi_local(doc.tokens, LocalContext::edu).values;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const auto& tok = doc.tokens[i];
    CHECK(uni[i] == tok.s_global - tok.s_unigram);
    CHECK(sen[i] == tok.s_global - tok.s_sentence);
    CHECK(edu[i] == tok.s_global - tok.s_edu);
  }
  // Document start: global and local contexts coincide.
  CHECK(sen[0] == 0.0);
}

TEST_CASE("sentence and EDU PMI coincide when every sentence is one EDU") {
  std::mt19937_64 rng(6);
  auto doc = testing::make_document("d", {{{{3}, {4}}, {{2}}}}, rng);
  for (auto& t : doc.tokens) t.s_edu = t.s_sentence;
  CHECK(pmi_local(doc.tokens, LocalContext::sentence).values ==
        pmi_local(doc.tokens, LocalContext::edu).values);
}

TEST_CASE("translation equivariance in s_global") {
  std::mt19937_64 rng(13);
  const auto doc = testing::make_document("d", {{{{3, 2}, {4}}, {{6, 5}}}}, rng);
  for (double c : {0.5, 3.25, 17.0}) {
    auto shifted = doc.tokens;
    for (auto& t : shifted) t.s_global += c;
    for (auto kind : kAllDependents) {
      const auto a = compute_dependent(doc.tokens, kind).values;
      const auto b = compute_dependent(shifted, kind).values;
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs((b[i] - a[i]) - c) <= 1e-12);
    }
  }
}

TEST_CASE("dependent names round-trip") {
  for (auto kind : kAllDependents) CHECK(parse_dependent(to_string(kind)) == kind);
  CHECK_FALSE(parse_dependent("nope").has_value());
}
