#ifndef SCTX_SYNTH_HPP
#define SCTX_SYNTH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sctx/corpus.hpp"

namespace sctx {

// Parameters of a synthetic corpus with a planted linear signal.
struct SynthSpec {
  int documents = 20;
  int min_tokens = 60;  // tokens per document, uniform in [min_tokens, max_tokens]
  int max_tokens = 140;
  int min_edu_tokens = 2;
  int max_edu_tokens = 10;
  int max_branching = 3;  // RST tree shape
  int max_depth = 4;
  // Predictor column name -> coefficient on s_global.
  std::map<std::string, double> effects;
  double intercept = 6.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// s_global = intercept + sum(coef * predictor) + Normal(0, noise_sd), with the
// predictors computed by this library's own extractors; the sentence, EDU and
// unigram channels add non-negative offsets wherever their context is shorter
// than the document prefix. Throws std::invalid_argument for bad specs or
// unknown predictor names.
std::vector<CorpusDocument> generate_corpus(const SynthSpec& spec);

// Writes tokens.jsonl, rst.trees and prose.trees into `dir`.
void write_corpus(const std::string& dir, const std::vector<CorpusDocument>& corpus);

}  // namespace sctx

#endif  // SCTX_SYNTH_HPP
