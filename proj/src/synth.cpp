#include "sctx/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "sctx/features.hpp"

namespace sctx {

namespace {

constexpr const char* kRelations[] = {"Elaboration", "Joint",     "Contrast",
                                      "Attribution", "Same-Unit", "Background"};

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Random ordered tree over leaves [first, last).
int grow_tree(std::vector<TreeNode>& nodes, std::mt19937_64& rng, int first, int last, int depth,
              const SynthSpec& spec) {
  const int id = static_cast<int>(nodes.size());
  if (last - first == 1) {
    nodes.push_back(TreeNode{id, {}, first, "leaf"});
    return id;
  }
  nodes.push_back(TreeNode{id, {}, std::nullopt, kRelations[uniform_int(rng, 0, 5)]});
  std::vector<int> cuts;
  if (depth + 1 >= spec.max_depth) {
    for (int k = first + 1; k < last; ++k) cuts.push_back(k);
  } else {
    const int parts = uniform_int(rng, 2, std::min(spec.max_branching, last - first));
    std::vector<int> candidates;
    for (int k = first + 1; k < last; ++k) candidates.push_back(k);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    cuts.assign(candidates.begin(), candidates.begin() + (parts - 1));
    std::sort(cuts.begin(), cuts.end());
  }
  std::vector<int> children;
  int lo = first;
  cuts.push_back(last);
  for (int hi : cuts) {
    children.push_back(grow_tree(nodes, rng, lo, hi, depth + 1, spec));
    lo = hi;
  }
  nodes[static_cast<std::size_t>(id)].children = std::move(children);
  return id;
}

std::string random_word(std::mt19937_64& rng) {
  const int len = uniform_int(rng, 1, 9);
  std::string w;
  for (int i = 0; i < len; ++i) w += static_cast<char>('a' + uniform_int(rng, 0, 25));
  return w;
}

// Layout and text of one document; channels are filled in later.
CorpusDocument skeleton(const SynthSpec& spec, std::mt19937_64& rng, int index) {
  CorpusDocument out;
  char id[32];
  std::snprintf(id, sizeof id, "doc%04d", index);
  out.doc.doc_id = id;

  const int total = uniform_int(rng, spec.min_tokens, spec.max_tokens);
  std::vector<int> edu_sizes;
  for (int left = total; left > 0;) {
    int size = std::min(left, uniform_int(rng, spec.min_edu_tokens, spec.max_edu_tokens));
    edu_sizes.push_back(size);
    left -= size;
  }

  int edu = 0;
  int sentence = 0;
  int paragraph = 0;
  int sentences_in_paragraph = 0;
  int paragraph_target = uniform_int(rng, 1, 3);
  for (std::size_t e = 0; e < edu_sizes.size();) {
    const int edus_in_sentence =
        std::min<int>(uniform_int(rng, 1, 3), static_cast<int>(edu_sizes.size() - e));
    for (int k = 0; k < edus_in_sentence; ++k, ++e, ++edu) {
      for (int t = 0; t < edu_sizes[e]; ++t) {
        TokenRecord tok;
        tok.doc_id = out.doc.doc_id;
        tok.token_index = static_cast<int>(out.doc.tokens.size());
        tok.text = random_word(rng);
        tok.char_len = static_cast<int>(tok.text.size());
        tok.paragraph_index = paragraph;
        tok.sentence_index = sentence;
        tok.edu_index = edu;
        out.doc.tokens.push_back(std::move(tok));
      }
    }
    ++sentence;
    if (++sentences_in_paragraph == paragraph_target && e < edu_sizes.size()) {
      ++paragraph;
      sentences_in_paragraph = 0;
      paragraph_target = uniform_int(rng, 1, 3);
    }
  }

  std::vector<TreeNode> nodes;
  const int root = grow_tree(nodes, rng, 0, edu, 0, spec);
  out.rst = DiscourseTree(std::move(nodes), root, TreeKind::rst, false);
  out.prose = build_prose_tree(out.doc.tokens);
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (documents < 1) throw std::invalid_argument("documents must be >= 1");
  if (min_tokens < 1 || max_tokens < min_tokens)
    throw std::invalid_argument("need 1 <= min_tokens <= max_tokens");
  if (min_edu_tokens < 1 || max_edu_tokens < min_edu_tokens)
    throw std::invalid_argument("need 1 <= min_edu_tokens <= max_edu_tokens");
  if (max_branching < 2) throw std::invalid_argument("max_branching must be >= 2");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd))
    throw std::invalid_argument("noise_sd must be positive");
  if (!std::isfinite(intercept)) throw std::invalid_argument("intercept must be finite");
  for (const auto& [name, coef] : effects) {
    if (!std::isfinite(coef)) throw std::invalid_argument("coefficient of " + name + " is not finite");
    if (name == "prev_surprisal")
      throw std::invalid_argument("prev_surprisal depends on the planted channel itself");
  }
}

std::vector<CorpusDocument> generate_corpus(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const ExtractOptions options;

  std::vector<CorpusDocument> corpus;
  corpus.reserve(static_cast<std::size_t>(spec.documents));
  for (int d = 0; d < spec.documents; ++d) {
    CorpusDocument doc = skeleton(spec, rng, d);
    const auto features = extract_document(doc, options);

    std::vector<const std::vector<double>*> planted;
    std::vector<double> coefs;
    for (const auto& [name, coef] : spec.effects) {
      const auto it = std::find_if(features.predictors.begin(), features.predictors.end(),
                                   [&](const Column& c) { return c.name == name; });
      if (it == features.predictors.end())
        throw std::invalid_argument("unknown predictor '" + name + "'");
      planted.push_back(&it->values);
      coefs.push_back(coef);
    }

    auto& tokens = doc.doc.tokens;
    bool edu_opens_sentence = true;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto& t = tokens[i];
      double s = spec.intercept + spec.noise_sd * normal(rng);
      for (std::size_t k = 0; k < planted.size(); ++k) s += coefs[k] * (*planted[k])[i];
      t.s_global = std::max(0.0, s);

      // Local contexts lose the prefix before the sentence / EDU start.
      const bool new_edu = i == 0 || tokens[i - 1].edu_index != t.edu_index;
      if (new_edu)
        edu_opens_sentence = i == 0 || tokens[i - 1].sentence_index != t.sentence_index;
      const double sentence_offset = 0.5 * std::abs(normal(rng));
      const double edu_offset = 0.5 * std::abs(normal(rng));
      t.s_sentence = t.sentence_index == 0 ? t.s_global : t.s_global + sentence_offset;
      t.s_edu = edu_opens_sentence ? t.s_sentence : t.s_sentence + edu_offset;
      t.s_unigram = std::max(0.0, t.s_global + 1.5 + normal(rng));
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

void write_corpus(const std::string& dir, const std::vector<CorpusDocument>& corpus) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::ofstream tokens(base / "tokens.jsonl");
  std::ofstream rst(base / "rst.trees");
  std::ofstream prose(base / "prose.trees");
  if (!tokens || !rst || !prose) throw std::runtime_error("cannot write corpus into '" + dir + "'");
  rst << "# RST trees, one per document in token-file order\n";
  prose << "# prose trees, one per document in token-file order\n";
  for (const auto& doc : corpus) {
    write_tokens(tokens, std::vector<Document>{doc.doc});
    rst << doc.rst.to_sexpr() << '\n';
    prose << doc.prose.to_sexpr() << '\n';
  }
}

}  // namespace sctx
