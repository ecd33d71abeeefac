#ifndef SCTX_CORPUS_HPP
#define SCTX_CORPUS_HPP

#include <optional>
#include <string>
#include <vector>

#include "sctx/tokens.hpp"
#include "sctx/treebank.hpp"

namespace sctx {

// A document with both of its discourse trees, un-binarized.
struct CorpusDocument {
  Document doc;
  DiscourseTree rst;
  DiscourseTree prose;
};

struct CorpusPaths {
  std::string tokens;
  std::string rst_trees;
  // Unset: derive prose trees from the token containment ids.
  std::optional<std::string> prose_trees;
  bool strict = true;
};

struct CorpusIssue {
  std::string doc_id;  // empty for file-level problems
  std::string message;
};

// Trees are matched to documents by position: the k-th tree of each file
// belongs to the k-th document in order of first appearance in the token file.
// Throws on the first problem found.
std::vector<CorpusDocument> load_corpus(const CorpusPaths& paths,
                                        std::vector<std::string>* warnings = nullptr);

// Same checks as load_corpus, but collects every problem instead of stopping.
std::vector<CorpusIssue> validate_corpus(const CorpusPaths& paths,
                                         std::vector<std::string>* warnings = nullptr);

// Checks one assembled document: token invariants, and that both trees cover
// exactly the document's EDUs/sentences with contiguous token runs.
void validate_corpus_document(const CorpusDocument& doc);

}  // namespace sctx

#endif  // SCTX_CORPUS_HPP
