#include "sctx/corpus.hpp"

#include <exception>

#include "sctx/error.hpp"

namespace sctx {

namespace {

void check_tree_alignment(const DiscourseTree& tree, const Document& doc) {
  const int units = tree.kind() == TreeKind::rst ? doc.tokens.back().edu_index + 1
                                                 : doc.tokens.back().sentence_index + 1;
  if (tree.leaf_count() != units)
    throw ValidationError(std::string(to_string(tree.kind())) + " tree has " +
                          std::to_string(tree.leaf_count()) + " leaves but the tokens cover " +
                          std::to_string(units) + (tree.kind() == TreeKind::rst ? " EDUs" : " sentences"));
  (void)leaf_spans(tree, doc.tokens);
}

struct Loaded {
  std::vector<Document> docs;
  std::vector<DiscourseTree> rst;
  std::vector<DiscourseTree> prose;
  bool derive_prose = false;
};

Loaded read_inputs(const CorpusPaths& paths, std::vector<std::string>* warnings) {
  Loaded in;
  in.docs = read_token_file(paths.tokens, TokenReadOptions{paths.strict}, warnings);
  in.rst = parse_tree_file(paths.rst_trees, TreeKind::rst);
  in.derive_prose = !paths.prose_trees.has_value();
  if (!in.derive_prose) in.prose = parse_tree_file(*paths.prose_trees, TreeKind::prose);
  return in;
}

std::string count_mismatch(const char* what, std::size_t trees, std::size_t docs) {
  return std::string(what) + " tree file has " + std::to_string(trees) +
         " trees but the token file has " + std::to_string(docs) + " documents";
}

}  // namespace

void validate_corpus_document(const CorpusDocument& doc) {
  validate_document(doc.doc);
  check_tree_alignment(doc.rst, doc.doc);
  check_tree_alignment(doc.prose, doc.doc);
}

std::vector<CorpusDocument> load_corpus(const CorpusPaths& paths,
                                        std::vector<std::string>* warnings) {
  Loaded in = read_inputs(paths, warnings);
  if (in.docs.empty()) throw ValidationError("token file contains no documents");
  if (in.rst.size() != in.docs.size())
    throw ValidationError(count_mismatch("RST", in.rst.size(), in.docs.size()));
  if (!in.derive_prose && in.prose.size() != in.docs.size())
    throw ValidationError(count_mismatch("prose", in.prose.size(), in.docs.size()));

  std::vector<CorpusDocument> corpus;
  corpus.reserve(in.docs.size());
  for (std::size_t i = 0; i < in.docs.size(); ++i) {
    const std::string doc_id = in.docs[i].doc_id;
    try {
      validate_document(in.docs[i]);
      DiscourseTree prose =
          in.derive_prose ? build_prose_tree(in.docs[i].tokens) : std::move(in.prose[i]);
      CorpusDocument doc{std::move(in.docs[i]), std::move(in.rst[i]), std::move(prose)};
      validate_corpus_document(doc);
      corpus.push_back(std::move(doc));
    } catch (const ValidationError& e) {
      throw ValidationError("document '" + doc_id + "': " + e.what());
    }
  }
  return corpus;
}

std::vector<CorpusIssue> validate_corpus(const CorpusPaths& paths,
                                         std::vector<std::string>* warnings) {
  std::vector<CorpusIssue> issues;
  Loaded in;
  try {
    in = read_inputs(paths, warnings);
  } catch (const std::exception& e) {
    issues.push_back({"", e.what()});
    return issues;
  }
  if (in.docs.empty()) issues.push_back({"", "token file contains no documents"});
  if (in.rst.size() != in.docs.size())
    issues.push_back({"", count_mismatch("RST", in.rst.size(), in.docs.size())});
  if (!in.derive_prose && in.prose.size() != in.docs.size())
    issues.push_back({"", count_mismatch("prose", in.prose.size(), in.docs.size())});

  for (std::size_t i = 0; i < in.docs.size(); ++i) {
    const auto& doc = in.docs[i];
    try {
      validate_document(doc);
    } catch (const std::exception& e) {
      issues.push_back({doc.doc_id, e.what()});
      continue;
    }
    if (i < in.rst.size()) {
      try {
        check_tree_alignment(in.rst[i], doc);
      } catch (const std::exception& e) {
        issues.push_back({doc.doc_id, e.what()});
      }
    }
    try {
      if (in.derive_prose)
        check_tree_alignment(build_prose_tree(doc.tokens), doc);
      else if (i < in.prose.size())
        check_tree_alignment(in.prose[i], doc);
    } catch (const std::exception& e) {
      issues.push_back({doc.doc_id, e.what()});
    }
  }
  return issues;
}

}  // namespace sctx
