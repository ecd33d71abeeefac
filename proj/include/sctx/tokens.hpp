#ifndef SCTX_TOKENS_HPP
#define SCTX_TOKENS_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sctx {

// One granular unit (an LM token) with its containment ids and surprisal
// channels. All surprisals are in nats.
struct TokenRecord {
  std::string doc_id;
  int token_index = 0;
  std::string text;
  int char_len = 1;
  int paragraph_index = 0;
  int sentence_index = 0;
  int edu_index = 0;
  double s_global = 0.0;
  double s_sentence = 0.0;
  double s_edu = 0.0;
  double s_unigram = 0.0;
};

// Tokens of a single document, in document order.
struct Document {
  std::string doc_id;
  std::vector<TokenRecord> tokens;
};

struct TokenReadOptions {
  // Reject unknown fields instead of warning.
  bool strict = true;
};

// Number of Unicode code points in a UTF-8 string.
int utf8_length(std::string_view text);

// Reads a JSON Lines token file and groups it into documents in order of first
// appearance. Throws ParseError on malformed lines, ValidationError on
// violated token invariants. Warnings (lenient mode) go to `warnings`.
std::vector<Document> read_token_file(const std::string& path, const TokenReadOptions& options = {},
                                      std::vector<std::string>* warnings = nullptr);
std::vector<Document> read_tokens(std::istream& in, const TokenReadOptions& options = {},
                                  std::vector<std::string>* warnings = nullptr);

void write_tokens(std::ostream& out, const std::vector<Document>& docs);

// Checks the per-document invariants: contiguous token indices from 0,
// non-decreasing containment ids starting at 0 without gaps, finite and
// non-negative channels, char_len matching the text. Throws ValidationError
// naming the document and token.
void validate_document(const Document& doc);

}  // namespace sctx

#endif  // SCTX_TOKENS_HPP
