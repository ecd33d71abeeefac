#include "sctx/tokens.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "sctx/error.hpp"

namespace sctx {

namespace {

using nlohmann::json;

constexpr const char* kFields[] = {"doc_id",         "token_index",    "text",     "char_len",
                                   "paragraph_index", "sentence_index", "edu_index", "s_global",
                                   "s_sentence",      "s_edu",          "s_unigram"};

bool is_known_field(const std::string& key) {
  for (const char* f : kFields) {
    if (key == f) return true;
  }
  return false;
}

template <typename T>
T field(const json& obj, const char* name, int line) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + name + "'", line, 1);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + name + "' has the wrong type", line, 1);
  }
}

// JSON has no NaN/Infinity literals; accept them as strings so that the
// validator can report them as invariant violations rather than parse noise.
double channel(const json& obj, const char* name, int line) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + name + "'", line, 1);
  if (it->is_number()) return it->get<double>();
  if (it->is_null()) return std::nan("");
  if (it->is_string()) {
    const auto& s = it->get_ref<const std::string&>();
    if (s == "NaN" || s == "nan") return std::nan("");
    if (s == "Infinity" || s == "inf") return INFINITY;
    if (s == "-Infinity" || s == "-inf") return -INFINITY;
  }
  throw ParseError(std::string("field '") + name + "' is not a number", line, 1);
}

std::string where(const Document& doc, const TokenRecord& t) {
  return "document '" + doc.doc_id + "', token " + std::to_string(t.token_index);
}

}  // namespace

int utf8_length(std::string_view text) {
  int n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<Document> read_tokens(std::istream& in, const TokenReadOptions& options,
                                  std::vector<std::string>* warnings) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> doc_slot;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no,
                       static_cast<int>(e.byte));
    }
    if (!obj.is_object()) throw ParseError("token line is not a JSON object", line_no, 1);
    for (const auto& [key, value] : obj.items()) {
      if (is_known_field(key)) continue;
      if (options.strict)
        throw ParseError("unknown field '" + key + "'", line_no, 1);
      if (warnings)
        warnings->push_back("line " + std::to_string(line_no) + ": ignoring unknown field '" +
                            key + "'");
    }
    TokenRecord t;
    t.doc_id = field<std::string>(obj, "doc_id", line_no);
    t.token_index = field<int>(obj, "token_index", line_no);
    t.text = field<std::string>(obj, "text", line_no);
    t.char_len = field<int>(obj, "char_len", line_no);
    t.paragraph_index = field<int>(obj, "paragraph_index", line_no);
    t.sentence_index = field<int>(obj, "sentence_index", line_no);
    t.edu_index = field<int>(obj, "edu_index", line_no);
    t.s_global = channel(obj, "s_global", line_no);
    t.s_sentence = channel(obj, "s_sentence", line_no);
    t.s_edu = channel(obj, "s_edu", line_no);
    t.s_unigram = channel(obj, "s_unigram", line_no);

    auto [it, inserted] = doc_slot.try_emplace(t.doc_id, docs.size());
    if (inserted) docs.push_back(Document{t.doc_id, {}});
    docs[it->second].tokens.push_back(std::move(t));
  }
  return docs;
}

std::vector<Document> read_token_file(const std::string& path, const TokenReadOptions& options,
                                      std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open token file '" + path + "'");
  return read_tokens(in, options, warnings);
}

void write_tokens(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& doc : docs) {
    for (const auto& t : doc.tokens) {
      // ordered_json keeps the canonical field order in the output
      nlohmann::ordered_json obj;
      obj["doc_id"] = t.doc_id;
      obj["token_index"] = t.token_index;
      obj["text"] = t.text;
      obj["char_len"] = t.char_len;
      obj["paragraph_index"] = t.paragraph_index;
      obj["sentence_index"] = t.sentence_index;
      obj["edu_index"] = t.edu_index;
      obj["s_global"] = t.s_global;
      obj["s_sentence"] = t.s_sentence;
      obj["s_edu"] = t.s_edu;
      obj["s_unigram"] = t.s_unigram;
      out << obj.dump() << '\n';
    }
  }
}

void validate_document(const Document& doc) {
  if (doc.tokens.empty()) throw ValidationError("document '" + doc.doc_id + "' has no tokens");
  const TokenRecord* prev = nullptr;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const auto& t = doc.tokens[i];
    if (t.token_index != static_cast<int>(i))
      throw ValidationError(where(doc, t) + ": expected token_index " + std::to_string(i));
    if (t.char_len < 1) throw ValidationError(where(doc, t) + ": char_len must be >= 1");
    if (utf8_length(t.text) != t.char_len)
      throw ValidationError(where(doc, t) + ": char_len " + std::to_string(t.char_len) +
                            " does not match text length " + std::to_string(utf8_length(t.text)));
    const std::pair<const char*, double> channels[] = {{"s_global", t.s_global},
                                                       {"s_sentence", t.s_sentence},
                                                       {"s_edu", t.s_edu},
                                                       {"s_unigram", t.s_unigram}};
    for (const auto& [name, v] : channels) {
      if (!std::isfinite(v))
        throw ValidationError(where(doc, t) + ": " + name + " is not finite");
      if (v < 0.0) throw ValidationError(where(doc, t) + ": " + name + " is negative");
    }
    const std::pair<const char*, std::pair<int, int>> ids[] = {
        {"paragraph_index", {prev ? prev->paragraph_index : -1, t.paragraph_index}},
        {"sentence_index", {prev ? prev->sentence_index : -1, t.sentence_index}},
        {"edu_index", {prev ? prev->edu_index : -1, t.edu_index}}};
    for (const auto& [name, pair] : ids) {
      const auto [before, now] = pair;
      if (now < before)
        throw ValidationError(where(doc, t) + ": " + name + " decreases");
      if (now > before + 1)
        throw ValidationError(where(doc, t) + ": " + name + " skips from " +
                              std::to_string(before) + " to " + std::to_string(now));
    }
    prev = &t;
  }
}

}  // namespace sctx
