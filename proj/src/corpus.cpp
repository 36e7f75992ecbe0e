#include "uidkit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "uidkit/error.hpp"

namespace uidkit {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0xA0;
}

}  // namespace

PunctuationPolicy::PunctuationPolicy()
    : chars_(U".,;:?!/()„\"—") {}

PunctuationPolicy::PunctuationPolicy(std::u32string characters)
    : chars_(std::move(characters)) {}

PunctuationPolicy PunctuationPolicy::from_utf8(std::string_view characters) {
  return PunctuationPolicy(decode_utf8(characters));
}

bool PunctuationPolicy::contains(char32_t c) const {
  return chars_.find(c) != std::u32string::npos;
}

bool PunctuationPolicy::is_punctuation(std::string_view surface) const {
  if (surface.empty()) return false;
  const auto cps = decode_utf8(surface);
  return std::all_of(cps.begin(), cps.end(),
                     [this](char32_t c) { return contains(c); });
}

Document::Document(std::string id, std::vector<Token> tokens)
    : id_(std::move(id)), tokens_(std::move(tokens)) {
  std::size_t expected_position = 0;
  std::size_t prev_sentence = 0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const Token& t = tokens_[i];
    if (i > 0 && t.sentence_index < prev_sentence) {
      throw InvariantError("document " + id_ +
                           ": sentence indices must be non-decreasing");
    }
    if ((i == 0 && t.sentence_index != 0) ||
        (i > 0 && t.sentence_index > prev_sentence + 1)) {
      throw InvariantError("document " + id_ +
                           ": sentence indices must be dense");
    }
    prev_sentence = t.sentence_index;
    if (t.doc_position != expected_position) {
      throw InvariantError("document " + id_ + ": token " + std::to_string(i) +
                           " has doc_position " +
                           std::to_string(t.doc_position) + ", expected " +
                           std::to_string(expected_position));
    }
    if (!t.is_punctuation) {
      if (t.lemma.empty()) {
        throw InvariantError("document " + id_ + ": word token " +
                             std::to_string(i) + " has an empty lemma");
      }
      word_index_.push_back(i);
      ++expected_position;
    }
  }
  sentence_count_ = tokens_.empty() ? 0 : tokens_.back().sentence_index + 1;
}

const Token& Document::word_at(std::size_t doc_position) const {
  return tokens_[token_index(doc_position)];
}

std::size_t Document::token_index(std::size_t doc_position) const {
  if (doc_position >= word_index_.size()) {
    throw std::out_of_range("document " + id_ + ": no word at position " +
                            std::to_string(doc_position));
  }
  return word_index_[doc_position];
}

Document make_document(std::string id, std::vector<RawToken> raw,
                       const PunctuationPolicy& punct) {
  std::vector<Token> tokens;
  tokens.reserve(raw.size());
  std::size_t position = 0;
  for (auto& r : raw) {
    Token t;
    t.is_punctuation = punct.is_punctuation(r.surface);
    t.surface = std::move(r.surface);
    t.lemma = std::move(r.lemma);
    t.pos = std::move(r.pos);
    t.sentence_index = r.sentence_index;
    t.doc_position = position;
    if (!t.is_punctuation) ++position;
    tokens.push_back(std::move(t));
  }
  return Document(std::move(id), std::move(tokens));
}

std::vector<Document> load_vertical(std::string_view source,
                                    const PunctuationPolicy& punct) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen_ids;

  std::optional<std::string> current_id;
  std::vector<RawToken> current;
  std::size_t sentence = 0;
  bool sentence_open = false;

  auto flush = [&] {
    if (!current_id) return;
    docs.push_back(make_document(*current_id, std::move(current), punct));
    current.clear();
    current_id.reset();
  };

  decode_utf8(source);  // validates the whole input once

  const auto lines = split_lines(source);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t lineno = n + 1;
    std::string_view line = lines[n];
    if (line.empty()) {
      if (sentence_open) {
        ++sentence;
        sentence_open = false;
      }
      continue;
    }
    if (line.front() == '#') {
      constexpr std::string_view kDoc = "# doc:";
      if (line.substr(0, kDoc.size()) == kDoc) {
        flush();
        auto id = line.substr(kDoc.size());
        while (!id.empty() && (id.front() == ' ' || id.front() == '\t'))
          id.remove_prefix(1);
        while (!id.empty() && (id.back() == ' ' || id.back() == '\t'))
          id.remove_suffix(1);
        if (id.empty()) throw ParseError(lineno, "empty document id");
        if (!seen_ids.insert(std::string(id)).second) {
          throw ParseError(lineno,
                           "duplicate document id '" + std::string(id) + "'");
        }
        current_id = std::string(id);
        sentence = 0;
        sentence_open = false;
      }
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() < 2 || cols.size() > 3) {
      throw ParseError(lineno, "expected 2 or 3 tab-separated columns, got " +
                                   std::to_string(cols.size()));
    }
    if (!current_id) {
      throw ParseError(lineno, "token line before any '# doc:' header");
    }
    if (cols[0].empty()) throw ParseError(lineno, "empty surface");
    RawToken tok;
    tok.surface = std::string(cols[0]);
    tok.lemma = std::string(cols[1]);
    if (cols.size() == 3 && !cols[2].empty()) tok.pos = std::string(cols[2]);
    if (tok.lemma.empty() && !punct.is_punctuation(tok.surface)) {
      throw ParseError(lineno, "empty lemma for word token '" + tok.surface +
                                   "'");
    }
    tok.sentence_index = sentence;
    sentence_open = true;
    current.push_back(std::move(tok));
  }
  flush();
  return docs;
}

std::vector<Document> load_vertical_file(const std::string& path,
                                         const PunctuationPolicy& punct) {
  return load_vertical(read_file(path), punct);
}

std::string write_vertical(const std::vector<Document>& docs) {
  std::string out;
  auto check_field = [](const std::string& field, const std::string& doc) {
    if (field.find_first_of("\t\n\r") != std::string::npos) {
      throw InputError("document " + doc +
                       ": field contains a tab or newline: '" + field + "'");
    }
  };
  for (const auto& doc : docs) {
    check_field(doc.id(), doc.id());
    out += "# doc: " + doc.id() + "\n";
    for (std::size_t i = 0; i < doc.tokens().size(); ++i) {
      const Token& t = doc.tokens()[i];
      if (i > 0 && t.sentence_index != doc.tokens()[i - 1].sentence_index) {
        out += '\n';
      }
      check_field(t.surface, doc.id());
      check_field(t.lemma, doc.id());
      if (!t.surface.empty() && t.surface.front() == '#') {
        throw InputError("document " + doc.id() +
                         ": surface starting with '#' cannot be written");
      }
      out += t.surface;
      out += '\t';
      out += t.lemma;
      if (t.pos) {
        check_field(*t.pos, doc.id());
        out += '\t';
        out += *t.pos;
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

Document tokenize_plain_text(std::string id, std::string_view text,
                             const PunctuationPolicy& punct) {
  const auto cps = decode_utf8(text);
  std::vector<RawToken> raw;
  std::size_t sentence = 0;
  bool sentence_open = false;
  std::size_t newlines = 0;

  auto push = [&](std::u32string_view piece) {
    RawToken t;
    t.surface = encode_utf8(piece);
    t.lemma = punct.is_punctuation(t.surface) ? t.surface
                                              : lowercase_utf8(t.surface);
    t.sentence_index = sentence;
    sentence_open = true;
    raw.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i])) {
      if (cps[i] == U'\n' && ++newlines >= 2 && sentence_open) {
        ++sentence;
        sentence_open = false;
      }
      ++i;
      continue;
    }
    newlines = 0;
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j])) ++j;
    std::u32string_view word(cps.data() + i, j - i);
    std::size_t lead = 0;
    while (lead < word.size() && punct.contains(word[lead])) ++lead;
    std::size_t trail = word.size();
    while (trail > lead && punct.contains(word[trail - 1])) --trail;
    for (std::size_t k = 0; k < lead; ++k) push(word.substr(k, 1));
    if (trail > lead) push(word.substr(lead, trail - lead));
    for (std::size_t k = trail; k < word.size(); ++k) push(word.substr(k, 1));
    i = j;
  }
  return resegment_sentences(make_document(std::move(id), std::move(raw), punct));
}

Document resegment_sentences(const Document& doc) {
  std::vector<Token> tokens = doc.tokens();
  std::size_t sentence = 0;
  bool boundary_pending = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && (boundary_pending || doc.tokens()[i].sentence_index !=
                                          doc.tokens()[i - 1].sentence_index)) {
      ++sentence;
    }
    boundary_pending = tokens[i].surface == ".";
    tokens[i].sentence_index = sentence;
  }
  return Document(doc.id(), std::move(tokens));
}

std::vector<LemmaEntry> lemma_stream(const Document& doc,
                                     bool include_punctuation) {
  std::vector<LemmaEntry> out;
  out.reserve(doc.tokens().size());
  for (const auto& t : doc.tokens()) {
    if (t.is_punctuation && !include_punctuation) continue;
    out.push_back({t.lemma, t.doc_position, t.sentence_index});
  }
  return out;
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto fail = [&](const char* why) {
    throw InputError("invalid UTF-8 at byte " + std::to_string(i) + ": " + why);
  };
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      fail("bad lead byte");
    }
    if (i + len > text.size()) fail("truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) fail("bad continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) ||
                          (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong) fail("overlong encoding");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      fail("code point out of range");
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::string lowercase_utf8(std::string_view text) {
  auto cps = decode_utf8(text);
  for (auto& c : cps) {
    if (c >= U'A' && c <= U'Z') {
      c += 0x20;
    } else if (c >= 0xC0 && c <= 0xDE && c != 0xD7) {
      c += 0x20;
    }
  }
  return encode_utf8(cps);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("error reading '" + path + "'");
  return ss.str();
}

}  // namespace uidkit
