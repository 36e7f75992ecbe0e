#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uidkit {

// Decides which surfaces count as punctuation. A surface is punctuation iff
// every code point in it belongs to the set.
class PunctuationPolicy {
 public:
  // . , ; : ? ! / ( ) „ " —
  PunctuationPolicy();
  explicit PunctuationPolicy(std::u32string characters);

  // Parses a UTF-8 string of punctuation characters.
  static PunctuationPolicy from_utf8(std::string_view characters);

  bool is_punctuation(std::string_view surface) const;
  bool contains(char32_t c) const;
  const std::u32string& characters() const noexcept { return chars_; }

 private:
  std::u32string chars_;
};

struct Token {
  std::string surface;
  std::string lemma;
  std::optional<std::string> pos;
  // Word ordinal within the document. Punctuation tokens carry the ordinal
  // of the next word (the number of words before them).
  std::size_t doc_position = 0;
  std::size_t sentence_index = 0;
  bool is_punctuation = false;

  bool operator==(const Token&) const = default;
};

class Document {
 public:
  Document() = default;
  // Checks the positional invariants and throws InvariantError on violation.
  Document(std::string id, std::vector<Token> tokens);

  const std::string& id() const noexcept { return id_; }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }
  std::size_t sentence_count() const noexcept { return sentence_count_; }
  std::size_t word_count() const noexcept { return word_index_.size(); }

  // The word token at a given doc_position. Throws std::out_of_range.
  const Token& word_at(std::size_t doc_position) const;
  // Index into tokens() of the word at doc_position.
  std::size_t token_index(std::size_t doc_position) const;

  bool operator==(const Document& other) const {
    return id_ == other.id_ && tokens_ == other.tokens_;
  }

 private:
  std::string id_;
  std::vector<Token> tokens_;
  std::size_t sentence_count_ = 0;
  std::vector<std::size_t> word_index_;
};

// Builds a document from (surface, lemma, pos, sentence_index) tuples,
// assigning doc_position and is_punctuation from the policy.
struct RawToken {
  std::string surface;
  std::string lemma;
  std::optional<std::string> pos;
  std::size_t sentence_index = 0;
};
Document make_document(std::string id, std::vector<RawToken> raw,
                       const PunctuationPolicy& punct = {});

// Vertical format: `# doc: <id>` starts a document, one token per line as
// surface<TAB>lemma[<TAB>pos], blank line ends a sentence, other `#` lines
// are comments.
std::vector<Document> load_vertical(std::string_view source,
                                    const PunctuationPolicy& punct = {});
std::vector<Document> load_vertical_file(const std::string& path,
                                         const PunctuationPolicy& punct = {});
std::string write_vertical(const std::vector<Document>& docs);

// Whitespace tokenization with punctuation split off; lemma is the
// lowercased surface. Blank lines end sentences.
Document tokenize_plain_text(std::string id, std::string_view text,
                             const PunctuationPolicy& punct = {});

// Adds a sentence boundary after every "." token.
Document resegment_sentences(const Document& doc);

struct LemmaEntry {
  std::string_view lemma;
  std::size_t doc_position;
  std::size_t sentence_index;
};
std::vector<LemmaEntry> lemma_stream(const Document& doc,
                                     bool include_punctuation);

// Throws InputError on invalid UTF-8.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);
// Lowercases ASCII and Latin-1 letters; other code points pass through.
std::string lowercase_utf8(std::string_view text);

std::string read_file(const std::string& path);

}  // namespace uidkit
