#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "uidkit/corpus.hpp"

namespace uidkit {

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";

using WordId = std::uint32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

// Dense lemma ids. Ids 0, 1, 2 are <s>, </s>, <unk>; corpus lemmas follow.
class Vocabulary {
 public:
  static constexpr WordId kStartId = 0;
  static constexpr WordId kEndId = 1;
  static constexpr WordId kUnknownId = 2;
  static constexpr std::size_t kReserved = 3;

  Vocabulary();

  // Adds a lemma if absent and returns its id. Reserved symbols return
  // their fixed ids.
  WordId add(std::string_view lemma);
  // Unknown lemmas map to kUnknownId.
  WordId id(std::string_view lemma) const;
  bool contains(std::string_view lemma) const;
  const std::string& word(WordId id) const { return words_.at(id); }
  std::size_t size() const noexcept { return words_.size(); }

  static bool is_reserved(std::string_view lemma);

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> index_;
};

// Count statistics for a bigram model over padded sentences.
class BigramCounts {
 public:
  void add_unigram(const std::string& w, std::uint64_t n = 1);
  void add_bigram(const std::string& v, const std::string& w,
                  std::uint64_t n = 1);
  // Sums another set of counts into this one. Associative and commutative.
  void merge(const BigramCounts& other);

  std::uint64_t unigram(std::string_view w) const;
  std::uint64_t bigram(std::string_view v, std::string_view w) const;
  // Sum of c2(v, .).
  std::uint64_t context_total(std::string_view v) const;
  // N1+(., w): distinct left contexts of w.
  std::uint64_t continuation(std::string_view w) const;
  // N1+(v, .): distinct right continuations of v.
  std::uint64_t fertility(std::string_view v) const;
  // N1+(. .)
  std::uint64_t total_bigram_types() const noexcept { return bigram_types_; }
  // Bigram types seen exactly `n` times.
  std::uint64_t count_of_counts(std::uint64_t n) const;
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }

  // Lemmas seen as unigrams, sorted, excluding reserved symbols.
  std::vector<std::string> sorted_lemmas() const;
  // All bigrams sorted by (v, w).
  std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
  sorted_bigrams() const;

  bool empty() const noexcept { return c1_.empty(); }

 private:
  struct PairHash {
    std::size_t operator()(
        const std::pair<std::string, std::string>& p) const noexcept {
      const std::size_t h1 = std::hash<std::string>{}(p.first);
      const std::size_t h2 = std::hash<std::string>{}(p.second);
      return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
    }
  };
  using Map = std::unordered_map<std::string, std::uint64_t, StringHash,
                                 std::equal_to<>>;

  static std::uint64_t lookup(const Map& m, std::string_view key);

  Map c1_;
  std::unordered_map<std::pair<std::string, std::string>, std::uint64_t,
                     PairHash>
      c2_;
  Map context_total_;
  Map continuation_;
  Map fertility_;
  std::uint64_t bigram_types_ = 0;
  std::uint64_t total_tokens_ = 0;
};

// Pads each sentence with <s> and </s> and counts adjacent lemma pairs.
// Punctuation is skipped unless include_punctuation is set.
BigramCounts count_bigrams(std::span<const Document> docs,
                           bool include_punctuation = false);
// Counts one sentence given as a lemma sequence (without padding).
void count_sentence(BigramCounts& counts,
                    std::span<const std::string_view> lemmas);

inline constexpr double kDiscountEpsilon = 1e-6;

struct DiscountEstimate {
  double value = 0.0;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  // Set when the raw n1/(n1+2*n2) estimate had to be clamped.
  std::optional<std::string> warning;
};

// D = n1 / (n1 + 2 n2), clamped to [eps, 1 - eps]. Throws
// std::invalid_argument when n1 = n2 = 0.
DiscountEstimate estimate_discount(const BigramCounts& counts);

struct TrainOptions {
  // Estimated from counts when absent. Must lie in (0, 1).
  std::optional<double> discount;
  // Share of the continuation distribution given to <unk>. Absent means
  // 1 / (total_bigram_types + 1). Zero gives a closed vocabulary in which
  // <unk> has probability 0.
  std::optional<double> unknown_mass;
};

// Interpolated Kneser-Ney bigram model stored in backoff form:
//   p(w|v) = bigram(v, w)              if (v, w) was seen
//          = backoff(v) * unigram(w)   otherwise
// where unigram is the continuation distribution and backoff(v) is the
// interpolation weight of v (1 for contexts never seen).
class KneserNeyBigramModel {
 public:
  // discount is absent for models read from ARPA.
  KneserNeyBigramModel(Vocabulary vocab, std::optional<double> discount,
                       std::vector<double> unigram, std::vector<double> backoff,
                       std::unordered_map<std::uint64_t, double> bigrams);

  double prob(std::string_view context, std::string_view word) const;
  double prob(WordId context, WordId word) const;

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  std::optional<double> discount() const noexcept { return discount_; }
  double unigram(WordId w) const { return unigram_.at(w); }
  double backoff(WordId v) const { return backoff_.at(v); }
  // Explicit bigram probability, if stored.
  std::optional<double> bigram(WordId v, WordId w) const;
  std::size_t bigram_count() const noexcept { return bigrams_.size(); }
  // Every stored bigram sorted by (v, w).
  std::vector<std::pair<std::pair<WordId, WordId>, double>> sorted_bigrams()
      const;

  static std::uint64_t key(WordId v, WordId w) {
    return (static_cast<std::uint64_t>(v) << 32) | w;
  }

 private:
  Vocabulary vocab_;
  std::optional<double> discount_;
  std::vector<double> unigram_;
  std::vector<double> backoff_;
  std::unordered_map<std::uint64_t, double> bigrams_;
};

KneserNeyBigramModel train_kn(const BigramCounts& counts,
                              const TrainOptions& options = {});

// 2^(mean surprisal in bits) over every word event plus </s>. Throws
// std::invalid_argument on an empty corpus.
double perplexity(const KneserNeyBigramModel& model,
                  std::span<const Document> docs,
                  bool include_punctuation = false);

// ARPA text (orders 1 and 2), log10 values with six decimals.
std::string export_arpa(const KneserNeyBigramModel& model);
// Throws ParseError with the offending line number.
KneserNeyBigramModel import_arpa(std::string_view text);

}  // namespace uidkit
