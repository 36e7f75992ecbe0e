#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "uidkit/corpus.hpp"
#include "uidkit/surprisal.hpp"

namespace uidkit {

// Hyperbolic novelty weighting y = bonus / x, flat at 1 from x = wearout on.
// A lemma unused for `window` words loses one mention per full window, but
// never drops below `floor`.
struct FactorConfig {
  double bonus = 4.0;
  int wearout = 4;
  std::size_t window = 200;
  int floor = 2;

  static constexpr std::size_t kNoDecay = std::numeric_limits<std::size_t>::max();

  // Throws std::invalid_argument.
  void validate() const;
};

// bonus / x for x < wearout, else 1. Throws std::invalid_argument for x < 1.
double factor(int x, const FactorConfig& cfg);

// Effective mention count for a re-mention `gap` words after the previous one.
int next_x(int prev_x, std::size_t gap, const FactorConfig& cfg);

struct Observation {
  int x = 0;  // 0 for tokens the counter does not track
  double factor = 1.0;
};

class AccommodationState {
 public:
  // Throws std::invalid_argument("stream must be scanned in order") if
  // position does not advance past the lemma's last occurrence.
  Observation observe(std::string_view lemma, std::size_t position,
                      const FactorConfig& cfg);

  std::size_t tracked_lemmas() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    int x;
    std::size_t last_position;
  };
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, Entry, Hash, std::equal_to<>> entries_;
};

// Decides which tokens are content words. Tokens with a POS tag match by tag
// prefix (STTS: NN, NE, VV*, ADJ*, ADV); untagged tokens are content words
// unless their lemma is on the stoplist.
class ContentWordPolicy {
 public:
  ContentWordPolicy();
  ContentWordPolicy(std::vector<std::string> pos_prefixes,
                    std::unordered_set<std::string> stoplist);

  bool is_content(const Token& token) const;

  static std::vector<std::string> default_pos_prefixes();
  static std::unordered_set<std::string> default_stoplist();
  // One lemma per line; blank lines and `#` comments ignored.
  static std::unordered_set<std::string> parse_stoplist(std::string_view text);

  const std::vector<std::string>& pos_prefixes() const { return prefixes_; }
  const std::unordered_set<std::string>& stoplist() const { return stoplist_; }

 private:
  std::vector<std::string> prefixes_;
  std::unordered_set<std::string> stoplist_;
};

// Forward scan over a document's word tokens. Entry i belongs to
// doc_position i.
std::vector<Observation> accommodation_factors(const Document& doc,
                                               const ContentWordPolicy& policy,
                                               const FactorConfig& cfg);

struct WeightedEntry {
  SurprisalEntry base;
  bool content = false;
  int x = 0;
  double factor = 1.0;
  double weighted = 0.0;
};

struct WeightedAnnotation {
  std::string doc_id;
  std::vector<WeightedEntry> entries;
};

// Multiplies content-word surprisal by its accommodation factor. Throws
// std::invalid_argument when the annotation is not aligned to doc.
WeightedAnnotation accommodate_document(const SurprisalAnnotation& annotation,
                                        const Document& doc,
                                        const ContentWordPolicy& policy,
                                        const FactorConfig& cfg);

// Surprisal dump columns followed by x, factor, weighted_surprisal.
std::string format_weighted_tsv(std::span<const WeightedAnnotation> docs);

}  // namespace uidkit
