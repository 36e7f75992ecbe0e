#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uidkit/clauses.hpp"

namespace uidkit {

enum class SalienceCategory {
  New,
  InferableNew,
  GivenNonSalient,
  GivenSalient,
  SalientTopic,
};
inline constexpr std::size_t kSalienceCategories = 5;

std::string_view to_string(SalienceCategory c);

// Inferability and topichood are annotator judgements, not computed.
struct ReferentMention {
  std::string doc_id;
  Span span;
  std::string referent_id;
  bool inferable = false;
  bool topic = false;
  std::size_t mention_ordinal = 0;  // index in the document's mention order
};

enum class InterveningCount {
  Mentions,           // every mention event counts
  DistinctReferents,  // each referent counts once
};

struct SalienceOptions {
  // A re-mention is salient when at most this many referents intervene.
  std::size_t window = 10;
  InterveningCount counting = InterveningCount::Mentions;
};

// `history` holds the mentions preceding `mention` in document order.
SalienceCategory classify_mention(std::span<const ReferentMention> history,
                                  const ReferentMention& mention,
                                  const SalienceOptions& options = {});

// Classifies one document's mentions (sorted, ordinals dense) in order.
std::vector<SalienceCategory> classify_document(
    std::span<const ReferentMention> mentions,
    const SalienceOptions& options = {});

// doc, start, end, referent_id, inferable, topic. Mentions come back sorted
// by (doc, start) with per-document ordinals assigned. Unknown documents,
// spans outside the document and overlapping mentions are collected into a
// ValidationError.
std::vector<ReferentMention> parse_referent_mentions(
    std::string_view tsv, std::span<const Document> docs);

struct GivennessCounts {
  std::array<std::size_t, kSalienceCategories> by_category{};

  std::size_t total() const;
  std::size_t count(SalienceCategory c) const {
    return by_category[static_cast<std::size_t>(c)];
  }
  // Discourse-new referents.
  std::size_t new_referents() const { return count(SalienceCategory::New); }
  // Given salient referents, topic or not.
  std::size_t salient_referents() const {
    return count(SalienceCategory::GivenSalient) +
           count(SalienceCategory::SalientTopic);
  }
  // Undefined (nullopt) when total() == 0.
  std::optional<double> ratio(std::size_t count) const;

  GivennessCounts& operator+=(const GivennessCounts& other);
};

// Counts mentions lying inside the requested part (Relative or Matrix).
// `mentions` and `categories` are parallel and belong to the record's
// document.
GivennessCounts clause_givenness(const ClauseRecord& record,
                                 std::span<const ReferentMention> mentions,
                                 std::span<const SalienceCategory> categories,
                                 ClausePart part);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Pearson chi-square for [[a, b], [c, d]] without continuity correction;
// p from the chi-square distribution with one degree of freedom. Throws
// std::invalid_argument("degenerate table") on a zero marginal.
ChiSquareResult chi_square_2x2(double a, double b, double c, double d);

struct GivennessRow {
  Variant variant;
  ClausePart part;
  std::size_t clauses = 0;
  GivennessCounts counts;
};

// Sums per variant x part over all records, extraposed rows last as in the
// published table (in-situ rc, in-situ matrix, extraposed rc, extraposed
// matrix).
std::vector<GivennessRow> givenness_table(
    std::span<const ClauseRecord> records,
    std::span<const ReferentMention> mentions,
    std::span<const SalienceCategory> categories);

std::string format_givenness_tsv(std::span<const GivennessRow> rows);

// New vs. non-new referents, in-situ vs. extraposed, one row per part.
std::string format_chi_square_tsv(std::span<const GivennessRow> rows);

}  // namespace uidkit
