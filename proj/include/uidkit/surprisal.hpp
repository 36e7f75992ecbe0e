#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uidkit/corpus.hpp"
#include "uidkit/ngram.hpp"

namespace uidkit {

struct SurprisalEntry {
  // doc_position for document annotations, sequence index otherwise.
  std::size_t position = 0;
  std::string lemma;
  std::string context;
  double probability = 0.0;
  double surprisal_bits = 0.0;
};

struct SurprisalAnnotation {
  std::string doc_id;
  std::vector<SurprisalEntry> entries;
};

// -log10p / log10(2). Throws std::invalid_argument for positive input.
double log10_to_bits(double log10_prob);

double token_surprisal(const KneserNeyBigramModel& model,
                       std::string_view context, std::string_view word);

// One entry per word token. The context of a token is the preceding word
// lemma in its sentence, or <s>. Punctuation is skipped.
SurprisalAnnotation annotate_document(const KneserNeyBigramModel& model,
                                      const Document& doc);

// Scores lemmas left to right; the first is conditioned on initial_context.
// Throws std::invalid_argument on an empty sequence.
std::vector<SurprisalEntry> annotate_sequence(
    const KneserNeyBigramModel& model, std::span<const std::string> lemmas,
    std::string_view initial_context);

// doc, position, lemma, context, prob, surprisal_bits
std::string format_surprisal_tsv(std::span<const SurprisalAnnotation> docs);

}  // namespace uidkit
