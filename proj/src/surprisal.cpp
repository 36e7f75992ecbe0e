#include "uidkit/surprisal.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "uidkit/report.hpp"

namespace uidkit {

double log10_to_bits(double log10_prob) {
  if (log10_prob > 0.0) {
    throw std::invalid_argument("log10 probability must not be positive");
  }
  if (log10_prob == 0.0) return 0.0;
  return -log10_prob / std::log10(2.0);
}

double token_surprisal(const KneserNeyBigramModel& model,
                       std::string_view context, std::string_view word) {
  return -std::log2(model.prob(context, word));
}

SurprisalAnnotation annotate_document(const KneserNeyBigramModel& model,
                                      const Document& doc) {
  SurprisalAnnotation out;
  out.doc_id = doc.id();
  out.entries.reserve(doc.word_count());
  std::string_view context = kSentenceStart;
  std::size_t sentence = 0;
  for (const auto& t : doc.tokens()) {
    if (t.sentence_index != sentence) {
      sentence = t.sentence_index;
      context = kSentenceStart;
    }
    if (t.is_punctuation) continue;
    SurprisalEntry e;
    e.position = t.doc_position;
    e.lemma = t.lemma;
    e.context = std::string(context);
    e.probability = model.prob(context, t.lemma);
    e.surprisal_bits = -std::log2(e.probability);
    out.entries.push_back(std::move(e));
    context = t.lemma;
  }
  return out;
}

std::vector<SurprisalEntry> annotate_sequence(
    const KneserNeyBigramModel& model, std::span<const std::string> lemmas,
    std::string_view initial_context) {
  if (lemmas.empty()) {
    throw std::invalid_argument("cannot annotate an empty sequence");
  }
  std::vector<SurprisalEntry> out;
  out.reserve(lemmas.size());
  std::string_view context = initial_context;
  for (std::size_t i = 0; i < lemmas.size(); ++i) {
    SurprisalEntry e;
    e.position = i;
    e.lemma = lemmas[i];
    e.context = std::string(context);
    e.probability = model.prob(context, lemmas[i]);
    e.surprisal_bits = -std::log2(e.probability);
    out.push_back(std::move(e));
    context = lemmas[i];
  }
  return out;
}

std::string format_surprisal_tsv(std::span<const SurprisalAnnotation> docs) {
  std::string out = "doc\tposition\tlemma\tcontext\tprob\tsurprisal_bits\n";
  for (const auto& doc : docs) {
    for (const auto& e : doc.entries) {
      out += doc.doc_id;
      out += '\t';
      out += std::to_string(e.position);
      out += '\t';
      out += e.lemma;
      out += '\t';
      out += e.context;
      out += '\t';
      out += format_real(e.probability);
      out += '\t';
      out += format_real(e.surprisal_bits);
      out += '\n';
    }
  }
  return out;
}

}  // namespace uidkit
