#include "uidkit/accommodation.hpp"

#include <algorithm>
#include <stdexcept>

#include "uidkit/report.hpp"

namespace uidkit {

void FactorConfig::validate() const {
  if (!(bonus > 0.0)) throw std::invalid_argument("bonus must be positive");
  if (wearout < 1) throw std::invalid_argument("wearout must be at least 1");
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  if (floor < 1 || floor > wearout) {
    throw std::invalid_argument("floor must lie in [1, wearout]");
  }
}

double factor(int x, const FactorConfig& cfg) {
  if (x < 1) throw std::invalid_argument("mention count must be at least 1");
  return x < cfg.wearout ? cfg.bonus / static_cast<double>(x) : 1.0;
}

int next_x(int prev_x, std::size_t gap, const FactorConfig& cfg) {
  if (gap < cfg.window) return prev_x + 1;
  const std::size_t windows = gap / cfg.window;
  const long long decayed =
      static_cast<long long>(prev_x) -
      static_cast<long long>(std::min<std::size_t>(windows, 1u << 30));
  return static_cast<int>(std::max<long long>(cfg.floor, decayed));
}

Observation AccommodationState::observe(std::string_view lemma,
                                        std::size_t position,
                                        const FactorConfig& cfg) {
  auto it = entries_.find(lemma);
  int x = 1;
  if (it == entries_.end()) {
    entries_.emplace(std::string(lemma), Entry{1, position});
  } else {
    if (position <= it->second.last_position) {
      throw std::invalid_argument("stream must be scanned in order");
    }
    x = next_x(it->second.x, position - it->second.last_position, cfg);
    it->second = Entry{x, position};
  }
  return {x, factor(x, cfg)};
}

ContentWordPolicy::ContentWordPolicy()
    : ContentWordPolicy(default_pos_prefixes(), default_stoplist()) {}

ContentWordPolicy::ContentWordPolicy(std::vector<std::string> pos_prefixes,
                                     std::unordered_set<std::string> stoplist)
    : prefixes_(std::move(pos_prefixes)), stoplist_(std::move(stoplist)) {}

bool ContentWordPolicy::is_content(const Token& token) const {
  if (token.is_punctuation) return false;
  if (token.pos) {
    return std::any_of(prefixes_.begin(), prefixes_.end(),
                       [&](const std::string& p) {
                         return token.pos->compare(0, p.size(), p) == 0;
                       });
  }
  return stoplist_.find(token.lemma) == stoplist_.end();
}

std::vector<std::string> ContentWordPolicy::default_pos_prefixes() {
  // noun, proper noun, full verb, adjective, adverb
  return {"NN", "NE", "VV", "ADJ", "ADV"};
}

std::unordered_set<std::string> ContentWordPolicy::default_stoplist() {
  // Modern and early-modern German function-word lemmata.
  return {
      "der",    "die",     "das",    "ein",     "eine",   "kein",   "welcher",
      "welche", "welches", "dieser", "jener",   "derselbe", "solch", "all",
      "jeder",  "ich",     "du",     "er",      "sie",    "es",     "wir",
      "ihr",    "sich",    "mein",   "dein",    "sein",   "unser",  "euer",
      "man",    "wer",     "was",    "und",     "vnd",    "vnnd",   "oder",
      "aber",   "denn",    "doch",   "sondern", "so",     "als",    "wie",
      "daß",    "dass",    "ob",      "wenn",   "wann",   "weil",
      "da",     "damit",   "dieweil", "auch",   "nicht",  "nit",    "in",
      "an",     "auf",     "auff",   "aus",     "auß",    "bei",    "bey",
      "mit",    "nach",    "von",    "vor",     "zu",     "für",    "vber",
      "über",   "unter",   "vnter",  "um",      "vmb",    "durch",  "gegen",
      "ohne",   "ohn",     "bis",    "biß",     "seit",   "haben",  "werden",
      "können", "müssen",  "sollen", "wollen",  "mögen",  "dürfen", "zum",
      "zur",    "im",      "am",     "vom",     "beim",   "ins",    "hie",
      "hier",   "dann",    "nun",    "noch",    "schon",  "ja",     "nein",
  };
}

std::unordered_set<std::string> ContentWordPolicy::parse_stoplist(
    std::string_view text) {
  std::unordered_set<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
      line.remove_prefix(1);
    if (!line.empty() && line.front() != '#') out.emplace(line);
    start = nl + 1;
  }
  return out;
}

std::vector<Observation> accommodation_factors(const Document& doc,
                                               const ContentWordPolicy& policy,
                                               const FactorConfig& cfg) {
  cfg.validate();
  std::vector<Observation> out(doc.word_count());
  AccommodationState state;
  for (const auto& t : doc.tokens()) {
    if (t.is_punctuation || !policy.is_content(t)) continue;
    out[t.doc_position] = state.observe(t.lemma, t.doc_position, cfg);
  }
  return out;
}

WeightedAnnotation accommodate_document(const SurprisalAnnotation& annotation,
                                        const Document& doc,
                                        const ContentWordPolicy& policy,
                                        const FactorConfig& cfg) {
  if (annotation.entries.size() != doc.word_count()) {
    throw std::invalid_argument("annotation has " +
                                std::to_string(annotation.entries.size()) +
                                " entries for " +
                                std::to_string(doc.word_count()) + " words");
  }
  const auto factors = accommodation_factors(doc, policy, cfg);
  WeightedAnnotation out;
  out.doc_id = annotation.doc_id;
  out.entries.reserve(annotation.entries.size());
  for (std::size_t i = 0; i < annotation.entries.size(); ++i) {
    const auto& e = annotation.entries[i];
    if (e.position != i || e.lemma != doc.word_at(i).lemma) {
      throw std::invalid_argument("annotation entry " + std::to_string(i) +
                                  " is not aligned to the document");
    }
    WeightedEntry w;
    w.base = e;
    w.x = factors[i].x;
    w.content = w.x > 0;
    w.factor = factors[i].factor;
    w.weighted = e.surprisal_bits * w.factor;
    out.entries.push_back(std::move(w));
  }
  return out;
}

std::string format_weighted_tsv(std::span<const WeightedAnnotation> docs) {
  std::string out =
      "doc\tposition\tlemma\tcontext\tprob\tsurprisal_bits\tx\tfactor\t"
      "weighted_surprisal\n";
  for (const auto& doc : docs) {
    for (const auto& w : doc.entries) {
      const auto& e = w.base;
      out += doc.doc_id + '\t' + std::to_string(e.position) + '\t' + e.lemma +
             '\t' + e.context + '\t' + format_real(e.probability) + '\t' +
             format_real(e.surprisal_bits) + '\t' + std::to_string(w.x) +
             '\t' + format_real(w.factor) + '\t' + format_real(w.weighted) +
             '\n';
    }
  }
  return out;
}

}  // namespace uidkit
