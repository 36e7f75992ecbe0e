#include "uidkit/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uidkit/error.hpp"

namespace uidkit {

Vocabulary::Vocabulary() {
  add(kSentenceStart);
  add(kSentenceEnd);
  add(kUnknown);
}

WordId Vocabulary::add(std::string_view lemma) {
  if (auto it = index_.find(lemma); it != index_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(lemma);
  index_.emplace(words_.back(), id);
  return id;
}

WordId Vocabulary::id(std::string_view lemma) const {
  auto it = index_.find(lemma);
  return it == index_.end() ? kUnknownId : it->second;
}

bool Vocabulary::contains(std::string_view lemma) const {
  return index_.find(lemma) != index_.end();
}

bool Vocabulary::is_reserved(std::string_view lemma) {
  return lemma == kSentenceStart || lemma == kSentenceEnd || lemma == kUnknown;
}

std::uint64_t BigramCounts::lookup(const Map& m, std::string_view key) {
  auto it = m.find(key);
  return it == m.end() ? 0 : it->second;
}

void BigramCounts::add_unigram(const std::string& w, std::uint64_t n) {
  c1_[w] += n;
  total_tokens_ += n;
}

void BigramCounts::add_bigram(const std::string& v, const std::string& w,
                              std::uint64_t n) {
  auto [it, inserted] = c2_.try_emplace({v, w}, 0);
  it->second += n;
  context_total_[v] += n;
  if (inserted) {
    ++continuation_[w];
    ++fertility_[v];
    ++bigram_types_;
  }
}

void BigramCounts::merge(const BigramCounts& other) {
  for (const auto& [w, n] : other.c1_) add_unigram(w, n);
  for (const auto& [vw, n] : other.c2_) add_bigram(vw.first, vw.second, n);
}

std::uint64_t BigramCounts::unigram(std::string_view w) const {
  return lookup(c1_, w);
}

std::uint64_t BigramCounts::bigram(std::string_view v,
                                   std::string_view w) const {
  auto it = c2_.find({std::string(v), std::string(w)});
  return it == c2_.end() ? 0 : it->second;
}

std::uint64_t BigramCounts::context_total(std::string_view v) const {
  return lookup(context_total_, v);
}

std::uint64_t BigramCounts::continuation(std::string_view w) const {
  return lookup(continuation_, w);
}

std::uint64_t BigramCounts::fertility(std::string_view v) const {
  return lookup(fertility_, v);
}

std::uint64_t BigramCounts::count_of_counts(std::uint64_t n) const {
  return static_cast<std::uint64_t>(
      std::count_if(c2_.begin(), c2_.end(),
                    [n](const auto& kv) { return kv.second == n; }));
}

std::vector<std::string> BigramCounts::sorted_lemmas() const {
  std::vector<std::string> out;
  out.reserve(c1_.size());
  for (const auto& [w, n] : c1_) {
    if (!Vocabulary::is_reserved(w)) out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
BigramCounts::sorted_bigrams() const {
  std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
      out(c2_.begin(), c2_.end());
  std::sort(out.begin(), out.end());
  return out;
}

void count_sentence(BigramCounts& counts,
                    std::span<const std::string_view> lemmas) {
  if (lemmas.empty()) return;
  std::string prev(kSentenceStart);
  counts.add_unigram(prev);
  for (auto lemma : lemmas) {
    if (Vocabulary::is_reserved(lemma)) {
      throw std::invalid_argument("corpus lemma '" + std::string(lemma) +
                                  "' collides with a reserved symbol");
    }
    std::string cur(lemma);
    counts.add_unigram(cur);
    counts.add_bigram(prev, cur);
    prev = std::move(cur);
  }
  const std::string end(kSentenceEnd);
  counts.add_unigram(end);
  counts.add_bigram(prev, end);
}

BigramCounts count_bigrams(std::span<const Document> docs,
                           bool include_punctuation) {
  BigramCounts counts;
  std::vector<std::string_view> sentence;
  for (const auto& doc : docs) {
    std::size_t current = 0;
    sentence.clear();
    for (const auto& entry : lemma_stream(doc, include_punctuation)) {
      if (entry.sentence_index != current) {
        count_sentence(counts, sentence);
        sentence.clear();
        current = entry.sentence_index;
      }
      sentence.push_back(entry.lemma);
    }
    count_sentence(counts, sentence);
  }
  return counts;
}

DiscountEstimate estimate_discount(const BigramCounts& counts) {
  DiscountEstimate est;
  est.n1 = counts.count_of_counts(1);
  est.n2 = counts.count_of_counts(2);
  if (est.n1 == 0 && est.n2 == 0) {
    throw std::invalid_argument(
        "degenerate counts; supply an explicit discount");
  }
  const double raw = static_cast<double>(est.n1) /
                     (static_cast<double>(est.n1) + 2.0 * static_cast<double>(est.n2));
  est.value = std::clamp(raw, kDiscountEpsilon, 1.0 - kDiscountEpsilon);
  if (est.value != raw) {
    est.warning = "discount estimate " + std::to_string(raw) + " (n1=" +
                  std::to_string(est.n1) + ", n2=" + std::to_string(est.n2) +
                  ") clamped to " + std::to_string(est.value);
  }
  return est;
}

KneserNeyBigramModel::KneserNeyBigramModel(
    Vocabulary vocab, std::optional<double> discount,
    std::vector<double> unigram, std::vector<double> backoff,
    std::unordered_map<std::uint64_t, double> bigrams)
    : vocab_(std::move(vocab)),
      discount_(discount),
      unigram_(std::move(unigram)),
      backoff_(std::move(backoff)),
      bigrams_(std::move(bigrams)) {
  if (unigram_.size() != vocab_.size() || backoff_.size() != vocab_.size()) {
    throw InvariantError("model tables do not match the vocabulary size");
  }
}

double KneserNeyBigramModel::prob(std::string_view context,
                                  std::string_view word) const {
  return prob(vocab_.id(context), vocab_.id(word));
}

double KneserNeyBigramModel::prob(WordId context, WordId word) const {
  if (auto it = bigrams_.find(key(context, word)); it != bigrams_.end()) {
    return it->second;
  }
  return backoff_[context] * unigram_[word];
}

std::optional<double> KneserNeyBigramModel::bigram(WordId v, WordId w) const {
  auto it = bigrams_.find(key(v, w));
  if (it == bigrams_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::pair<WordId, WordId>, double>>
KneserNeyBigramModel::sorted_bigrams() const {
  std::vector<std::pair<std::pair<WordId, WordId>, double>> out;
  out.reserve(bigrams_.size());
  for (const auto& [k, p] : bigrams_) {
    out.push_back({{static_cast<WordId>(k >> 32),
                    static_cast<WordId>(k & 0xffffffffu)},
                   p});
  }
  std::sort(out.begin(), out.end());
  return out;
}

KneserNeyBigramModel train_kn(const BigramCounts& counts,
                              const TrainOptions& options) {
  const std::uint64_t types = counts.total_bigram_types();
  if (types == 0) {
    throw std::invalid_argument("cannot train on an empty corpus");
  }
  double discount = 0.0;
  if (options.discount) {
    discount = *options.discount;
    if (!(discount > 0.0 && discount < 1.0)) {
      throw std::invalid_argument("discount must lie in (0, 1)");
    }
  } else {
    discount = estimate_discount(counts).value;
  }
  const double unk_mass =
      options.unknown_mass.value_or(1.0 / (static_cast<double>(types) + 1.0));
  if (!(unk_mass >= 0.0 && unk_mass < 1.0)) {
    throw std::invalid_argument("unknown-word mass must lie in [0, 1)");
  }

  Vocabulary vocab;
  for (const auto& lemma : counts.sorted_lemmas()) vocab.add(lemma);
  const std::size_t n = vocab.size();

  std::vector<double> unigram(n, 0.0);
  std::vector<double> backoff(n, 1.0);
  const double total = static_cast<double>(types);
  for (WordId w = 0; w < n; ++w) {
    const auto cont = static_cast<double>(counts.continuation(vocab.word(w)));
    unigram[w] = (1.0 - unk_mass) * cont / total;
  }
  unigram[Vocabulary::kUnknownId] += unk_mass;

  for (WordId v = 0; v < n; ++v) {
    const auto ctx = counts.context_total(vocab.word(v));
    if (ctx == 0) continue;
    const auto fert = static_cast<double>(counts.fertility(vocab.word(v)));
    backoff[v] = discount * fert / static_cast<double>(ctx);
  }

  std::unordered_map<std::uint64_t, double> bigrams;
  bigrams.reserve(types);
  for (const auto& [vw, c] : counts.sorted_bigrams()) {
    const WordId v = vocab.id(vw.first);
    const WordId w = vocab.id(vw.second);
    const auto ctx = static_cast<double>(counts.context_total(vw.first));
    const double p = std::max(static_cast<double>(c) - discount, 0.0) / ctx +
                     backoff[v] * unigram[w];
    bigrams.emplace(KneserNeyBigramModel::key(v, w), p);
  }
  return KneserNeyBigramModel(std::move(vocab), discount, std::move(unigram),
                              std::move(backoff), std::move(bigrams));
}

double perplexity(const KneserNeyBigramModel& model,
                  std::span<const Document> docs, bool include_punctuation) {
  const auto& vocab = model.vocabulary();
  double bits = 0.0;
  std::size_t events = 0;
  for (const auto& doc : docs) {
    WordId prev = Vocabulary::kStartId;
    bool open = false;
    std::size_t current = 0;
    auto close = [&] {
      if (!open) return;
      bits -= std::log2(model.prob(prev, Vocabulary::kEndId));
      ++events;
      prev = Vocabulary::kStartId;
      open = false;
    };
    for (const auto& entry : lemma_stream(doc, include_punctuation)) {
      if (entry.sentence_index != current) {
        close();
        current = entry.sentence_index;
      }
      const WordId w = vocab.id(entry.lemma);
      bits -= std::log2(model.prob(prev, w));
      ++events;
      prev = w;
      open = true;
    }
    close();
  }
  if (events == 0) {
    throw std::invalid_argument("perplexity of an empty corpus is undefined");
  }
  return std::exp2(bits / static_cast<double>(events));
}

}  // namespace uidkit
