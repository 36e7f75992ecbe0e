// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "clause_support.hpp"
#include "oracles.hpp"
#include "test_support.hpp"
#include "uidkit/accommodation.hpp"
#include "uidkit/clauses.hpp"
#include "uidkit/error.hpp"
#include "uidkit/givenness.hpp"
#include "uidkit/ngram.hpp"
#include "uidkit/pipeline.hpp"
#include "uidkit/surprisal.hpp"

using namespace uidkit;
using testing_support::doc_from_sentences;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome chi_square_reproduction() {
  const auto r = chi_square_2x2(2, 20, 11, 35);
  return {std::abs(r.p_value - 0.1459) <= 0.0005,
          "p=" + fmt("%.6f", r.p_value) + " statistic=" + fmt("%.4f", r.statistic) +
              " (target 0.1459 +/- 0.0005)"};
}

Outcome golden_trace() {
  const FactorConfig cfg;
  AccommodationState state;
  const std::vector<double> expected{4.0, 2.0, 4.0 / 3.0, 1.0, 1.0, 4.0 / 3.0, 2.0};
  std::vector<double> got;
  for (std::size_t p : {624, 656, 681, 702, 715, 1267, 2785}) {
    got.push_back(state.observe("w", p, cfg).factor);
  }
  std::string detail = "factors=[";
  for (std::size_t i = 0; i < got.size(); ++i) {
    detail += (i ? "," : "") + fmt("%.6g", got[i]);
  }
  return {got == expected, detail + "] (exact)"};
}

Outcome normalization() {
  std::mt19937_64 rng(1000);
  const std::vector<Document> docs{doc_from_sentences(
      "n", testing_support::random_sentences(rng, 1000, 150))};
  const auto m = train_kn(count_bigrams(docs));
  const auto& v = m.vocabulary();
  std::uniform_int_distribution<WordId> pick(0, static_cast<WordId>(v.size() - 1));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::string ctx = i % 5 == 0 ? "unseen_" + std::to_string(i) : v.word(pick(rng));
    double sum = 0.0;
    for (WordId w = 1; w < v.size(); ++w) sum += m.prob(ctx, v.word(w));
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return {worst <= 1e-9, "max |sum-1|=" + fmt("%.3g", worst) + " over 100 contexts (tol 1e-9)"};
}

Outcome oracle_equivalence() {
  const std::vector<std::string> toy{"the cat sat", "the cat ran"};
  const std::vector<Document> toy_docs{doc_from_sentences("toy", toy)};
  TrainOptions closed;
  closed.unknown_mass = 0.0;
  const auto toy_model = train_kn(count_bigrams(toy_docs), closed);
  const double anchor = toy_model.prob("cat", "sat");
  const bool anchor_ok = toy_model.discount() == 0.5 && std::abs(anchor - 1.0 / 3.0) <= 1e-12;

  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto sentences = testing_support::random_sentences(rng, 8 + trial % 43, 2 + trial % 12);
    const auto raw = testing_support::split_sentences(sentences);
    const std::vector<Document> docs{doc_from_sentences("o", sentences)};
    const auto counts = count_bigrams(docs);
    for (std::optional<double> unk : {std::optional<double>{}, std::optional<double>{0.0}}) {
      TrainOptions opt;
      opt.unknown_mass = unk;
      double d = 0.5;
      try {
        d = estimate_discount(counts).value;
      } catch (const std::invalid_argument&) {
        opt.discount = d;
      }
      const auto m = train_kn(counts, opt);
      const oracle::BruteForceKn ref(raw, *m.discount(), unk);
      auto ctx = ref.outcomes();
      ctx.push_back("<s>");
      ctx.push_back("elsewhere");
      for (const auto& v : ctx) {
        for (const auto& w : ref.outcomes()) {
          worst = std::max(worst, std::abs(m.prob(v, w) - ref.prob(v, w)));
        }
      }
    }
  }
  return {anchor_ok && worst <= 1e-12,
          "p(sat|cat)=" + fmt("%.15f", anchor) + " max |model-oracle|=" + fmt("%.3g", worst) +
              " (tol 1e-12)"};
}

Outcome arpa_round_trip() {
  std::vector<KneserNeyBigramModel> models;
  const std::vector<Document> toy{doc_from_sentences("toy", {"the cat sat", "the cat ran"})};
  models.push_back(train_kn(count_bigrams(toy)));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    const std::vector<Document> docs{doc_from_sentences(
        "r", testing_support::random_sentences(rng, 2000, 20 + 60 * i))};
    models.push_back(train_kn(count_bigrams(docs)));
  }
  double worst = 0.0;
  bool stable = true;
  for (const auto& m : models) {
    const auto text = export_arpa(m);
    const auto back = import_arpa(text);
    const auto& v = m.vocabulary();
    for (WordId a = 0; a < v.size(); ++a) {
      for (WordId b = 0; b < v.size(); ++b) {
        worst = std::max(worst, std::abs(m.prob(v.word(a), v.word(b)) -
                                         back.prob(v.word(a), v.word(b))));
      }
    }
    stable = stable && export_arpa(back) == text;
  }
  return {worst <= 1e-6 && stable,
          "max |p-p'|=" + fmt("%.3g", worst) + " (tol 1e-6), re-export " +
              (stable ? "byte-identical" : "DIFFERS")};
}

// Half a unit in the sixth decimal of log10 p exceeds 1e-6 in p once p is
// above about 0.87, so the absolute tolerance cannot hold for every model.
double near_certain_round_trip_error() {
  std::vector<std::string> sentences(10000, "a b c d e f g h");
  sentences.push_back("a x");
  const std::vector<Document> docs{doc_from_sentences("c", sentences)};
  TrainOptions opt;
  opt.discount = 0.5;
  const auto m = train_kn(count_bigrams(docs), opt);
  const auto back = import_arpa(export_arpa(m));
  double worst = 0.0;
  for (WordId a = 0; a < m.vocabulary().size(); ++a) {
    for (WordId b = 0; b < m.vocabulary().size(); ++b) {
      worst = std::max(worst, std::abs(m.prob(a, b) - back.prob(a, b)));
    }
  }
  return worst;
}

Outcome surprisal_transform() {
  const double bits = log10_to_bits(-0.60206);
  Vocabulary v;
  v.add("a");
  v.add("b");
  const KneserNeyBigramModel half(v, std::nullopt, {0.0, 0.25, 0.0, 0.25, 0.5},
                                  std::vector<double>(v.size(), 1.0), {});
  const double one = token_surprisal(half, "a", "b");
  return {std::abs(bits - 2.0) <= 1e-4 && one == 1.0,
          "log10_to_bits(-0.60206)=" + fmt("%.6f", bits) + ", p=0.5 -> " + fmt("%.17g", one) +
              " bit"};
}

Outcome clause_metrics_identity() {
  // Five-token example.
  Vocabulary v;
  for (const char* w : {"x", "y", "a", "b", "c", "d", "e"}) v.add(w);
  std::unordered_map<std::uint64_t, double> bi;
  const std::vector<std::pair<const char*, const char*>> chain{
      {"y", "a"}, {"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "e"}};
  const double bits[] = {3, 2, 4, 1, 5};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    bi[KneserNeyBigramModel::key(v.id(chain[i].first), v.id(chain[i].second))] =
        std::exp2(-bits[i]);
  }
  const KneserNeyBigramModel m(v, std::nullopt, std::vector<double>(v.size(), 0.1),
                               std::vector<double>(v.size(), 1.0), bi);
  const auto doc = doc_from_sentences("f", {"x y a b c d e"});
  const ClauseRecord r{"five", "f", Variant::Extraposed, {{0, 2}}, {2, 7}, 1};
  const auto five = clause_metrics(r, doc, m, {}, {ScoreMode::Bare, ClausePart::Relative});
  const bool example_ok = five.adS == 12.0 && five.avS == 3.0;

  // Every clause of the bundled fixture in every scoring mode.
  RunConfig cfg;
  cfg.corpus_paths = {std::string(UIDKIT_FIXTURE_DIR) + "/corpus.vert"};
  const auto docs = load_corpus(cfg);
  const auto model = train_model(docs, cfg).model;
  const auto records = parse_clause_annotations(
      read_file(std::string(UIDKIT_FIXTURE_DIR) + "/clauses.json"), docs);
  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id[d.id()] = &d;
  std::size_t checked = 0, exact = 0;
  for (const auto& rec : records) {
    const auto& d = *by_id.at(rec.doc_id);
    const auto factors = accommodation_factors(d, {}, {});
    for (auto mode : {ScoreMode::Bare, ScoreMode::Accommodated}) {
      for (auto part : {ClausePart::Relative, ClausePart::Matrix, ClausePart::Combined}) {
        for (auto lin : {Linearization::Attested, Linearization::Hypothetical}) {
          const auto met = clause_metrics(rec, d, model, factors, {mode, part, lin});
          ++checked;
          if (met.avS * static_cast<double>(met.n_scored) == met.adS) ++exact;
        }
      }
    }
  }
  return {example_ok && exact == checked && checked > 0,
          "example adS=" + fmt("%g", five.adS) + " avS=" + fmt("%g", five.avS) + "; avS*n==adS in " +
              std::to_string(exact) + "/" + std::to_string(checked) + " fixture metrics"};
}

Outcome relinearization() {
  std::mt19937_64 rng(8);
  const std::vector<Document> train{doc_from_sentences(
      "t", testing_support::random_sentences(rng, 3000, 40))};
  const auto model = train_kn(count_bigrams(train));
  std::size_t identity = 0, round_trip = 0, seam_ok = 0;
  const std::size_t n = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    auto [doc, r] = testing_support::random_record(rng);
    const auto attested = relinearize(r, doc, r.variant);
    if (std::is_sorted(attested.positions.begin(), attested.positions.end()) &&
        attested.positions.size() == r.matrix_positions().size() + r.rc.size()) {
      ++identity;
    }

    auto [swapped_doc, swapped] = testing_support::realize(r, doc, other(r.variant));
    if (validate_clause(swapped, swapped_doc).empty()) {
      const auto back = relinearize(swapped, swapped_doc, r.variant);
      if (back.lemmas(swapped_doc) == attested.lemmas(doc) && back.parts == attested.parts) {
        ++round_trip;
      }
    } else if (r.variant == Variant::Extraposed && r.attachment == r.matrix.back().end) {
      // no distinct in-situ order exists
      ++round_trip;
    }

    ScoreOptions keep;
    keep.exclude_first_word = false;
    const auto a = clause_metrics(r, doc, model, {}, {ScoreMode::Bare, ClausePart::Combined,
                                                       Linearization::Attested}, keep);
    const auto h = clause_metrics(r, doc, model, {}, {ScoreMode::Bare, ClausePart::Combined,
                                                       Linearization::Hypothetical}, keep);
    std::map<std::size_t, const ScoredToken*> by_pos;
    for (const auto& t : a.tokens) by_pos[t.position] = &t;
    bool ok = by_pos.size() == h.tokens.size();
    for (const auto& t : h.tokens) {
      const auto* o = by_pos.at(t.position);
      if (o->context == t.context && o->bits != t.bits) ok = false;
    }
    if (ok) ++seam_ok;
  }
  return {identity == n && round_trip == n && seam_ok == n,
          "identity " + std::to_string(identity) + "/" + std::to_string(n) + ", round trip " +
              std::to_string(round_trip) + "/" + std::to_string(n) + ", seam-only changes " +
              std::to_string(seam_ok) + "/" + std::to_string(n)};
}

Outcome end_to_end() {
  RunConfig cfg;
  const std::string dir = UIDKIT_FIXTURE_DIR;
  cfg.corpus_paths = {dir + "/corpus.vert"};
  cfg.clauses_path = dir + "/clauses.json";
  cfg.referents_path = dir + "/referents.tsv";
  const auto a = cmd_analyze(cfg);
  const auto b = cmd_analyze(cfg);
  bool rows = true;
  for (const auto& [name, text] : a.files) {
    if (name != "table2.tsv" && name != "table3.tsv") continue;
    for (const char* label : {"\trel. cl.\t", "\tmatrix cl.\t", "\tcombined\t"}) {
      rows = rows && text.find(label) != std::string::npos;
    }
  }
  const bool same = a.files == b.files;
  return {same && rows && a.files.size() == 6,
          std::to_string(a.files.size()) + " files, " +
              (same ? "byte-identical" : "DIFFERENT") + " across runs, table 2/3 rows " +
              (rows ? "complete" : "MISSING")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"chi-square reproduction", chi_square_reproduction},
      {"accommodation golden trace", golden_trace},
      {"KN normalization", normalization},
      {"KN oracle equivalence", oracle_equivalence},
      {"ARPA round trip", arpa_round_trip},
      {"surprisal transform", surprisal_transform},
      {"clause metrics", clause_metrics_identity},
      {"re-linearization", relinearization},
      {"end-to-end determinism", end_to_end},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("[INFO] 5. ARPA round trip on near-certain transitions (p ~ 0.99986): "
              "max |p-p'|=%.3g; six-decimal log10 output bounds the error by "
              "2.3e-6 * p, not 1e-6\n",
              near_certain_round_trip_error());
  std::printf("[INFO] 10. published table values: not reproducible without the "
              "annotated DTA subcorpus (see README)\n");
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
