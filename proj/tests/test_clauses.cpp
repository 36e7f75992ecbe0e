#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "clause_support.hpp"
#include "test_support.hpp"
#include "uidkit/clauses.hpp"
#include "uidkit/error.hpp"

using namespace uidkit;
using testing_support::doc_from_sentences;
using testing_support::random_record;
using testing_support::realize;

namespace {

ClauseRecord in_situ_record() {
  // m1 m2 H r1 r2 m3 m4
  return {"is1", "d", Variant::InSitu, {{0, 3}, {5, 7}}, {3, 5}, 5};
}

ClauseRecord extraposed_record() {
  // m1 m2 H m3 m4 r1 r2
  return {"ex1", "e", Variant::Extraposed, {{0, 5}}, {5, 7}, 3};
}

std::vector<Document> clause_docs() {
  return {doc_from_sentences("d", {"m1 m2 H r1 r2 m3 m4"}),
          doc_from_sentences("e", {"m1 m2 H m3 m4 r1 r2"})};
}

KneserNeyBigramModel clause_model() {
  std::mt19937_64 rng(31);
  auto sentences = testing_support::random_sentences(rng, 2000, 40);
  sentences.push_back("m1 m2 H r1 r2 m3 m4");
  sentences.push_back("m1 m2 H m3 m4 r1 r2");
  const std::vector<Document> docs{doc_from_sentences("train", sentences)};
  return train_kn(count_bigrams(docs));
}

std::vector<std::string> lemmas_of(const LinearizedClause& l, const Document& d) {
  return l.lemmas(d);
}

}  // namespace

TEST_SUITE("clauses") {

TEST_CASE("labels") {
  CHECK(to_string(ClausePart::Relative) == "rel. cl.");
  CHECK(to_string(ClausePart::Matrix) == "matrix cl.");
  CHECK(to_string(ClausePart::Combined) == "combined");
  CHECK(parse_variant("in_situ") == Variant::InSitu);
  CHECK(parse_variant("extraposed") == Variant::Extraposed);
  CHECK_FALSE(parse_variant("bundled").has_value());
  CHECK(other(Variant::InSitu) == Variant::Extraposed);
}

TEST_CASE("relinearization definition") {
  const auto docs = clause_docs();
  const auto is = in_situ_record();
  using V = std::vector<std::string>;
  CHECK(lemmas_of(relinearize(is, docs[0], Variant::InSitu), docs[0]) ==
        V{"m1", "m2", "H", "r1", "r2", "m3", "m4"});
  CHECK(lemmas_of(relinearize(is, docs[0], Variant::Extraposed), docs[0]) ==
        V{"m1", "m2", "H", "m3", "m4", "r1", "r2"});
  const auto ex = extraposed_record();
  CHECK(lemmas_of(relinearize(ex, docs[1], Variant::Extraposed), docs[1]) ==
        V{"m1", "m2", "H", "m3", "m4", "r1", "r2"});
  CHECK(lemmas_of(relinearize(ex, docs[1], Variant::InSitu), docs[1]) ==
        V{"m1", "m2", "H", "r1", "r2", "m3", "m4"});
  CHECK(relinearize(is, docs[0], Variant::InSitu).initial_context == "<s>");
}

TEST_CASE("initial context is the preceding document lemma") {
  const auto doc = doc_from_sentences("d", {"so , m1 H r1 m2"});
  const ClauseRecord r{"c", "d", Variant::InSitu, {{1, 3}, {4, 5}}, {3, 4}, 4};
  CHECK(validate_clause(r, doc).empty());
  CHECK(relinearize(r, doc, Variant::InSitu).initial_context == "so");
}

TEST_CASE("validation") {
  const auto docs = clause_docs();
  CHECK(validate_clause(in_situ_record(), docs[0]).empty());
  CHECK(validate_clause(extraposed_record(), docs[1]).empty());

  auto r = extraposed_record();
  r.variant = Variant::InSitu;
  const auto issues = validate_clause(r, docs[1]);
  REQUIRE_FALSE(issues.empty());
  CHECK(issues[0].find("ex1") != std::string::npos);

  r = in_situ_record();
  r.variant = Variant::Extraposed;
  CHECK_FALSE(validate_clause(r, docs[0]).empty());

  r = extraposed_record();
  r.rc = {5, 9};
  CHECK_FALSE(validate_clause(r, docs[1]).empty());
  r = extraposed_record();
  r.rc = {4, 7};
  CHECK_FALSE(validate_clause(r, docs[1]).empty());
  r = extraposed_record();
  r.attachment = 0;
  CHECK_FALSE(validate_clause(r, docs[1]).empty());
  r = in_situ_record();
  r.attachment = 2;
  CHECK_FALSE(validate_clause(r, docs[0]).empty());
  r = in_situ_record();
  r.matrix = {};
  CHECK_FALSE(validate_clause(r, docs[0]).empty());
}

TEST_CASE("annotation JSON") {
  const auto docs = clause_docs();
  const std::string one =
      R"([{"id":"x","doc":"e","variant":"extraposed","matrix":[[0,5]],"rc":[5,7],"attachment":3}])";
  const auto recs = parse_clause_annotations(one, docs);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].rc == Span{5, 7});

  const std::vector<ClauseRecord> both{in_situ_record(), extraposed_record()};
  const auto text = write_clause_annotations(both);
  CHECK(parse_clause_annotations(text, docs) == both);

  try {
    parse_clause_annotations(
        R"([{"id":"a","doc":"d","variant":"in_situ","matrix":[[0,5]],"rc":[5,7],"attachment":3},
            {"id":"b","doc":"nope","variant":"extraposed","matrix":[[0,5]],"rc":[5,7],"attachment":3},
            {"id":"c","doc":"e","variant":"sideways","matrix":[[0,5]],"rc":[5,7],"attachment":3},
            {"id":"a","doc":"e","variant":"extraposed","matrix":[[0,5]],"rc":[5,7],"attachment":3}])",
        docs);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() == 4);
  }
  try {
    parse_clause_annotations("[\n{\"id\": }\n]", docs);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("five-token example: adS 12, avS 3") {
  Vocabulary v;
  for (const char* w : {"x", "y", "a", "b", "c", "d", "e"}) v.add(w);
  std::vector<double> uni(v.size(), 0.1);
  std::unordered_map<std::uint64_t, double> bi;
  auto set = [&](const char* a, const char* b, double p) {
    bi[KneserNeyBigramModel::key(v.id(a), v.id(b))] = p;
  };
  set("y", "a", 1.0 / 8);
  set("a", "b", 1.0 / 4);
  set("b", "c", 1.0 / 16);
  set("c", "d", 1.0 / 2);
  set("d", "e", 1.0 / 32);
  const KneserNeyBigramModel m(v, std::nullopt, uni,
                               std::vector<double>(v.size(), 1.0), bi);
  const auto doc = doc_from_sentences("f", {"x y a b c d e"});
  const ClauseRecord r{"five", "f", Variant::Extraposed, {{0, 2}}, {2, 7}, 1};
  REQUIRE(validate_clause(r, doc).empty());
  const auto met = clause_metrics(r, doc, m, {}, {ScoreMode::Bare, ClausePart::Relative});
  std::vector<double> bits;
  for (const auto& t : met.tokens) bits.push_back(t.bits);
  CHECK(bits == std::vector<double>{3, 2, 4, 1, 5});
  CHECK(met.tokens[0].excluded);
  CHECK(met.adS == 12.0);
  CHECK(met.avS == 3.0);
  CHECK(met.n_scored == 4);

  ScoreOptions keep;
  keep.exclude_first_word = false;
  const auto all = clause_metrics(r, doc, m, {}, {ScoreMode::Bare, ClausePart::Relative}, keep);
  CHECK(all.adS == 15.0);
  CHECK(all.n_scored == 5);
}

TEST_CASE("exclusions per part") {
  const auto docs = clause_docs();
  const auto m = clause_model();
  const auto is = in_situ_record();
  auto score = [&](ClausePart part, ScoreOptions opt = {}) {
    return clause_metrics(is, docs[0], m, {}, {ScoreMode::Bare, part}, opt);
  };
  CHECK(score(ClausePart::Relative).n_scored == 1);
  CHECK(score(ClausePart::Matrix).n_scored == 4);
  CHECK(score(ClausePart::Combined).n_scored == 5);
  ScoreOptions first_only;
  first_only.combined_excludes_both = false;
  CHECK(score(ClausePart::Combined, first_only).n_scored == 6);

  const auto matrix = score(ClausePart::Matrix);
  CHECK(matrix.tokens[3].lemma == "m3");
  CHECK(matrix.tokens[3].context == "H");
  const auto combined = score(ClausePart::Combined);
  CHECK(combined.tokens[5].context == "r2");
  CHECK(combined.tokens[5].bits == token_surprisal(m, "r2", "m3"));
  CHECK(matrix.tokens[3].bits == token_surprisal(m, "H", "m3"));
  CHECK(combined.adS == doctest::Approx(score(ClausePart::Relative).adS + matrix.adS -
                                        matrix.tokens[3].bits + combined.tokens[5].bits));
}

TEST_CASE("too short to score") {
  const auto doc = doc_from_sentences("s", {"m1 H r1"});
  const ClauseRecord r{"tiny", "s", Variant::Extraposed, {{0, 2}}, {2, 3}, 2};
  REQUIRE(validate_clause(r, doc).empty());
  const auto m = clause_model();
  CHECK_THROWS_WITH_AS(
      clause_metrics(r, doc, m, {}, {ScoreMode::Bare, ClausePart::Relative}),
      doctest::Contains("clause too short to score"), ValidationError);
}

TEST_CASE("accommodated scoring uses the document factors") {
  const auto docs = clause_docs();
  const auto m = clause_model();
  const auto factors = accommodation_factors(docs[0], {}, {});
  const auto is = in_situ_record();
  const auto bare = clause_metrics(is, docs[0], m, factors, {ScoreMode::Bare, ClausePart::Combined});
  const auto acc = clause_metrics(is, docs[0], m, factors, {ScoreMode::Accommodated, ClausePart::Combined});
  for (std::size_t i = 0; i < acc.tokens.size(); ++i) {
    CHECK(acc.tokens[i].value() == bare.tokens[i].bits * 4.0);
  }
  CHECK_THROWS_AS(clause_metrics(is, docs[0], m, {}, {ScoreMode::Accommodated, ClausePart::Combined}),
                  std::invalid_argument);
}

TEST_CASE("property: avS * n = adS exactly") {
  const auto m = clause_model();
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    auto [doc, r] = random_record(rng);
    REQUIRE(validate_clause(r, doc).empty());
    const auto factors = accommodation_factors(doc, {}, {});
    for (auto mode : {ScoreMode::Bare, ScoreMode::Accommodated}) {
      for (auto part : {ClausePart::Relative, ClausePart::Matrix, ClausePart::Combined}) {
        for (auto lin : {Linearization::Attested, Linearization::Hypothetical}) {
          ClauseMetrics met;
          try {
            met = clause_metrics(r, doc, m, factors, {mode, part, lin});
          } catch (const ValidationError&) {
            continue;
          }
          CHECK(met.avS * static_cast<double>(met.n_scored) == met.adS);
          CHECK(met.adS / static_cast<double>(met.n_scored) == met.avS);
          double sum = 0.0;
          for (const auto& t : met.tokens) {
            if (!t.excluded) sum += t.value();
          }
          CHECK(std::abs(met.adS - sum) <= 1e-12 * std::max(1.0, sum));
        }
      }
    }
  }
}

TEST_CASE("property: attested identity and variant round trip") {
  std::mt19937_64 rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    auto [doc, r] = random_record(rng);
    REQUIRE(validate_clause(r, doc).empty());
    const auto attested = relinearize(r, doc, r.variant);
    std::vector<std::size_t> sorted = attested.positions;
    std::sort(sorted.begin(), sorted.end());
    CHECK(attested.positions == sorted);

    auto [swapped_doc, swapped] = realize(r, doc, other(r.variant));
    if (!validate_clause(swapped, swapped_doc).empty()) {
      // extraposed clauses attached at the last matrix word have no
      // distinct in-situ order
      CHECK(r.variant == Variant::Extraposed);
      CHECK(r.attachment == r.matrix.back().end);
      continue;
    }
    const auto back = relinearize(swapped, swapped_doc, r.variant);
    CHECK(back.lemmas(swapped_doc) == attested.lemmas(doc));
    CHECK(back.parts == attested.parts);
  }
}

TEST_CASE("property: hypothetical scores differ only at re-contextualized tokens") {
  const auto m = clause_model();
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    auto [doc, r] = random_record(rng);
    const ScoreRequest att{ScoreMode::Bare, ClausePart::Combined, Linearization::Attested};
    const ScoreRequest hyp{ScoreMode::Bare, ClausePart::Combined, Linearization::Hypothetical};
    ScoreOptions keep;
    keep.exclude_first_word = false;
    const auto a = clause_metrics(r, doc, m, {}, att, keep);
    const auto h = clause_metrics(r, doc, m, {}, hyp, keep);
    std::map<std::size_t, const ScoredToken*> by_pos;
    for (const auto& t : a.tokens) by_pos[t.position] = &t;
    REQUIRE(by_pos.size() == h.tokens.size());
    for (const auto& t : h.tokens) {
      const auto* o = by_pos.at(t.position);
      if (o->context == t.context) CHECK(o->bits == t.bits);
    }
  }
}

TEST_CASE("property: accommodated over bare per token") {
  const auto m = clause_model();
  std::mt19937_64 rng(9);
  const std::set<double> allowed{4.0, 2.0, 4.0 / 3.0, 1.0};
  const ContentWordPolicy policy;
  for (int trial = 0; trial < 200; ++trial) {
    auto [doc, r] = random_record(rng);
    const auto factors = accommodation_factors(doc, policy, {});
    const auto acc = clause_metrics(r, doc, m, factors,
                                    {ScoreMode::Accommodated, ClausePart::Combined});
    for (const auto& t : acc.tokens) {
      const double ratio = t.value() / t.bits;
      if (policy.is_content(doc.word_at(t.position))) {
        CHECK(allowed.count(ratio) == 1);
      } else {
        CHECK(ratio == 1.0);
      }
    }
  }
}

TEST_CASE("aggregation") {
  auto cell = [](Variant v, ClausePart p, double ad, double av) {
    ClauseMetrics m;
    m.adS = ad;
    m.avS = av;
    m.n_scored = 1;
    m.request = {ScoreMode::Bare, p, Linearization::Attested};
    return ScoredClause{v, m};
  };
  const std::vector<ScoredClause> one{cell(Variant::InSitu, ClausePart::Relative, 12, 3)};
  const auto s1 = aggregate_by_variant(one);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].n == 1);
  CHECK(s1[0].mean_adS == 12.0);
  CHECK(s1[0].mean_avS == 3.0);

  const std::vector<ScoredClause> many{
      cell(Variant::InSitu, ClausePart::Relative, 10, 2),
      cell(Variant::InSitu, ClausePart::Relative, 14, 4),
      cell(Variant::InSitu, ClausePart::Combined, 30, 3),
      cell(Variant::Extraposed, ClausePart::Matrix, 20, 5),
      cell(Variant::Extraposed, ClausePart::Relative, 9, 3)};
  const auto s = aggregate_by_variant(many);
  REQUIRE(s.size() == 4);
  CHECK(s[0].variant == Variant::Extraposed);
  CHECK(s[0].part == ClausePart::Relative);
  CHECK(s[1].part == ClausePart::Matrix);
  CHECK(s[2].variant == Variant::InSitu);
  CHECK(s[2].mean_adS == 12.0);
  CHECK(s[2].n == 2);

  const auto tsv = format_summary_tsv(s, ScoreMode::Bare, Linearization::Attested);
  CHECK(tsv ==
        "variant\tn\tpart\tadS\tavS\n"
        "extraposed\t1\trel. cl.\t9.0000\t3.0000\n"
        "extraposed\t1\tmatrix cl.\t20.0000\t5.0000\n"
        "in_situ\t2\trel. cl.\t12.0000\t3.0000\n"
        "in_situ\t1\tcombined\t30.0000\t3.0000\n");
  CHECK(format_summary_tsv(s, ScoreMode::Accommodated, Linearization::Attested) ==
        "variant\tn\tpart\tadS\tavS\n");
  CHECK(render_summary(s, ScoreMode::Bare, Linearization::Attested).find("rel. cl.") !=
        std::string::npos);
}

}
