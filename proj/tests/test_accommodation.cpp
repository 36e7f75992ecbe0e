#include <random>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "test_support.hpp"
#include "uidkit/accommodation.hpp"

using namespace uidkit;

namespace {

const std::vector<std::size_t> kTrace = {624, 656, 681, 702, 715, 1267, 2785};

// "und" everywhere except the traced lemma at the given ordinals.
Document trace_document(const std::vector<std::size_t>& at, std::size_t length) {
  std::vector<RawToken> raw;
  std::set<std::size_t> hits(at.begin(), at.end());
  for (std::size_t i = 0; i < length; ++i) {
    RawToken t;
    t.surface = t.lemma = hits.count(i) ? "Gnade" : "und";
    t.sentence_index = i / 20;
    raw.push_back(t);
  }
  return make_document("trace", std::move(raw));
}

}  // namespace

TEST_SUITE("accommodation") {

TEST_CASE("factor function") {
  const FactorConfig cfg;
  CHECK(factor(1, cfg) == 4.0);
  CHECK(factor(2, cfg) == 2.0);
  CHECK(factor(3, cfg) == 4.0 / 3.0);
  CHECK(factor(4, cfg) == 1.0);
  CHECK(factor(7, cfg) == 1.0);
  CHECK_THROWS_AS(factor(0, cfg), std::invalid_argument);
}

TEST_CASE("counter rule") {
  const FactorConfig cfg;
  CHECK(next_x(5, 552, cfg) == 3);
  CHECK(next_x(3, 1518, cfg) == 2);
  CHECK(next_x(1, 32, cfg) == 2);
  CHECK(next_x(4, 199, cfg) == 5);
  CHECK(next_x(4, 200, cfg) == 3);
  CHECK(next_x(4, 399, cfg) == 3);
  CHECK(next_x(4, 400, cfg) == 2);
}

TEST_CASE("config validation") {
  FactorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.floor = 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.bonus = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.window = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.wearout = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("golden trace through observe") {
  const FactorConfig cfg;
  AccommodationState state;
  std::vector<double> factors;
  std::vector<int> xs;
  for (auto p : kTrace) {
    const auto o = state.observe("Gnade", p, cfg);
    factors.push_back(o.factor);
    xs.push_back(o.x);
  }
  CHECK(factors == std::vector<double>{4.0, 2.0, 4.0 / 3.0, 1.0, 1.0, 4.0 / 3.0, 2.0});
  CHECK(xs == std::vector<int>{1, 2, 3, 4, 5, 3, 2});
}

TEST_CASE("observe edge cases") {
  const FactorConfig cfg;
  AccommodationState state;
  CHECK(state.observe("a", 10, cfg).x == 1);
  CHECK(state.observe("a", 11, cfg).x == 2);
  CHECK(state.observe("b", 3, cfg).factor == 4.0);
  CHECK_THROWS_WITH_AS(state.observe("a", 11, cfg),
                       "stream must be scanned in order", std::invalid_argument);
  CHECK_THROWS_AS(state.observe("a", 5, cfg), std::invalid_argument);
  CHECK(state.tracked_lemmas() == 2);
}

TEST_CASE("golden trace through a weighted document") {
  const auto doc = trace_document(kTrace, 2800);
  SurprisalAnnotation ann{"trace", {}};
  for (std::size_t i = 0; i < doc.word_count(); ++i) {
    ann.entries.push_back({i, doc.word_at(i).lemma, "", 0.5, 1.0});
  }
  const auto w = accommodate_document(ann, doc, ContentWordPolicy{}, FactorConfig{});
  std::vector<double> weighted;
  for (auto p : kTrace) weighted.push_back(w.entries[p].weighted);
  CHECK(weighted == std::vector<double>{4.0, 2.0, 4.0 / 3.0, 1.0, 1.0, 4.0 / 3.0, 2.0});
  CHECK(w.entries[0].weighted == 1.0);
  CHECK_FALSE(w.entries[0].content);
  CHECK(w.entries[624].content);
}

TEST_CASE("content word weighting") {
  std::vector<RawToken> raw{{"Gnade", "Gnade", "NN", 0}, {"und", "und", "KON", 0}};
  const auto doc = make_document("d", raw);
  SurprisalAnnotation ann{"d", {{0, "Gnade", "<s>", 0.1, 2.5}, {1, "und", "Gnade", 0.1, 3.0}}};
  const auto w = accommodate_document(ann, doc, ContentWordPolicy{}, FactorConfig{});
  CHECK(w.entries[0].weighted == 10.0);
  CHECK(w.entries[1].weighted == 3.0);
  CHECK(w.entries[1].x == 0);
}

TEST_CASE("misaligned annotation is rejected") {
  const auto doc = testing_support::doc_from_sentences("d", {"a b"});
  SurprisalAnnotation short_ann{"d", {{0, "a", "<s>", 0.5, 1.0}}};
  CHECK_THROWS_AS(accommodate_document(short_ann, doc, {}, {}), std::invalid_argument);
  SurprisalAnnotation wrong{"d", {{0, "a", "<s>", 0.5, 1.0}, {1, "c", "a", 0.5, 1.0}}};
  CHECK_THROWS_AS(accommodate_document(wrong, doc, {}, {}), std::invalid_argument);
}

TEST_CASE("content policy") {
  const ContentWordPolicy p;
  Token nn{"Herr", "Herr", "NN", 0, 0, false};
  Token vv{"gehet", "gehen", "VVIMP", 0, 0, false};
  Token art{"der", "der", "ART", 0, 0, false};
  Token untagged_fn{"vnd", "vnd", std::nullopt, 0, 0, false};
  Token untagged_cw{"Gott", "Gott", std::nullopt, 0, 0, false};
  Token punct{"/", "/", "$(", 0, 0, true};
  CHECK(p.is_content(nn));
  CHECK(p.is_content(vv));
  CHECK_FALSE(p.is_content(art));
  CHECK_FALSE(p.is_content(untagged_fn));
  CHECK(p.is_content(untagged_cw));
  CHECK_FALSE(p.is_content(punct));

  const auto stop = ContentWordPolicy::parse_stoplist("# comment\nGott\n\n  und \n");
  CHECK(stop == std::unordered_set<std::string>{"Gott", "und"});
  const ContentWordPolicy custom({"NN"}, stop);
  CHECK_FALSE(custom.is_content(untagged_cw));
  CHECK_FALSE(custom.is_content(vv));
}

TEST_CASE("property: weights come from {4, 2, 4/3, 1}") {
  std::mt19937_64 rng(21);
  const auto doc = testing_support::doc_from_sentences(
      "r", testing_support::random_sentences(rng, 5000, 60));
  const auto obs = accommodation_factors(doc, ContentWordPolicy{}, FactorConfig{});
  const std::set<double> allowed{4.0, 2.0, 4.0 / 3.0, 1.0};
  for (const auto& o : obs) CHECK(allowed.count(o.factor) == 1);
}

TEST_CASE("property: without decay the factors run B/1 .. B/(X-1), then 1") {
  FactorConfig cfg;
  cfg.window = FactorConfig::kNoDecay;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> gap(1, 5000);
  for (int trial = 0; trial < 50; ++trial) {
    AccommodationState state;
    std::size_t pos = 0;
    for (int k = 1; k <= 12; ++k) {
      pos += gap(rng);
      const auto o = state.observe("w", pos, cfg);
      CHECK(o.x == k);
      CHECK(o.factor == (k < 4 ? 4.0 / k : 1.0));
    }
  }
}

TEST_CASE("property: x never drops below the floor after decay") {
  const FactorConfig cfg;
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> gap(1, 1500);
  AccommodationState state;
  std::size_t pos = 0;
  bool first = true;
  for (int k = 0; k < 2000; ++k) {
    pos += gap(rng);
    const auto o = state.observe("w", pos, cfg);
    if (!first) CHECK(o.x >= cfg.floor);
    first = false;
  }
}

TEST_CASE("determinism") {
  std::mt19937_64 rng(1);
  const auto doc = testing_support::doc_from_sentences(
      "r", testing_support::random_sentences(rng, 1000, 50));
  const auto a = accommodation_factors(doc, {}, {});
  const auto b = accommodation_factors(doc, {}, {});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].factor == b[i].factor);
  }
}

}
