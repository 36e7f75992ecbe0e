#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uidkit/accommodation.hpp"
#include "uidkit/clauses.hpp"
#include "uidkit/corpus.hpp"
#include "uidkit/givenness.hpp"
#include "uidkit/ngram.hpp"

namespace uidkit {

enum class CorpusFormat { Vertical, PlainText };

struct RunConfig {
  std::vector<std::string> corpus_paths;
  CorpusFormat corpus_format = CorpusFormat::Vertical;
  std::string punctuation = ".,;:?!/()„\"—";  // UTF-8
  bool resegment = true;

  std::vector<std::string> content_pos = ContentWordPolicy::default_pos_prefixes();
  std::optional<std::string> stoplist_path;
  FactorConfig factors;

  std::optional<double> discount;
  std::optional<double> unknown_mass;

  // ARPA file: written by train, read by the other commands when set.
  std::optional<std::string> model_path;
  std::optional<std::string> clauses_path;
  std::optional<std::string> referents_path;
  std::string output_dir = ".";

  SalienceOptions salience;
  ScoreOptions scoring;

  std::uint64_t seed = 0;  // reserved; the pipeline is deterministic

  // Checks parameter ranges (ValidationError) and that input paths exist
  // (InputError).
  void validate(bool need_model, bool need_annotations) const;
  // Canonical key=value text of every setting that affects results.
  std::string canonical() const;

  PunctuationPolicy punctuation_policy() const;
  ContentWordPolicy content_policy() const;
};

std::vector<Document> load_corpus(const RunConfig& config);

struct TrainReport {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;  // scored word tokens
  std::size_t vocabulary = 0;  // corpus lemmas, reserved symbols excluded
  std::size_t bigram_types = 0;
  double discount = 0.0;
  std::vector<std::string> warnings;

  std::string format() const;
};

struct TrainedModel {
  KneserNeyBigramModel model;
  TrainReport report;
};

TrainedModel train_model(std::span<const Document> docs,
                         const RunConfig& config);

// Trains on the corpus and writes the ARPA file to config.model_path.
TrainReport cmd_train(const RunConfig& config);

// Surprisal plus accommodation columns for the selected documents (all when
// doc_ids is empty). Throws InputError for an unknown document id.
std::string cmd_surprisal(const RunConfig& config,
                          const std::vector<std::string>& doc_ids);

struct ReportBundle {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

// table1.tsv, table2.tsv, table3.tsv, hypotheticals.tsv, chi_square.tsv and
// manifest.json, written to config.output_dir.
ReportBundle cmd_analyze(const RunConfig& config);

// table1.tsv and chi_square.tsv only.
ReportBundle cmd_givenness(const RunConfig& config);

// Hex SHA-256.
std::string sha256_hex(std::string_view data);

void write_bundle(const ReportBundle& bundle, const std::string& dir);

}  // namespace uidkit
