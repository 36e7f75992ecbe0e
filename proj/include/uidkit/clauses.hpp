#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uidkit/accommodation.hpp"
#include "uidkit/corpus.hpp"
#include "uidkit/ngram.hpp"

namespace uidkit {

enum class Variant { InSitu, Extraposed };
enum class ClausePart { Relative, Matrix, Combined };
enum class ScoreMode { Bare, Accommodated };
enum class Linearization { Attested, Hypothetical };

std::string_view to_string(Variant v);       // in_situ | extraposed
std::string_view to_string(ClausePart p);    // rel. cl. | matrix cl. | combined
std::string_view to_string(ScoreMode m);     // bare | accommodated
std::string_view to_string(Linearization l); // attested | hypothetical
std::optional<Variant> parse_variant(std::string_view s);
Variant other(Variant v);

// Half-open interval of doc_positions.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > start ? end - start : 0; }
  bool contains(std::size_t p) const { return p >= start && p < end; }
  bool contains(const Span& s) const {
    return s.start >= start && s.end <= end;
  }
  bool overlaps(const Span& s) const {
    return start < s.end && s.start < end;
  }
  bool operator==(const Span&) const = default;
};

// A manually annotated relative clause and its matrix clause. The matrix has
// two spans when an in-situ relative clause splits it. `attachment` is the
// matrix position right after the head noun, where an in-situ relative
// clause is inserted.
struct ClauseRecord {
  std::string id;
  std::string doc_id;
  Variant variant = Variant::InSitu;
  std::vector<Span> matrix;
  Span rc;
  std::size_t attachment = 0;

  std::vector<std::size_t> matrix_positions() const;
  bool operator==(const ClauseRecord&) const = default;
};

// Problems with a record against its document; empty when valid.
std::vector<std::string> validate_clause(const ClauseRecord& record,
                                         const Document& doc);

// Parses the clause annotation JSON array and validates every record
// against `docs`. Collects all problems into one ValidationError; throws
// ParseError for malformed JSON.
std::vector<ClauseRecord> parse_clause_annotations(
    std::string_view json, std::span<const Document> docs);
std::string write_clause_annotations(std::span<const ClauseRecord> records);

struct LinearizedClause {
  std::vector<std::size_t> positions;  // doc_positions in clause order
  std::vector<ClausePart> parts;       // Relative or Matrix per position
  std::string initial_context;         // lemma before the clause, or <s>

  std::vector<std::string> lemmas(const Document& doc) const;
};

// InSitu: matrix before attachment, relative clause, rest of matrix.
// Extraposed: whole matrix, then the relative clause.
LinearizedClause relinearize(const ClauseRecord& record, const Document& doc,
                             Variant target);

struct ScoreRequest {
  ScoreMode mode = ScoreMode::Bare;
  ClausePart part = ClausePart::Relative;
  Linearization linearization = Linearization::Attested;
};

struct ScoreOptions {
  // Leave out the relative pronoun and the matrix-initial word.
  bool exclude_first_word = true;
  // For combined scoring: exclude both clause-initial words, or only the
  // first word of the whole clause complex.
  bool combined_excludes_both = true;
};

struct ScoredToken {
  std::size_t position = 0;
  std::string lemma;
  std::string context;
  double bits = 0.0;    // bare surprisal
  double factor = 1.0;  // accommodation factor (1 in bare mode)
  bool excluded = false;

  double value() const { return bits * factor; }
};

struct ClauseMetrics {
  double adS = 0.0;
  double avS = 0.0;
  std::size_t n_scored = 0;
  ScoreRequest request;
  std::vector<ScoredToken> tokens;
};

// `factors` comes from accommodation_factors() over the same document and is
// only read in accommodated mode. Throws ValidationError("clause too short
// to score") when nothing remains after exclusions.
ClauseMetrics clause_metrics(const ClauseRecord& record, const Document& doc,
                             const KneserNeyBigramModel& model,
                             std::span<const Observation> factors,
                             const ScoreRequest& request,
                             const ScoreOptions& options = {});

struct ScoredClause {
  Variant variant;
  ClauseMetrics metrics;
};

struct SummaryCell {
  Variant variant;
  ClausePart part;
  ScoreMode mode;
  Linearization linearization;
  std::size_t n = 0;
  double mean_adS = 0.0;
  double mean_avS = 0.0;
};

// Means of adS and avS per variant x part x mode x linearization, ordered
// extraposed before in-situ and rel. cl., matrix cl., combined within each.
std::vector<SummaryCell> aggregate_by_variant(
    std::span<const ScoredClause> scored);

// variant, n, part, adS, avS for the cells matching mode and linearization.
std::string format_summary_tsv(std::span<const SummaryCell> cells,
                               ScoreMode mode, Linearization linearization);
// variant, n, part, mode, adS, avS for the hypothetical cells.
std::string format_hypotheticals_tsv(std::span<const SummaryCell> cells);
// Aligned text rendering of one table.
std::string render_summary(std::span<const SummaryCell> cells, ScoreMode mode,
                           Linearization linearization);

}  // namespace uidkit
