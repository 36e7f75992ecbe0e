#include "uidkit/clauses.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

#include "json.hpp"
#include "uidkit/error.hpp"
#include "uidkit/report.hpp"
#include "uidkit/surprisal.hpp"

namespace uidkit {

std::string_view to_string(Variant v) {
  return v == Variant::InSitu ? "in_situ" : "extraposed";
}

std::string_view to_string(ClausePart p) {
  switch (p) {
    case ClausePart::Relative:
      return "rel. cl.";
    case ClausePart::Matrix:
      return "matrix cl.";
    case ClausePart::Combined:
      return "combined";
  }
  return "?";
}

std::string_view to_string(ScoreMode m) {
  return m == ScoreMode::Bare ? "bare" : "accommodated";
}

std::string_view to_string(Linearization l) {
  return l == Linearization::Attested ? "attested" : "hypothetical";
}

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "in_situ") return Variant::InSitu;
  if (s == "extraposed") return Variant::Extraposed;
  return std::nullopt;
}

Variant other(Variant v) {
  return v == Variant::InSitu ? Variant::Extraposed : Variant::InSitu;
}

std::vector<std::size_t> ClauseRecord::matrix_positions() const {
  std::vector<std::size_t> out;
  for (const auto& s : matrix) {
    for (std::size_t p = s.start; p < s.end; ++p) out.push_back(p);
  }
  return out;
}

std::vector<std::string> validate_clause(const ClauseRecord& r,
                                         const Document& doc) {
  std::vector<std::string> problems;
  auto bad = [&](const std::string& what) {
    problems.push_back("record " + r.id + ": " + what);
  };
  const std::size_t words = doc.word_count();
  auto span_str = [](const Span& s) {
    return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
  };

  if (r.matrix.empty() || r.matrix.size() > 2) {
    bad("matrix must have one or two spans");
    return problems;
  }
  for (const auto& s : r.matrix) {
    if (s.size() == 0) bad("empty matrix span " + span_str(s));
    if (s.end > words) bad("matrix span " + span_str(s) + " outside document");
  }
  if (r.rc.size() == 0) bad("empty relative-clause span");
  if (r.rc.end > words) bad("rc span " + span_str(r.rc) + " outside document");
  if (r.matrix.size() == 2 && r.matrix[0].end > r.matrix[1].start) {
    bad("matrix spans must be sorted and non-overlapping");
  }
  for (const auto& s : r.matrix) {
    if (s.overlaps(r.rc)) bad("rc overlaps matrix span " + span_str(s));
  }
  if (!problems.empty()) return problems;

  const auto matrix = r.matrix_positions();
  const std::size_t matrix_first = matrix.front();
  const std::size_t matrix_end = matrix.back() + 1;

  if (r.variant == Variant::InSitu) {
    std::optional<std::size_t> last_before, first_after;
    for (auto p : matrix) {
      if (p < r.rc.start) last_before = p;
      if (p >= r.rc.end && !first_after) first_after = p;
    }
    if (!last_before || !first_after) {
      bad("in_situ rc must lie strictly inside the matrix clause");
    } else if (r.attachment <= *last_before || r.attachment > *first_after) {
      bad("attachment " + std::to_string(r.attachment) +
          " must separate the matrix material around the in_situ rc");
    }
  } else {
    if (r.rc.start < matrix_end) {
      bad("extraposed rc must follow all matrix material");
    }
    if (r.attachment <= matrix_first || r.attachment > matrix_end) {
      bad("attachment " + std::to_string(r.attachment) +
          " lies outside the matrix clause");
    }
  }
  return problems;
}

namespace {

// Rounds sum / n to the nearest value m with m * n exact in double
// precision, so that adS = m * n and avS = m satisfy both identities.
double exact_mean(double sum, std::size_t count) {
  const double n = static_cast<double>(count);
  double m = sum / n;
  if (m == 0.0 || !std::isfinite(m)) return m;
  for (int k = 0; std::fma(m, n, -(m * n)) != 0.0 && k < 64; ++k) {
    const double scale = std::ldexp(1.0, std::ilogb(m) - 52 + k + 1);
    m = std::nearbyint(sum / n / scale) * scale;
  }
  return m;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

std::optional<Span> read_span(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() ||
      !j[1].is_number_unsigned()) {
    return std::nullopt;
  }
  return Span{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

}  // namespace

std::vector<ClauseRecord> parse_clause_annotations(
    std::string_view text, std::span<const Document> docs) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_of(text, e.byte), e.what());
  }
  if (!root.is_array()) {
    throw ParseError(1, "clause annotations must be a JSON array");
  }

  std::unordered_map<std::string_view, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id(), &d);

  std::vector<ClauseRecord> records;
  std::vector<std::string> problems;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const auto& j = root[i];
    const std::string label =
        j.is_object() && j.contains("id") && j["id"].is_string()
            ? j["id"].get<std::string>()
            : "#" + std::to_string(i);
    auto bad = [&](const std::string& what) {
      problems.push_back("record " + label + ": " + what);
    };
    if (!j.is_object()) {
      bad("not an object");
      continue;
    }
    ClauseRecord r;
    r.id = label;
    bool ok = true;
    if (!j.contains("id") || !j["id"].is_string()) {
      bad("missing string field 'id'");
      ok = false;
    }
    if (!j.contains("doc") || !j["doc"].is_string()) {
      bad("missing string field 'doc'");
      ok = false;
    } else {
      r.doc_id = j["doc"].get<std::string>();
    }
    if (!j.contains("variant") || !j["variant"].is_string()) {
      bad("missing string field 'variant'");
      ok = false;
    } else if (auto v = parse_variant(j["variant"].get<std::string>())) {
      r.variant = *v;
    } else {
      bad("unknown variant '" + j["variant"].get<std::string>() + "'");
      ok = false;
    }
    if (!j.contains("matrix") || !j["matrix"].is_array()) {
      bad("missing array field 'matrix'");
      ok = false;
    } else {
      for (const auto& s : j["matrix"]) {
        if (auto span = read_span(s)) {
          r.matrix.push_back(*span);
        } else {
          bad("matrix spans must be [start, end] pairs");
          ok = false;
          break;
        }
      }
    }
    if (auto span = j.contains("rc") ? read_span(j["rc"]) : std::nullopt) {
      r.rc = *span;
    } else {
      bad("missing [start, end] field 'rc'");
      ok = false;
    }
    if (!j.contains("attachment") || !j["attachment"].is_number_unsigned()) {
      bad("missing non-negative integer field 'attachment'");
      ok = false;
    } else {
      r.attachment = j["attachment"].get<std::size_t>();
    }
    if (!ok) continue;
    if (!seen.emplace(r.id, i).second) {
      bad("duplicate record id");
      continue;
    }
    auto doc = by_id.find(r.doc_id);
    if (doc == by_id.end()) {
      bad("unknown document '" + r.doc_id + "'");
      continue;
    }
    auto issues = validate_clause(r, *doc->second);
    if (!issues.empty()) {
      problems.insert(problems.end(), issues.begin(), issues.end());
      continue;
    }
    records.push_back(std::move(r));
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return records;
}

std::string write_clause_annotations(std::span<const ClauseRecord> records) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["doc"] = r.doc_id;
    j["variant"] = std::string(to_string(r.variant));
    auto matrix = nlohmann::ordered_json::array();
    for (const auto& s : r.matrix) matrix.push_back({s.start, s.end});
    j["matrix"] = matrix;
    j["rc"] = {r.rc.start, r.rc.end};
    j["attachment"] = r.attachment;
    out.push_back(std::move(j));
  }
  return out.dump(1) + "\n";
}

std::vector<std::string> LinearizedClause::lemmas(const Document& doc) const {
  std::vector<std::string> out;
  out.reserve(positions.size());
  for (auto p : positions) out.push_back(doc.word_at(p).lemma);
  return out;
}

namespace {

// Lemma of the nearest preceding word in the same sentence, or <s>.
std::string preceding_lemma(const Document& doc, std::size_t position) {
  const auto& tokens = doc.tokens();
  std::size_t i = doc.token_index(position);
  const std::size_t sentence = tokens[i].sentence_index;
  while (i > 0) {
    --i;
    if (tokens[i].sentence_index != sentence) break;
    if (!tokens[i].is_punctuation) return tokens[i].lemma;
  }
  return std::string(kSentenceStart);
}

}  // namespace

LinearizedClause relinearize(const ClauseRecord& record, const Document& doc,
                             Variant target) {
  const auto matrix = record.matrix_positions();
  LinearizedClause out;
  out.initial_context =
      preceding_lemma(doc, std::min(matrix.front(), record.rc.start));
  auto push_matrix = [&](auto first, auto last) {
    for (auto it = first; it != last; ++it) {
      out.positions.push_back(*it);
      out.parts.push_back(ClausePart::Matrix);
    }
  };
  auto push_rc = [&] {
    for (auto p = record.rc.start; p < record.rc.end; ++p) {
      out.positions.push_back(p);
      out.parts.push_back(ClausePart::Relative);
    }
  };
  if (target == Variant::InSitu) {
    auto split = std::lower_bound(matrix.begin(), matrix.end(),
                                  record.attachment);
    push_matrix(matrix.begin(), split);
    push_rc();
    push_matrix(split, matrix.end());
  } else {
    push_matrix(matrix.begin(), matrix.end());
    push_rc();
  }
  return out;
}

ClauseMetrics clause_metrics(const ClauseRecord& record, const Document& doc,
                             const KneserNeyBigramModel& model,
                             std::span<const Observation> factors,
                             const ScoreRequest& request,
                             const ScoreOptions& options) {
  const Variant target = request.linearization == Linearization::Attested
                             ? record.variant
                             : other(record.variant);
  const auto lin = relinearize(record, doc, target);

  std::vector<std::size_t> positions;
  std::string context = lin.initial_context;
  for (std::size_t i = 0; i < lin.positions.size(); ++i) {
    const bool take =
        request.part == ClausePart::Combined ||
        (request.part == ClausePart::Relative &&
         lin.parts[i] == ClausePart::Relative) ||
        (request.part == ClausePart::Matrix && lin.parts[i] == ClausePart::Matrix);
    if (!take) continue;
    if (positions.empty() && request.part == ClausePart::Relative && i > 0) {
      context = doc.word_at(lin.positions[i - 1]).lemma;
    }
    positions.push_back(lin.positions[i]);
  }

  std::vector<std::size_t> excluded;
  if (options.exclude_first_word) {
    const std::size_t matrix_first = record.matrix.front().start;
    switch (request.part) {
      case ClausePart::Relative:
        excluded.push_back(record.rc.start);
        break;
      case ClausePart::Matrix:
        excluded.push_back(matrix_first);
        break;
      case ClausePart::Combined:
        excluded.push_back(positions.front());
        if (options.combined_excludes_both) {
          excluded.push_back(matrix_first);
          excluded.push_back(record.rc.start);
        }
        break;
    }
  }

  std::vector<std::string> lemmas;
  lemmas.reserve(positions.size());
  for (auto p : positions) lemmas.push_back(doc.word_at(p).lemma);
  const auto entries = annotate_sequence(model, lemmas, context);

  if (request.mode == ScoreMode::Accommodated &&
      factors.size() != doc.word_count()) {
    throw std::invalid_argument("accommodation factors do not cover document " +
                                doc.id());
  }

  ClauseMetrics m;
  m.request = request;
  m.tokens.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    ScoredToken t;
    t.position = positions[i];
    t.lemma = entries[i].lemma;
    t.context = entries[i].context;
    t.bits = entries[i].surprisal_bits;
    if (request.mode == ScoreMode::Accommodated) {
      t.factor = factors[t.position].factor;
    }
    t.excluded = std::find(excluded.begin(), excluded.end(), t.position) !=
                 excluded.end();
    if (!t.excluded) {
      m.adS += t.value();
      ++m.n_scored;
    }
    m.tokens.push_back(std::move(t));
  }
  if (m.n_scored == 0) {
    throw ValidationError({"record " + record.id + " (" +
                           std::string(to_string(request.part)) +
                           "): clause too short to score"});
  }
  m.avS = exact_mean(m.adS, m.n_scored);
  m.adS = m.avS * static_cast<double>(m.n_scored);
  return m;
}

std::vector<SummaryCell> aggregate_by_variant(
    std::span<const ScoredClause> scored) {
  using Key = std::tuple<int, int, int, int>;  // lin, mode, variant, part
  struct Acc {
    std::size_t n = 0;
    double adS = 0.0;
    double avS = 0.0;
  };
  std::map<Key, Acc> acc;
  for (const auto& s : scored) {
    const auto& req = s.metrics.request;
    // Extraposed sorts first, mirroring the published table layout.
    Key k{static_cast<int>(req.linearization), static_cast<int>(req.mode),
          s.variant == Variant::Extraposed ? 0 : 1,
          static_cast<int>(req.part)};
    auto& a = acc[k];
    ++a.n;
    a.adS += s.metrics.adS;
    a.avS += s.metrics.avS;
  }
  std::vector<SummaryCell> out;
  out.reserve(acc.size());
  for (const auto& [k, a] : acc) {
    SummaryCell c;
    c.linearization = static_cast<Linearization>(std::get<0>(k));
    c.mode = static_cast<ScoreMode>(std::get<1>(k));
    c.variant = std::get<2>(k) == 0 ? Variant::Extraposed : Variant::InSitu;
    c.part = static_cast<ClausePart>(std::get<3>(k));
    c.n = a.n;
    c.mean_adS = a.adS / static_cast<double>(a.n);
    c.mean_avS = a.avS / static_cast<double>(a.n);
    out.push_back(c);
  }
  return out;
}

std::string format_summary_tsv(std::span<const SummaryCell> cells,
                               ScoreMode mode, Linearization linearization) {
  std::string out = "variant\tn\tpart\tadS\tavS\n";
  for (const auto& c : cells) {
    if (c.mode != mode || c.linearization != linearization) continue;
    out += std::string(to_string(c.variant)) + '\t' + std::to_string(c.n) +
           '\t' + std::string(to_string(c.part)) + '\t' +
           format_fixed(c.mean_adS) + '\t' + format_fixed(c.mean_avS) + '\n';
  }
  return out;
}

std::string format_hypotheticals_tsv(std::span<const SummaryCell> cells) {
  std::string out = "variant\tn\tpart\tmode\tadS\tavS\n";
  for (const auto& c : cells) {
    if (c.linearization != Linearization::Hypothetical) continue;
    out += std::string(to_string(c.variant)) + '\t' + std::to_string(c.n) +
           '\t' + std::string(to_string(c.part)) + '\t' +
           std::string(to_string(c.mode)) + '\t' + format_fixed(c.mean_adS) +
           '\t' + format_fixed(c.mean_avS) + '\n';
  }
  return out;
}

std::string render_summary(std::span<const SummaryCell> cells, ScoreMode mode,
                           Linearization linearization) {
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  std::string out;
  std::optional<Variant> current;
  for (const auto& c : cells) {
    if (c.mode != mode || c.linearization != linearization) continue;
    if (current != c.variant) {
      current = c.variant;
      out += c.variant == Variant::Extraposed
                 ? "extraposed (=outsourced) relative cl."
                 : "in-situ (= bundled) relative cl.";
      out += "\tadS\tavS\n";
    }
    out += pad("n = " + std::to_string(c.n), 10) +
           pad(std::string(to_string(c.part)), 14) + pad(format_fixed(c.mean_adS), 12) +
           format_fixed(c.mean_avS) + '\n';
  }
  return out;
}

}  // namespace uidkit
