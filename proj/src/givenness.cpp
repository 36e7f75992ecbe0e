#include "uidkit/givenness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "uidkit/error.hpp"
#include "uidkit/report.hpp"

namespace uidkit {

std::string_view to_string(SalienceCategory c) {
  switch (c) {
    case SalienceCategory::New:
      return "new";
    case SalienceCategory::InferableNew:
      return "inferable_new";
    case SalienceCategory::GivenNonSalient:
      return "given_non_salient";
    case SalienceCategory::GivenSalient:
      return "given_salient";
    case SalienceCategory::SalientTopic:
      return "salient_topic";
  }
  return "?";
}

SalienceCategory classify_mention(std::span<const ReferentMention> history,
                                  const ReferentMention& mention,
                                  const SalienceOptions& options) {
  auto last = std::find_if(history.rbegin(), history.rend(),
                           [&](const ReferentMention& m) {
                             return m.referent_id == mention.referent_id;
                           });
  if (last == history.rend()) {
    return mention.inferable ? SalienceCategory::InferableNew
                             : SalienceCategory::New;
  }
  std::size_t intervening = 0;
  if (options.counting == InterveningCount::Mentions) {
    intervening = static_cast<std::size_t>(last - history.rbegin());
  } else {
    std::unordered_set<std::string_view> distinct;
    for (auto it = history.rbegin(); it != last; ++it) {
      distinct.insert(it->referent_id);
    }
    intervening = distinct.size();
  }
  if (intervening > options.window) return SalienceCategory::GivenNonSalient;
  return mention.topic ? SalienceCategory::SalientTopic
                       : SalienceCategory::GivenSalient;
}

std::vector<SalienceCategory> classify_document(
    std::span<const ReferentMention> mentions, const SalienceOptions& options) {
  std::vector<SalienceCategory> out;
  out.reserve(mentions.size());
  if (options.counting == InterveningCount::Mentions) {
    // Linear scan: intervening mentions = ordinal gap - 1.
    std::unordered_map<std::string_view, std::size_t> last_seen;
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      const auto& m = mentions[i];
      auto it = last_seen.find(m.referent_id);
      if (it == last_seen.end()) {
        out.push_back(m.inferable ? SalienceCategory::InferableNew
                                  : SalienceCategory::New);
      } else if (i - it->second - 1 > options.window) {
        out.push_back(SalienceCategory::GivenNonSalient);
      } else {
        out.push_back(m.topic ? SalienceCategory::SalientTopic
                              : SalienceCategory::GivenSalient);
      }
      last_seen[m.referent_id] = i;
    }
    return out;
  }
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    out.push_back(classify_mention(mentions.subspan(0, i), mentions[i], options));
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<std::size_t> to_size(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::vector<ReferentMention> parse_referent_mentions(
    std::string_view tsv, std::span<const Document> docs) {
  std::unordered_map<std::string_view, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id(), &d);

  std::vector<ReferentMention> out;
  std::vector<std::string> problems;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < tsv.size()) {
    auto nl = tsv.find('\n', start);
    if (nl == std::string_view::npos) nl = tsv.size();
    auto line = tsv.substr(start, nl - start);
    start = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (lineno == 1 && line.substr(0, 4) == "doc\t") continue;  // header

    auto cols = split_tabs(line);
    if (cols.size() != 6) {
      throw ParseError(lineno, "expected 6 tab-separated columns, got " +
                                   std::to_string(cols.size()));
    }
    auto s = to_size(cols[1]);
    auto e = to_size(cols[2]);
    if (!s || !e) throw ParseError(lineno, "start/end must be integers");
    auto flag = [&](std::string_view f, const char* name) {
      if (f == "0") return false;
      if (f == "1") return true;
      throw ParseError(lineno, std::string(name) + " must be 0 or 1");
    };
    ReferentMention m;
    m.doc_id = std::string(cols[0]);
    m.span = Span{*s, *e};
    m.referent_id = std::string(cols[3]);
    m.inferable = flag(cols[4], "inferable");
    m.topic = flag(cols[5], "topic");
    if (m.referent_id.empty()) throw ParseError(lineno, "empty referent id");

    const std::string where = "line " + std::to_string(lineno) + ": ";
    auto doc = by_id.find(m.doc_id);
    if (doc == by_id.end()) {
      problems.push_back(where + "unknown document '" + m.doc_id + "'");
      continue;
    }
    if (m.span.size() == 0 || m.span.end > doc->second->word_count()) {
      problems.push_back(where + "mention span outside document " + m.doc_id);
      continue;
    }
    out.push_back(std::move(m));
  }

  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.doc_id, a.span.start) < std::tie(b.doc_id, b.span.start);
  });
  std::size_t ordinal = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i == 0 || out[i].doc_id != out[i - 1].doc_id) {
      ordinal = 0;
    } else if (out[i].span.overlaps(out[i - 1].span)) {
      problems.push_back("document " + out[i].doc_id + ": mentions at " +
                         std::to_string(out[i - 1].span.start) + " and " +
                         std::to_string(out[i].span.start) + " overlap");
    }
    out[i].mention_ordinal = ordinal++;
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return out;
}

std::size_t GivennessCounts::total() const {
  std::size_t n = 0;
  for (auto c : by_category) n += c;
  return n;
}

std::optional<double> GivennessCounts::ratio(std::size_t count) const {
  const auto n = total();
  if (n == 0) return std::nullopt;
  return static_cast<double>(count) / static_cast<double>(n);
}

GivennessCounts& GivennessCounts::operator+=(const GivennessCounts& other) {
  for (std::size_t i = 0; i < kSalienceCategories; ++i) {
    by_category[i] += other.by_category[i];
  }
  return *this;
}

GivennessCounts clause_givenness(const ClauseRecord& record,
                                 std::span<const ReferentMention> mentions,
                                 std::span<const SalienceCategory> categories,
                                 ClausePart part) {
  if (mentions.size() != categories.size()) {
    throw std::invalid_argument("mentions and categories differ in length");
  }
  if (part == ClausePart::Combined) {
    throw std::invalid_argument("givenness is counted per rc or matrix part");
  }
  GivennessCounts counts;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    const auto& m = mentions[i];
    if (m.doc_id != record.doc_id) continue;
    bool inside = false;
    if (part == ClausePart::Relative) {
      inside = record.rc.contains(m.span);
    } else {
      inside = std::any_of(record.matrix.begin(), record.matrix.end(),
                           [&](const Span& s) { return s.contains(m.span); });
    }
    if (inside) ++counts.by_category[static_cast<std::size_t>(categories[i])];
  }
  return counts;
}

ChiSquareResult chi_square_2x2(double a, double b, double c, double d) {
  if (a < 0 || b < 0 || c < 0 || d < 0) {
    throw std::invalid_argument("counts must be non-negative");
  }
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) {
    throw std::invalid_argument("degenerate table");
  }
  const double n = r1 + r2;
  const double diff = a * d - b * c;
  ChiSquareResult r;
  r.statistic = n * diff * diff / (r1 * r2 * c1 * c2);
  r.p_value = std::max(std::erfc(std::sqrt(r.statistic / 2.0)),
                       std::numeric_limits<double>::denorm_min());
  return r;
}

std::vector<GivennessRow> givenness_table(
    std::span<const ClauseRecord> records,
    std::span<const ReferentMention> mentions,
    std::span<const SalienceCategory> categories) {
  if (mentions.size() != categories.size()) {
    throw std::invalid_argument("mentions and categories differ in length");
  }
  std::map<std::string_view, std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    auto [it, inserted] = ranges.try_emplace(mentions[i].doc_id, i, i + 1);
    if (!inserted) it->second.second = i + 1;
  }
  std::vector<GivennessRow> rows;
  for (Variant v : {Variant::InSitu, Variant::Extraposed}) {
    for (ClausePart p : {ClausePart::Relative, ClausePart::Matrix}) {
      rows.push_back({v, p, 0, {}});
    }
  }
  for (const auto& r : records) {
    const std::size_t base = r.variant == Variant::InSitu ? 0 : 2;
    auto range = ranges.find(r.doc_id);
    for (std::size_t k = 0; k < 2; ++k) {
      auto& row = rows[base + k];
      ++row.clauses;
      if (range == ranges.end()) continue;
      const auto [first, last] = range->second;
      row.counts += clause_givenness(
          r, mentions.subspan(first, last - first),
          categories.subspan(first, last - first), row.part);
    }
  }
  return rows;
}

namespace {

std::string ratio_cell(const std::optional<double>& r) {
  return r ? format_fixed(*r, 4) : "NA";
}

}  // namespace

std::string format_givenness_tsv(std::span<const GivennessRow> rows) {
  std::string out =
      "variant\tpart\tclauses\treferents_total\tnew\tnew_ratio\tinferable_new\t"
      "given_non_salient\tgiven_salient\tsalient_topic\tsalient\t"
      "salient_ratio\n";
  for (const auto& r : rows) {
    const auto& c = r.counts;
    out += std::string(to_string(r.variant)) + '\t' +
           std::string(to_string(r.part)) + '\t' + std::to_string(r.clauses) +
           '\t' + std::to_string(c.total()) + '\t' +
           std::to_string(c.new_referents()) + '\t' +
           ratio_cell(c.ratio(c.new_referents())) + '\t' +
           std::to_string(c.count(SalienceCategory::InferableNew)) + '\t' +
           std::to_string(c.count(SalienceCategory::GivenNonSalient)) + '\t' +
           std::to_string(c.count(SalienceCategory::GivenSalient)) + '\t' +
           std::to_string(c.count(SalienceCategory::SalientTopic)) + '\t' +
           std::to_string(c.salient_referents()) + '\t' +
           ratio_cell(c.ratio(c.salient_referents())) + '\n';
  }
  return out;
}

std::string format_chi_square_tsv(std::span<const GivennessRow> rows) {
  std::string out = "comparison\tpart\ta\tb\tc\td\tstatistic\tp_value\n";
  for (ClausePart part : {ClausePart::Relative, ClausePart::Matrix}) {
    const GivennessRow* in_situ = nullptr;
    const GivennessRow* extraposed = nullptr;
    for (const auto& r : rows) {
      if (r.part != part) continue;
      (r.variant == Variant::InSitu ? in_situ : extraposed) = &r;
    }
    if (!in_situ || !extraposed) continue;
    const auto a = in_situ->counts.new_referents();
    const auto b = in_situ->counts.total() - a;
    const auto c = extraposed->counts.new_referents();
    const auto d = extraposed->counts.total() - c;
    out += "new_referents\t" + std::string(to_string(part)) + '\t' +
           std::to_string(a) + '\t' + std::to_string(b) + '\t' +
           std::to_string(c) + '\t' + std::to_string(d) + '\t';
    try {
      const auto r = chi_square_2x2(static_cast<double>(a), static_cast<double>(b),
                                    static_cast<double>(c), static_cast<double>(d));
      out += format_fixed(r.statistic, 6) + '\t' + format_fixed(r.p_value, 6);
    } catch (const std::invalid_argument&) {
      out += "NA\tNA";
    }
    out += '\n';
  }
  return out;
}

}  // namespace uidkit
