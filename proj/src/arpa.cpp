#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <unordered_set>
#include <vector>

#include "uidkit/error.hpp"
#include "uidkit/ngram.hpp"

namespace uidkit {

namespace {

// ARPA convention for log10(0).
constexpr double kLogZero = -99.0;

std::string format_log10(double p) {
  double value = p > 0.0 ? std::log10(p) : kLogZero;
  if (value < kLogZero) value = kLogZero;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

double parse_log10(std::string_view field, std::size_t lineno,
                   bool allow_positive = false) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(lineno, "non-numeric field '" + std::string(field) + "'");
  }
  if (value > 0.0 && !allow_positive) {
    throw ParseError(lineno, "log10 value must not be positive");
  }
  return value <= kLogZero ? 0.0 : std::pow(10.0, value);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  return s;
}

std::size_t parse_count(std::string_view s, std::size_t lineno) {
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(lineno, "bad n-gram count '" + std::string(s) + "'");
  }
  return n;
}

}  // namespace

std::string export_arpa(const KneserNeyBigramModel& model) {
  const auto& vocab = model.vocabulary();
  const auto bigrams = model.sorted_bigrams();

  std::vector<bool> is_context(vocab.size(), false);
  for (const auto& [vw, p] : bigrams) is_context[vw.first] = true;

  std::string out;
  out += "\\data\\\n";
  out += "ngram 1=" + std::to_string(vocab.size()) + "\n";
  out += "ngram 2=" + std::to_string(bigrams.size()) + "\n";
  out += "\n\\1-grams:\n";
  for (WordId w = 0; w < vocab.size(); ++w) {
    out += format_log10(model.unigram(w));
    out += '\t';
    out += vocab.word(w);
    if (is_context[w] || model.backoff(w) != 1.0) {
      out += '\t';
      out += format_log10(model.backoff(w));
    }
    out += '\n';
  }
  out += "\n\\2-grams:\n";
  for (const auto& [vw, p] : bigrams) {
    out += format_log10(p);
    out += '\t';
    out += vocab.word(vw.first);
    out += ' ';
    out += vocab.word(vw.second);
    out += '\n';
  }
  out += "\n\\end\\\n";
  return out;
}

KneserNeyBigramModel import_arpa(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      lines.push_back(trim(text.substr(start, nl - start)));
      start = nl + 1;
    }
  }

  enum class Section { Preamble, Data, Unigrams, Bigrams, End };
  Section section = Section::Preamble;
  std::size_t declared[3] = {0, 0, 0};
  bool declared_seen[3] = {false, false, false};
  bool bigram_section_seen = false;

  struct UnigramLine {
    std::string word;
    double prob;
    double backoff;
    std::size_t line;
  };
  struct BigramLine {
    std::string v, w;
    double prob;
    std::size_t line;
  };
  std::vector<UnigramLine> unigrams;
  std::vector<BigramLine> bigram_lines;

  auto check_section_count = [&](int order, std::size_t found,
                                 std::size_t lineno) {
    if (!declared_seen[order]) {
      throw ParseError(lineno, "section for order " + std::to_string(order) +
                                   " not declared in \\data\\");
    }
    if (found != declared[order]) {
      throw ParseError(lineno, "order " + std::to_string(order) + " declares " +
                                   std::to_string(declared[order]) +
                                   " entries but has " + std::to_string(found));
    }
  };

  std::size_t lineno = 0;
  for (; lineno < lines.size(); ++lineno) {
    const std::size_t ln = lineno + 1;
    const auto line = lines[lineno];
    if (line == "\\data\\") {
      if (section != Section::Preamble) {
        throw ParseError(ln, "unexpected \\data\\");
      }
      section = Section::Data;
      continue;
    }
    if (line == "\\1-grams:" || line == "\\2-grams:" || line == "\\end\\") {
      if (section == Section::Preamble) {
        throw ParseError(ln, "missing \\data\\ header");
      }
      if (section == Section::Unigrams) check_section_count(1, unigrams.size(), ln);
      if (section == Section::Bigrams) check_section_count(2, bigram_lines.size(), ln);
      if (line == "\\1-grams:") {
        if (section != Section::Data) throw ParseError(ln, "misplaced \\1-grams:");
        section = Section::Unigrams;
      } else if (line == "\\2-grams:") {
        if (section != Section::Unigrams) throw ParseError(ln, "misplaced \\2-grams:");
        section = Section::Bigrams;
        bigram_section_seen = true;
      } else {
        section = Section::End;
        break;
      }
      continue;
    }
    if (line.empty()) continue;
    switch (section) {
      case Section::Preamble:
        if (line.front() == '\\') throw ParseError(ln, "missing \\data\\ header");
        break;  // free text before \data\ is allowed
      case Section::Data: {
        constexpr std::string_view kPrefix = "ngram ";
        if (line.substr(0, kPrefix.size()) != kPrefix) {
          throw ParseError(ln, "expected 'ngram N=count'");
        }
        auto rest = trim(line.substr(kPrefix.size()));
        auto eq = rest.find('=');
        if (eq == std::string_view::npos) throw ParseError(ln, "expected '='");
        const auto order = parse_count(trim(rest.substr(0, eq)), ln);
        const auto count = parse_count(trim(rest.substr(eq + 1)), ln);
        if (order < 1 || order > 2) {
          throw ParseError(ln, "only orders 1 and 2 are supported");
        }
        declared[order] = count;
        declared_seen[order] = true;
        break;
      }
      case Section::Unigrams: {
        auto f = split_ws(line);
        if (f.size() < 2 || f.size() > 3) {
          throw ParseError(ln, "unigram line needs 2 or 3 fields");
        }
        UnigramLine u{std::string(f[1]), parse_log10(f[0], ln),
                      f.size() == 3 ? parse_log10(f[2], ln, true) : 1.0, ln};
        unigrams.push_back(std::move(u));
        break;
      }
      case Section::Bigrams: {
        auto f = split_ws(line);
        if (f.size() < 3 || f.size() > 4) {
          throw ParseError(ln, "bigram line needs 3 or 4 fields");
        }
        bigram_lines.push_back(
            {std::string(f[1]), std::string(f[2]), parse_log10(f[0], ln), ln});
        break;
      }
      case Section::End:
        break;
    }
  }
  if (section != Section::End) {
    throw ParseError(lines.size(), section == Section::Preamble
                                       ? "missing \\data\\ header"
                                       : "unexpected end of file (no \\end\\)");
  }
  if (!declared_seen[1]) throw ParseError(lineno + 1, "no unigram section");
  if (declared_seen[2] && declared[2] > 0 && !bigram_section_seen) {
    throw ParseError(lineno + 1, "declared bigrams but no \\2-grams: section");
  }

  Vocabulary vocab;
  std::unordered_set<std::string> seen;
  for (const auto& u : unigrams) {
    if (!seen.insert(u.word).second) {
      throw ParseError(u.line, "duplicate unigram '" + u.word + "'");
    }
    vocab.add(u.word);
  }
  std::vector<double> unigram(vocab.size(), 0.0);
  std::vector<double> backoff(vocab.size(), 1.0);
  for (const auto& u : unigrams) {
    const WordId id = vocab.id(u.word);
    unigram[id] = u.prob;
    backoff[id] = u.backoff;
  }
  std::unordered_map<std::uint64_t, double> bigrams;
  bigrams.reserve(bigram_lines.size());
  for (const auto& b : bigram_lines) {
    if (!vocab.contains(b.v) || !vocab.contains(b.w)) {
      throw ParseError(b.line, "bigram '" + b.v + " " + b.w +
                                       "' uses a word missing from the unigrams");
    }
    bigrams[KneserNeyBigramModel::key(vocab.id(b.v), vocab.id(b.w))] = b.prob;
  }
  return KneserNeyBigramModel(std::move(vocab), std::nullopt,
                              std::move(unigram), std::move(backoff),
                              std::move(bigrams));
}

}  // namespace uidkit
