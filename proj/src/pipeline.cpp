#include "uidkit/pipeline.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_set>

#include "json.hpp"
#include "uidkit/error.hpp"
#include "uidkit/report.hpp"
#include "uidkit/surprisal.hpp"

namespace uidkit {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw InputError(std::string(what) + " '" + path + "' does not exist");
  }
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

}  // namespace

void RunConfig::validate(bool need_model, bool need_annotations) const {
  std::vector<std::string> problems;
  try {
    factors.validate();
  } catch (const std::invalid_argument& e) {
    problems.emplace_back(std::string("factor config: ") + e.what());
  }
  if (discount && !(*discount > 0.0 && *discount < 1.0)) {
    problems.emplace_back("discount must lie in (0, 1)");
  }
  if (unknown_mass && !(*unknown_mass >= 0.0 && *unknown_mass < 1.0)) {
    problems.emplace_back("unknown-word mass must lie in [0, 1)");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  if (corpus_paths.empty()) throw InputError("no corpus given");
  for (const auto& p : corpus_paths) require_file(p, "corpus");
  if (need_model && model_path) require_file(*model_path, "model");
  if (stoplist_path) require_file(*stoplist_path, "stoplist");
  if (need_annotations) {
    if (!clauses_path) throw InputError("no clause annotations given");
    if (!referents_path) throw InputError("no referent annotations given");
    require_file(*clauses_path, "clause annotations");
    require_file(*referents_path, "referent annotations");
  }
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["corpus"] = join(corpus_paths, ',');
  kv["corpus_format"] =
      corpus_format == CorpusFormat::Vertical ? "vertical" : "text";
  kv["punctuation"] = punctuation;
  kv["resegment"] = resegment ? "true" : "false";
  kv["content_pos"] = join(content_pos, ',');
  kv["stoplist"] = stoplist_path.value_or("");
  kv["bonus"] = format_real(factors.bonus);
  kv["wearout"] = std::to_string(factors.wearout);
  kv["window"] = factors.window == FactorConfig::kNoDecay
                     ? "none"
                     : std::to_string(factors.window);
  kv["floor"] = std::to_string(factors.floor);
  kv["discount"] = discount ? format_real(*discount) : "auto";
  kv["unknown_mass"] = unknown_mass ? format_real(*unknown_mass) : "auto";
  kv["model"] = model_path.value_or("");
  kv["clauses"] = clauses_path.value_or("");
  kv["referents"] = referents_path.value_or("");
  kv["salience_window"] = std::to_string(salience.window);
  kv["salience_counting"] = salience.counting == InterveningCount::Mentions
                                ? "mentions"
                                : "referents";
  kv["exclude_first_word"] = scoring.exclude_first_word ? "true" : "false";
  kv["combined_exclusion"] = scoring.combined_excludes_both ? "both" : "first";
  kv["seed"] = std::to_string(seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

PunctuationPolicy RunConfig::punctuation_policy() const {
  return PunctuationPolicy::from_utf8(punctuation);
}

ContentWordPolicy RunConfig::content_policy() const {
  auto stoplist = stoplist_path
                      ? ContentWordPolicy::parse_stoplist(read_file(*stoplist_path))
                      : ContentWordPolicy::default_stoplist();
  return ContentWordPolicy(content_pos, std::move(stoplist));
}

std::vector<Document> load_corpus(const RunConfig& config) {
  const auto punct = config.punctuation_policy();
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  for (const auto& path : config.corpus_paths) {
    std::vector<Document> loaded;
    if (config.corpus_format == CorpusFormat::Vertical) {
      try {
        loaded = load_vertical_file(path, punct);
      } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
      }
    } else {
      loaded.push_back(tokenize_plain_text(fs::path(path).stem().string(),
                                           read_file(path), punct));
    }
    for (auto& d : loaded) {
      if (!ids.insert(d.id()).second) {
        throw InputError(path + ": duplicate document id '" + d.id() + "'");
      }
      docs.push_back(config.resegment ? resegment_sentences(d) : std::move(d));
    }
  }
  return docs;
}

std::string TrainReport::format() const {
  std::string out;
  out += "documents=" + std::to_string(documents) + "\n";
  out += "sentences=" + std::to_string(sentences) + "\n";
  out += "tokens=" + std::to_string(tokens) + "\n";
  out += "vocabulary=" + std::to_string(vocabulary) + " (+" +
         std::to_string(Vocabulary::kReserved) + " reserved)\n";
  out += "bigram_types=" + std::to_string(bigram_types) + "\n";
  out += "D=" + format_real(discount) + "\n";
  return out;
}

TrainedModel train_model(std::span<const Document> docs,
                         const RunConfig& config) {
  const auto counts = count_bigrams(docs);
  if (counts.empty()) throw InputError("corpus contains no words");
  TrainReport report;
  report.documents = docs.size();
  for (const auto& d : docs) {
    report.sentences += d.sentence_count();
    report.tokens += d.word_count();
  }
  TrainOptions options;
  options.unknown_mass = config.unknown_mass;
  if (config.discount) {
    options.discount = config.discount;
  } else {
    const auto est = estimate_discount(counts);
    if (est.warning) report.warnings.push_back(*est.warning);
    options.discount = est.value;
  }
  auto model = train_kn(counts, options);
  report.vocabulary = model.vocabulary().size() - Vocabulary::kReserved;
  report.bigram_types = counts.total_bigram_types();
  report.discount = *options.discount;
  return {std::move(model), std::move(report)};
}

TrainReport cmd_train(const RunConfig& config) {
  config.validate(false, false);
  if (!config.model_path) throw InputError("no output model path given");
  const auto docs = load_corpus(config);
  auto trained = train_model(docs, config);
  const auto arpa = export_arpa(trained.model);
  std::ofstream out(*config.model_path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + *config.model_path + "'");
  out << arpa;
  if (!out) throw InputError("error writing '" + *config.model_path + "'");
  return trained.report;
}

namespace {

KneserNeyBigramModel obtain_model(std::span<const Document> docs,
                                  const RunConfig& config) {
  if (config.model_path) {
    try {
      return import_arpa(read_file(*config.model_path));
    } catch (const ParseError& e) {
      throw InputError(*config.model_path + ": " + e.what());
    }
  }
  return train_model(docs, config).model;
}

struct Annotations {
  std::vector<ClauseRecord> clauses;
  std::vector<ReferentMention> mentions;
  std::vector<SalienceCategory> categories;
};

Annotations load_annotations(std::span<const Document> docs,
                             const RunConfig& config) {
  Annotations a;
  std::vector<std::string> problems;
  auto parse = [&](auto&& fn, const std::string& path) {
    try {
      fn(read_file(path));
    } catch (const ValidationError& e) {
      for (const auto& p : e.problems()) problems.push_back(path + ": " + p);
    } catch (const ParseError& e) {
      throw InputError(path + ": " + e.what());
    }
  };
  parse([&](const std::string& text) {
         a.clauses = parse_clause_annotations(text, docs);
       },
        *config.clauses_path);
  parse([&](const std::string& text) {
         a.mentions = parse_referent_mentions(text, docs);
       },
        *config.referents_path);
  if (!problems.empty()) throw ValidationError(std::move(problems));

  a.categories.reserve(a.mentions.size());
  std::size_t first = 0;
  for (std::size_t i = 1; i <= a.mentions.size(); ++i) {
    if (i == a.mentions.size() || a.mentions[i].doc_id != a.mentions[first].doc_id) {
      auto cats = classify_document(
          std::span<const ReferentMention>(a.mentions).subspan(first, i - first),
          config.salience);
      a.categories.insert(a.categories.end(), cats.begin(), cats.end());
      first = i;
    }
  }
  return a;
}

ReportBundle givenness_reports(const Annotations& a) {
  const auto rows = givenness_table(a.clauses, a.mentions, a.categories);
  ReportBundle b;
  b.files.emplace_back("table1.tsv", format_givenness_tsv(rows));
  b.files.emplace_back("chi_square.tsv", format_chi_square_tsv(rows));
  return b;
}

std::string manifest_json(const RunConfig& config, const ReportBundle& bundle,
                          const std::string& model_source) {
  nlohmann::ordered_json m;
  m["tool"] = "uidkit";
  m["version"] = kVersion;
  m["config"] = config.canonical();
  m["config_sha256"] = sha256_hex(config.canonical());
  m["model"] = model_source;
  auto inputs = nlohmann::ordered_json::array();
  auto add_input = [&](const std::string& role, const std::string& path) {
    inputs.push_back({{"role", role},
                      {"path", path},
                      {"sha256", sha256_hex(read_file(path))}});
  };
  for (const auto& p : config.corpus_paths) add_input("corpus", p);
  if (config.model_path) add_input("model", *config.model_path);
  if (config.stoplist_path) add_input("stoplist", *config.stoplist_path);
  if (config.clauses_path) add_input("clauses", *config.clauses_path);
  if (config.referents_path) add_input("referents", *config.referents_path);
  m["inputs"] = inputs;
  auto outputs = nlohmann::ordered_json::array();
  for (const auto& [name, contents] : bundle.files) {
    outputs.push_back({{"name", name}, {"sha256", sha256_hex(contents)}});
  }
  m["outputs"] = outputs;
  return m.dump(2) + "\n";
}

}  // namespace

std::string cmd_surprisal(const RunConfig& config,
                          const std::vector<std::string>& doc_ids) {
  config.validate(true, false);
  const auto docs = load_corpus(config);
  const auto model = obtain_model(docs, config);
  const auto policy = config.content_policy();

  std::vector<const Document*> selected;
  if (doc_ids.empty()) {
    for (const auto& d : docs) selected.push_back(&d);
  } else {
    for (const auto& id : doc_ids) {
      auto it = std::find_if(docs.begin(), docs.end(),
                             [&](const Document& d) { return d.id() == id; });
      if (it == docs.end()) throw InputError("unknown document '" + id + "'");
      selected.push_back(&*it);
    }
  }
  std::vector<WeightedAnnotation> out;
  out.reserve(selected.size());
  for (const auto* d : selected) {
    out.push_back(accommodate_document(annotate_document(model, *d), *d,
                                       policy, config.factors));
  }
  return format_weighted_tsv(out);
}

ReportBundle cmd_givenness(const RunConfig& config) {
  config.validate(false, true);
  const auto docs = load_corpus(config);
  const auto a = load_annotations(docs, config);
  return givenness_reports(a);
}

ReportBundle cmd_analyze(const RunConfig& config) {
  config.validate(true, true);
  const auto docs = load_corpus(config);
  const auto annotations = load_annotations(docs, config);
  const auto model = obtain_model(docs, config);
  const auto policy = config.content_policy();

  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id(), &d);
  std::map<std::string, std::vector<Observation>> factors;

  std::vector<ScoredClause> scored;
  std::vector<std::string> problems;
  for (const auto& record : annotations.clauses) {
    const Document& doc = *by_id.at(record.doc_id);
    auto [it, inserted] = factors.try_emplace(record.doc_id);
    if (inserted) it->second = accommodation_factors(doc, policy, config.factors);

    std::vector<ScoreRequest> requests;
    for (ScoreMode mode : {ScoreMode::Bare, ScoreMode::Accommodated}) {
      requests.push_back({mode, ClausePart::Relative, Linearization::Attested});
      requests.push_back({mode, ClausePart::Matrix, Linearization::Attested});
      if (record.variant == Variant::InSitu) {
        requests.push_back({mode, ClausePart::Combined, Linearization::Attested});
      }
      requests.push_back({mode, ClausePart::Combined, Linearization::Hypothetical});
    }
    for (const auto& req : requests) {
      try {
        scored.push_back({record.variant,
                          clause_metrics(record, doc, model, it->second, req,
                                         config.scoring)});
      } catch (const ValidationError& e) {
        for (const auto& p : e.problems()) {
          if (std::find(problems.begin(), problems.end(), p) == problems.end())
            problems.push_back(p);
        }
      }
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  const auto cells = aggregate_by_variant(scored);
  ReportBundle bundle = givenness_reports(annotations);
  bundle.files.emplace(bundle.files.begin() + 1, "table2.tsv",
                       format_summary_tsv(cells, ScoreMode::Bare,
                                          Linearization::Attested));
  bundle.files.emplace(bundle.files.begin() + 2, "table3.tsv",
                       format_summary_tsv(cells, ScoreMode::Accommodated,
                                          Linearization::Attested));
  bundle.files.emplace(bundle.files.begin() + 3, "hypotheticals.tsv",
                       format_hypotheticals_tsv(cells));
  const std::string model_source =
      config.model_path ? "arpa" : "trained-in-memory";
  bundle.files.emplace_back("manifest.json",
                            manifest_json(config, bundle, model_source));
  return bundle;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw InvariantError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

void write_bundle(const ReportBundle& bundle, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create '" + dir + "': " + ec.message());
  for (const auto& [name, contents] : bundle.files) {
    const auto path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    out << contents;
    if (!out) throw InputError("cannot write '" + path + "'");
  }
}

}  // namespace uidkit
