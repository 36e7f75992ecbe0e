// uidkit command-line front end.
//
// Exit codes: 0 success, 2 input/IO error, 3 validation error,
// 4 internal invariant violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uidkit/clauses.hpp"
#include "uidkit/error.hpp"
#include "uidkit/givenness.hpp"
#include "uidkit/pipeline.hpp"
#include "uidkit/report.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    if (comma > start) out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Surprisal, accommodation and givenness measurements for "
               "relative-clause placement"};
  app.set_config("--config", "", "Flat key=value configuration file");
  app.fallthrough();
  app.require_subcommand(1);

  uidkit::RunConfig cfg;
  std::string format = "vertical";
  std::string content_pos = "NN,NE,VV,ADJ,ADV";
  std::string window = "200";
  std::string counting = "mentions";
  std::string combined = "both";
  bool no_resegment = false;
  bool keep_first_word = false;
  std::string model, clauses, referents, stoplist;
  double discount = 0.0, unknown_mass = -1.0;

  app.add_option("--corpus", cfg.corpus_paths, "Corpus file(s)")->delimiter(',');
  app.add_option("--format", format, "Corpus format")
      ->check(CLI::IsMember({"vertical", "text"}));
  app.add_option("--punctuation", cfg.punctuation,
                 "Characters that make up punctuation tokens");
  app.add_flag("--no-resegment", no_resegment,
               "Keep the input sentence boundaries only");
  app.add_option("--content-pos", content_pos,
                 "Comma-separated POS prefixes of content words");
  app.add_option("--stoplist", stoplist,
                 "Function-word lemma list for untagged tokens");
  app.add_option("--bonus", cfg.factors.bonus, "Novelty bonus for x = 1");
  app.add_option("--wearout", cfg.factors.wearout,
                 "Mention count from which the factor is 1");
  app.add_option("--window", window,
                 "Decay window in words, or 'none'");
  app.add_option("--floor", cfg.factors.floor, "Lowest x after decay");
  app.add_option("--discount", discount, "Fixed Kneser-Ney discount");
  app.add_option("--unknown-mass", unknown_mass,
                 "Continuation share of <unk> (default 1/(types+1))");
  app.add_option("--model", model, "ARPA model path");
  app.add_option("--clauses", clauses, "Clause annotation JSON");
  app.add_option("--referents", referents, "Referent annotation TSV");
  app.add_option("-o,--output-dir", cfg.output_dir, "Report directory");
  app.add_option("--salience-window", cfg.salience.window,
                 "Intervening referents allowed for salience");
  app.add_option("--salience-counting", counting,
                 "Count intervening mentions or distinct referents")
      ->check(CLI::IsMember({"mentions", "referents"}));
  app.add_flag("--keep-first-word", keep_first_word,
               "Score clause-initial words too");
  app.add_option("--combined-exclusion", combined,
                 "Initial words left out of combined scores")
      ->check(CLI::IsMember({"both", "first"}));
  app.add_option("--seed", cfg.seed, "Reserved");

  auto* train = app.add_subcommand("train", "Train a Kneser-Ney bigram model");

  auto* surprisal = app.add_subcommand(
      "surprisal", "Per-token surprisal with accommodation columns");
  std::vector<std::string> doc_ids;
  std::string surprisal_out;
  surprisal->add_option("--doc", doc_ids, "Document id(s)")->delimiter(',');
  surprisal->add_option("--output", surprisal_out, "TSV file (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "Write all report tables");
  bool pretty = false;
  analyze->add_flag("--pretty", pretty, "Print aligned tables to stdout");

  auto* givenness = app.add_subcommand("givenness",
                                       "Givenness table and chi-square only");

  auto* chi2 = app.add_subcommand("chi2", "Chi-square test of a 2x2 table");
  std::vector<double> cells;
  chi2->add_option("cells", cells, "a b c d")->expected(4)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.corpus_format = format == "text" ? uidkit::CorpusFormat::PlainText
                                       : uidkit::CorpusFormat::Vertical;
  cfg.resegment = !no_resegment;
  cfg.content_pos = split_commas(content_pos);
  if (!stoplist.empty()) cfg.stoplist_path = stoplist;
  if (window == "none") {
    cfg.factors.window = uidkit::FactorConfig::kNoDecay;
  } else {
    try {
      cfg.factors.window = std::stoul(window);
    } catch (const std::exception&) {
      std::cerr << "error: --window must be a number or 'none'\n";
      return 2;
    }
  }
  if (app.count("--discount")) cfg.discount = discount;
  if (app.count("--unknown-mass")) cfg.unknown_mass = unknown_mass;
  if (!model.empty()) cfg.model_path = model;
  if (!clauses.empty()) cfg.clauses_path = clauses;
  if (!referents.empty()) cfg.referents_path = referents;
  cfg.salience.counting = counting == "mentions"
                              ? uidkit::InterveningCount::Mentions
                              : uidkit::InterveningCount::DistinctReferents;
  cfg.scoring.exclude_first_word = !keep_first_word;
  cfg.scoring.combined_excludes_both = combined == "both";

  if (*train) {
    const auto report = uidkit::cmd_train(cfg);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << report.format();
  } else if (*surprisal) {
    const auto tsv = uidkit::cmd_surprisal(cfg, doc_ids);
    if (surprisal_out.empty()) {
      std::cout << tsv;
    } else {
      std::ofstream out(surprisal_out, std::ios::binary);
      out << tsv;
      if (!out) throw uidkit::InputError("cannot write '" + surprisal_out + "'");
    }
  } else if (*analyze) {
    const auto bundle = uidkit::cmd_analyze(cfg);
    uidkit::write_bundle(bundle, cfg.output_dir);
    if (pretty) {
      for (const auto& [name, contents] : bundle.files) {
        if (name == "manifest.json") continue;
        std::cout << "== " << name << "\n" << contents << "\n";
      }
    }
  } else if (*givenness) {
    uidkit::write_bundle(uidkit::cmd_givenness(cfg), cfg.output_dir);
  } else if (*chi2) {
    const auto r = uidkit::chi_square_2x2(cells[0], cells[1], cells[2], cells[3]);
    std::cout << "statistic\t" << uidkit::format_fixed(r.statistic, 6) << "\n"
              << "p_value\t" << uidkit::format_fixed(r.p_value, 6) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const uidkit::ValidationError& e) {
    std::cerr << "validation failed:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return 3;
  } catch (const uidkit::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const uidkit::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
