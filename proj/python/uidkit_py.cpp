#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uidkit/accommodation.hpp"
#include "uidkit/clauses.hpp"
#include "uidkit/corpus.hpp"
#include "uidkit/error.hpp"
#include "uidkit/givenness.hpp"
#include "uidkit/ngram.hpp"
#include "uidkit/pipeline.hpp"
#include "uidkit/surprisal.hpp"

namespace py = pybind11;
using namespace uidkit;

namespace {

FactorConfig make_factors(double bonus, int wearout, std::optional<std::size_t> window,
                          int floor) {
  FactorConfig cfg;
  cfg.bonus = bonus;
  cfg.wearout = wearout;
  cfg.window = window.value_or(FactorConfig::kNoDecay);
  cfg.floor = floor;
  cfg.validate();
  return cfg;
}

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<E> values) {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw py::value_error("unknown value '" + s + "'");
}

KneserNeyBigramModel train(const std::vector<Document>& docs, std::optional<double> discount,
                           std::optional<double> unknown_mass) {
  TrainOptions opt;
  opt.discount = discount;
  opt.unknown_mass = unknown_mass;
  return train_kn(count_bigrams(docs), opt);
}

}  // namespace

PYBIND11_MODULE(uidkit, m) {
  m.doc() = "Surprisal, accommodation and clause-level information density";

  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", input_error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  py::class_<Token>(m, "Token")
      .def_readonly("surface", &Token::surface)
      .def_readonly("lemma", &Token::lemma)
      .def_readonly("pos", &Token::pos)
      .def_readonly("doc_position", &Token::doc_position)
      .def_readonly("sentence_index", &Token::sentence_index)
      .def_readonly("is_punctuation", &Token::is_punctuation);

  py::class_<Document>(m, "Document")
      .def_property_readonly("id", &Document::id)
      .def_property_readonly("tokens", &Document::tokens)
      .def_property_readonly("sentence_count", &Document::sentence_count)
      .def_property_readonly("word_count", &Document::word_count)
      .def("__repr__", [](const Document& d) {
        return "<Document " + d.id() + ": " + std::to_string(d.word_count()) + " words>";
      });

  m.def("load_vertical", [](const std::string& text) { return load_vertical(text); },
        py::arg("text"));
  m.def("load_vertical_file", [](const std::string& path) { return load_vertical_file(path); },
        py::arg("path"));
  m.def("write_vertical", &write_vertical, py::arg("docs"));
  m.def("tokenize", [](const std::string& id, const std::string& text) {
    return tokenize_plain_text(id, text);
  }, py::arg("id"), py::arg("text"), "Plain text to a document; blank lines end sentences.");

  py::class_<KneserNeyBigramModel>(m, "Model")
      .def("prob", py::overload_cast<std::string_view, std::string_view>(
                       &KneserNeyBigramModel::prob, py::const_),
           py::arg("context"), py::arg("word"))
      .def("surprisal", [](const KneserNeyBigramModel& self, const std::string& context,
                           const std::string& word) {
        return token_surprisal(self, context, word);
      }, py::arg("context"), py::arg("word"))
      .def_property_readonly("discount", &KneserNeyBigramModel::discount)
      .def_property_readonly("vocabulary", [](const KneserNeyBigramModel& self) {
        std::vector<std::string> out;
        for (WordId i = 0; i < self.vocabulary().size(); ++i) out.push_back(self.vocabulary().word(i));
        return out;
      })
      .def("to_arpa", &export_arpa)
      .def_static("from_arpa", [](const std::string& text) { return import_arpa(text); },
                  py::arg("text"))
      .def("perplexity", [](const KneserNeyBigramModel& self, const std::vector<Document>& docs) {
        return perplexity(self, docs);
      }, py::arg("docs"));

  m.def("train", &train, py::arg("docs"), py::arg("discount") = py::none(),
        py::arg("unknown_mass") = py::none());
  m.def("train_sentences", [](const std::vector<std::string>& sentences,
                              std::optional<double> discount, std::optional<double> unknown_mass) {
    std::string text;
    for (const auto& s : sentences) text += s + "\n\n";
    return train({tokenize_plain_text("sentences", text)}, discount, unknown_mass);
  }, py::arg("sentences"), py::arg("discount") = py::none(), py::arg("unknown_mass") = py::none());

  m.def("log10_to_bits", &log10_to_bits, py::arg("log10_prob"));
  m.def("annotate", [](const KneserNeyBigramModel& model, const Document& doc) {
    std::vector<py::dict> out;
    for (const auto& e : annotate_document(model, doc).entries) {
      py::dict row;
      row["position"] = e.position;
      row["lemma"] = e.lemma;
      row["context"] = e.context;
      row["prob"] = e.probability;
      row["bits"] = e.surprisal_bits;
      out.push_back(row);
    }
    return out;
  }, py::arg("model"), py::arg("doc"));

  m.def("factor", [](int x, double bonus, int wearout) {
    FactorConfig cfg;
    cfg.bonus = bonus;
    cfg.wearout = wearout;
    return factor(x, cfg);
  }, py::arg("x"), py::arg("bonus") = 4.0, py::arg("wearout") = 4);
  m.def("next_x", [](int prev, std::size_t gap, std::optional<std::size_t> window, int floor) {
    return next_x(prev, gap, make_factors(4.0, 4, window, floor));
  }, py::arg("prev_x"), py::arg("gap"), py::arg("window") = 200, py::arg("floor") = 2);
  m.def("accommodation_trace", [](const std::vector<std::size_t>& positions, double bonus,
                                  int wearout, std::optional<std::size_t> window, int floor) {
    const auto cfg = make_factors(bonus, wearout, window, floor);
    AccommodationState state;
    std::vector<std::pair<int, double>> out;
    for (auto p : positions) {
      const auto o = state.observe("w", p, cfg);
      out.emplace_back(o.x, o.factor);
    }
    return out;
  }, py::arg("positions"), py::arg("bonus") = 4.0, py::arg("wearout") = 4,
     py::arg("window") = 200, py::arg("floor") = 2,
     "(x, factor) for successive mentions of one lemma at the given word ordinals.");

  m.def("chi_square_2x2", [](double a, double b, double c, double d) {
    const auto r = chi_square_2x2(a, b, c, d);
    return std::make_pair(r.statistic, r.p_value);
  }, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
     "Pearson statistic and p-value (1 df) for [[a, b], [c, d]].");

  m.def("clause_metrics", [](const std::string& record_json, const Document& doc,
                             const KneserNeyBigramModel& model, const std::string& mode,
                             const std::string& part, const std::string& linearization) {
    const std::vector<Document> docs{doc};
    const auto records = parse_clause_annotations("[" + record_json + "]", docs);
    ScoreRequest req;
    req.mode = parse_enum(mode, {ScoreMode::Bare, ScoreMode::Accommodated});
    req.part = parse_enum(part, {ClausePart::Relative, ClausePart::Matrix, ClausePart::Combined});
    req.linearization =
        parse_enum(linearization, {Linearization::Attested, Linearization::Hypothetical});
    const auto factors = accommodation_factors(doc, {}, {});
    const auto met = clause_metrics(records.at(0), doc, model, factors, req);
    py::dict out;
    out["adS"] = met.adS;
    out["avS"] = met.avS;
    out["n"] = met.n_scored;
    std::vector<std::string> lemmas;
    for (const auto& t : met.tokens) lemmas.push_back(t.lemma);
    out["lemmas"] = lemmas;
    return out;
  }, py::arg("record_json"), py::arg("doc"), py::arg("model"), py::arg("mode") = "bare",
     py::arg("part") = "rel. cl.", py::arg("linearization") = "attested");

  m.def("analyze", [](const std::vector<std::string>& corpus, const std::string& clauses,
                      const std::string& referents, std::optional<std::string> output_dir) {
    RunConfig cfg;
    cfg.corpus_paths = corpus;
    cfg.clauses_path = clauses;
    cfg.referents_path = referents;
    if (output_dir) cfg.output_dir = *output_dir;
    const auto bundle = cmd_analyze(cfg);
    if (output_dir) write_bundle(bundle, *output_dir);
    std::map<std::string, std::string> out(bundle.files.begin(), bundle.files.end());
    return out;
  }, py::arg("corpus"), py::arg("clauses"), py::arg("referents"),
     py::arg("output_dir") = py::none(),
     "Full analysis; returns report name -> contents and writes them when output_dir is set.");
}
