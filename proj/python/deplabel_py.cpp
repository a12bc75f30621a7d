#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "deplabel/cli.hpp"
#include "deplabel/conllu.hpp"
#include "deplabel/decoding.hpp"
#include "deplabel/encoding.hpp"
#include "deplabel/error.hpp"
#include "deplabel/eval.hpp"
#include "deplabel/tagger.hpp"

namespace py = pybind11;
using namespace deplabel;

namespace {

using Labels = std::vector<std::pair<std::string, std::string>>;

DepTree make_tree(std::vector<int> heads, std::vector<std::string> deprels) {
  if (deprels.empty()) deprels.assign(heads.size(), "dep");
  if (deprels.size() != heads.size()) throw DataError("heads and deprels differ in length");
  return {std::move(heads), std::move(deprels)};
}

std::vector<std::string> tags_or_empty(const std::optional<std::vector<std::string>>& pos) {
  return pos.value_or(std::vector<std::string>{});
}

Labels encode_py(const std::string& encoding, std::vector<int> heads,
                 std::vector<std::string> deprels,
                 const std::optional<std::vector<std::string>>& pos) {
  const auto labels = encode(parse_encoding(encoding), make_tree(std::move(heads), std::move(deprels)),
                             tags_or_empty(pos));
  Labels out;
  for (const auto& l : labels) out.emplace_back(format_head(l.head), l.deprel);
  return out;
}

py::dict decode_py(const std::string& encoding, const Labels& labels,
                   const std::optional<std::vector<std::string>>& pos, bool single_root) {
  const Encoding e = parse_encoding(encoding);
  std::vector<EncodedLabel> parsed;
  for (const auto& [head, deprel] : labels) parsed.push_back({parse_head(e, head), deprel});
  const auto tags = tags_or_empty(pos);
  const RepairResult result = decode(e, parsed, tags, single_root);
  py::dict out;
  out["heads"] = result.tree.heads;
  out["deprels"] = result.tree.deprels;
  out["repairs"] = result.report.summary();
  out["repaired"] = !result.report.empty();
  return out;
}

py::dict validate_py(const std::vector<int>& heads) {
  const auto report = validate(heads);
  py::dict out;
  out["valid"] = report.valid();
  out["in_range"] = report.in_range;
  out["acyclic"] = report.acyclic;
  out["root_children"] = report.root_children;
  out["out_of_range"] = report.out_of_range;
  out["cycles"] = report.cycles;
  return out;
}

py::dict scores_dict(const EvalResult& r) {
  py::dict out;
  out["uas"] = format_percent(r.head_correct, r.tokens_scored);
  out["las"] = format_percent(r.label_correct, r.tokens_scored);
  out["scored"] = r.tokens_scored;
  out["excluded"] = r.excluded;
  return out;
}

ScoringOptions scoring(bool exclude_punct) {
  ScoringOptions options;
  options.exclude_punct = exclude_punct;
  return options;
}

// Python-side handle on a trained model.
struct Model {
  PerceptronModel model;

  std::string parse_text(const std::string& conllu, bool single_root, int k) const {
    const auto sentences = read_conllu_string(conllu);
    std::vector<Sentence> parsed;
    for (auto& r : parse(model, sentences, single_root, k)) parsed.push_back(std::move(r.sentence));
    return write_conllu_string(parsed);
  }

  std::string dumps() const {
    std::ostringstream out;
    model.save(out);
    return out.str();
  }

  static Model loads(const std::string& text) {
    std::istringstream in(text);
    return {PerceptronModel::load(in)};
  }
};

Model train_py(const std::string& conllu, const std::string& encoding, const std::string& pos_source,
               int epochs, std::uint64_t seed) {
  TrainOptions options;
  options.encoding = parse_encoding(encoding);
  options.pos_source = parse_pos_source(pos_source);
  options.epochs = epochs;
  options.seed = seed;
  const auto sentences = read_conllu_string(conllu);
  return {train(sentences, options).model};
}

py::tuple run_cli_py(std::vector<std::string> args) {
  args.insert(args.begin(), "deplabel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_deplabel, m) {
  m.doc() = "Dependency parsing as sequence labeling";
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.attr("ENCODINGS") = py::make_tuple("naive", "relpos", "pos", "bracket");

  m.def("encode", &encode_py, py::arg("encoding"), py::arg("heads"),
        py::arg("deprels") = std::vector<std::string>{}, py::arg("pos") = py::none(),
        "Per-token (head label, deprel) pairs of a tree. heads[i] is the head of token i + 1.");
  m.def("decode", &decode_py, py::arg("encoding"), py::arg("labels"), py::arg("pos") = py::none(),
        py::arg("single_root") = false,
        "Decodes (head label, deprel) pairs into a valid tree, repairing as needed.");
  m.def("validate", &validate_py, py::arg("heads"));
  m.def(
      "is_projective",
      [](std::vector<int> heads) { return is_projective(make_tree(std::move(heads), {})); },
      py::arg("heads"));
  m.def(
      "oracle",
      [](const std::string& conllu, const std::string& encoding, const std::string& pos_source,
         bool exclude_punct) {
        const auto bank = read_conllu_string(conllu);
        return scores_dict(oracle_roundtrip(bank, parse_encoding(encoding),
                                            parse_pos_source(pos_source), scoring(exclude_punct)));
      },
      py::arg("conllu"), py::arg("encoding"), py::arg("pos_source") = "upos",
      py::arg("exclude_punct") = false, "Encode-decode round-trip scores of a CoNLL-U text.");
  m.def(
      "attachment_scores",
      [](const std::string& gold, const std::string& pred, bool exclude_punct) {
        const auto g = read_conllu_string(gold);
        const auto p = read_conllu_string(pred);
        return scores_dict(attachment_scores(g, p, scoring(exclude_punct)));
      },
      py::arg("gold"), py::arg("pred"), py::arg("exclude_punct") = false);

  py::class_<Model>(m, "Model")
      .def_property_readonly("encoding",
                             [](const Model& self) { return std::string(to_string(self.model.encoding())); })
      .def_property_readonly("labels", [](const Model& self) { return self.model.labels(); })
      .def("parse", &Model::parse_text, py::arg("conllu"), py::arg("single_root") = false,
           py::arg("k") = kRootSearchDepth, "Parses CoNLL-U text; returns CoNLL-U text.")
      .def("dumps", &Model::dumps)
      .def_static("loads", &Model::loads, py::arg("text"));
  m.def("train", &train_py, py::arg("conllu"), py::arg("encoding") = "relpos",
        py::arg("pos_source") = "upos", py::arg("epochs") = 10, py::arg("seed") = 1);

  m.def("run_cli", &run_cli_py, py::arg("args"),
        "Runs the command-line tool in-process; returns (exit code, stdout, stderr).");
}
