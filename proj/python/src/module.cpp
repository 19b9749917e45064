#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "igkit/classifier.hpp"
#include "igkit/clustering.hpp"
#include "igkit/corpus.hpp"
#include "igkit/error.hpp"
#include "igkit/pipeline.hpp"
#include "igkit/stats.hpp"
#include "igkit/syntax.hpp"
#include "igkit/taxonomy.hpp"

namespace py = pybind11;
using namespace igkit;

namespace {

py::dict span_dict(const ComponentSpan& s) {
  py::dict d;
  d["statement_id"] = s.statement_id;
  d["label"] = std::string(to_string(s.label));
  d["start"] = s.start;
  d["end"] = s.end;
  d["text"] = s.text;
  return d;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict per_label;
  for (const auto& [label, lm] : m.per_label) {
    py::dict d;
    d["precision"] = lm.precision;
    d["recall"] = lm.recall;
    d["f1"] = lm.f1;
    d["support"] = lm.support;
    per_label[py::str(std::string(to_string(label)))] = d;
  }
  py::dict out;
  out["token_accuracy"] = m.token_accuracy;
  out["token_count"] = m.token_count;
  out["per_label"] = per_label;
  return out;
}

std::vector<TrainingExample> load_examples(const std::string& corpus_path, const std::string& gold_path,
                                           const std::string& format) {
  const Format f = parse_format(format);
  const Corpus corpus = load_corpus(corpus_path, f);
  return make_examples(corpus, load_gold(gold_path, corpus, f));
}

}  // namespace

PYBIND11_MODULE(_igkit, m) {
  m.doc() = "Institutional grammar extraction and analysis";
  py::register_exception<Error>(m, "IgkitError", PyExc_ValueError);

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("join_tokens", [](const std::vector<std::string>& t) { return join_tokens(t); },
        py::arg("tokens"));

  m.def(
      "segment_statements",
      [](const std::string& raw, const std::string& doc_id) {
        py::list out;
        for (const auto& s : segment_statements(raw, doc_id)) {
          py::dict d;
          d["statement_id"] = s.statement_id;
          d["doc_id"] = s.doc_id;
          d["text"] = s.text;
          out.append(d);
        }
        return out;
      },
      py::arg("raw"), py::arg("doc_id"));

  m.def(
      "load_corpus",
      [](const std::string& path, const std::string& format) {
        const Corpus corpus = load_corpus(path, parse_format(format));
        py::list docs;
        for (const auto& doc : corpus.documents()) {
          py::dict d;
          d["doc_id"] = doc.doc_id;
          d["title"] = doc.title;
          d["statement_count"] = doc.statements.size();
          docs.append(d);
        }
        py::dict out;
        out["documents"] = docs;
        out["statement_count"] = corpus.statement_count();
        out["digest"] = corpus.digest();
        return out;
      },
      py::arg("path"), py::arg("format") = "jsonl");

  m.def(
      "group_spans",
      [](const std::vector<std::string>& labels, const std::vector<std::string>& tokens,
         const std::string& statement_id) {
        std::vector<ComponentLabel> parsed;
        for (const auto& l : labels) parsed.push_back(parse_label(l));
        py::list out;
        for (const auto& s : group_spans(parsed, tokens, statement_id)) out.append(span_dict(s));
        return out;
      },
      py::arg("labels"), py::arg("tokens"), py::arg("statement_id") = "s");

  m.def(
      "train",
      [](const std::string& corpus, const std::string& gold, const std::string& model_path,
         int epochs, std::uint64_t seed, const std::string& format) {
        const auto examples = load_examples(corpus, gold, format);
        const Corpus c = load_corpus(corpus, parse_format(format));
        train(examples, epochs, seed, c.digest()).save(std::filesystem::path(model_path));
      },
      py::arg("corpus"), py::arg("gold"), py::arg("model_path"), py::arg("epochs") = 10,
      py::arg("seed") = 42, py::arg("format") = "jsonl");

  m.def(
      "evaluate_split",
      [](const std::string& corpus, const std::string& gold, double train_fraction, int epochs,
         std::uint64_t seed, const std::string& format) {
        const auto [train_set, held_out] =
            split_examples(load_examples(corpus, gold, format), train_fraction, seed);
        if (held_out.empty()) throw Error("held-out set is empty");
        return metrics_dict(evaluate(train(train_set, epochs, seed), held_out));
      },
      py::arg("corpus"), py::arg("gold"), py::arg("train_fraction") = 0.8, py::arg("epochs") = 10,
      py::arg("seed") = 42, py::arg("format") = "jsonl");

  m.def(
      "predict",
      [](const std::string& model_path, const std::string& text) {
        const auto model = TokenClassifierModel::load(std::filesystem::path(model_path));
        const auto tokens = tokenize(text);
        py::list out;
        for (const auto& s : group_spans(model.predict(annotate_syntax(tokens)), tokens, "s"))
          out.append(span_dict(s));
        return out;
      },
      py::arg("model_path"), py::arg("text"));

  m.def(
      "embed", [](const std::string& text, std::size_t dim) { return embed(text, dim).values; },
      py::arg("text"), py::arg("dim") = kDefaultEmbeddingDim);

  m.def(
      "cluster",
      [](const std::vector<std::string>& texts, std::size_t min_cluster_size,
         double distance_threshold, std::size_t dim) {
        std::vector<EmbeddingVector> vectors;
        for (const auto& t : texts) vectors.push_back(embed(t, dim));
        const ClusterAssignment a = cluster(vectors, {min_cluster_size, distance_threshold});
        std::vector<std::optional<int>> out;
        for (const auto& item : a.items)
          out.push_back(item.cluster.is_noise() ? std::nullopt : std::optional(item.cluster.value()));
        return out;
      },
      py::arg("texts"), py::arg("min_cluster_size") = 2, py::arg("distance_threshold") = 0.6,
      py::arg("dim") = kDefaultEmbeddingDim);

  m.def(
      "classify_deontic",
      [](const std::string& text) { return std::string(to_string(classify_deontic(text))); },
      py::arg("text"));

  m.def(
      "chi_square",
      [](const std::vector<std::vector<std::int64_t>>& counts) {
        std::vector<std::string> rows, cols;
        for (std::size_t i = 0; i < counts.size(); ++i) rows.push_back("r" + std::to_string(i));
        if (!counts.empty())
          for (std::size_t j = 0; j < counts[0].size(); ++j) cols.push_back("c" + std::to_string(j));
        const ChiSquareResult r = chi_square(make_table(rows, cols, counts));
        py::dict out;
        out["statistic"] = r.statistic;
        out["df"] = r.df;
        out["p"] = r.p_value;
        out["n"] = r.n;
        out["line"] = format_result(r);
        return out;
      },
      py::arg("counts"));
  m.def("chi_square_p_value", &chi_square_p_value, py::arg("statistic"), py::arg("df"));

  m.def(
      "run",
      [](const std::string& stage, const std::string& corpus, const std::string& out,
         std::optional<std::string> gold, std::optional<std::string> model,
         std::optional<std::string> taxonomy, std::uint64_t seed, int epochs,
         std::size_t min_cluster_size, double distance_threshold, std::size_t embed_dim,
         std::size_t top_k, const std::string& format) {
        PipelineConfig c;
        c.corpus = corpus;
        c.out = out;
        if (gold) c.gold = *gold;
        if (model) c.model = *model;
        if (taxonomy) c.taxonomy = *taxonomy;
        c.seed = seed;
        c.epochs = epochs;
        c.clustering = {min_cluster_size, distance_threshold};
        c.embed_dim = embed_dim;
        c.top_k = top_k;
        c.format = parse_format(format);
        py::gil_scoped_release release;
        run_stage(parse_stage(stage), c);
      },
      py::arg("stage"), py::arg("corpus"), py::arg("out"), py::arg("gold") = std::nullopt,
      py::arg("model") = std::nullopt, py::arg("taxonomy") = std::nullopt, py::arg("seed") = 42,
      py::arg("epochs") = 10, py::arg("min_cluster_size") = 2, py::arg("distance_threshold") = 0.6,
      py::arg("embed_dim") = kDefaultEmbeddingDim, py::arg("top_k") = 3, py::arg("format") = "jsonl");
}
