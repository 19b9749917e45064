#include "igkit/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <future>
#include <sstream>
#include <thread>

#include "igkit/error.hpp"

namespace igkit {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path PipelineConfig::model_path() const {
  return model ? *model : out / "model.tsv";
}

json to_json(const PipelineConfig& c) {
  json j;
  j["corpus"] = c.corpus.generic_string();
  j["gold"] = c.gold ? json(c.gold->generic_string()) : json(nullptr);
  j["model"] = c.model ? json(c.model->generic_string()) : json(nullptr);
  j["taxonomy"] = c.taxonomy ? json(c.taxonomy->generic_string()) : json(nullptr);
  j["min_cluster_size"] = c.clustering.min_cluster_size;
  j["distance_threshold"] = c.clustering.distance_threshold;
  j["embed_dim"] = c.embed_dim;
  j["seed"] = c.seed;
  j["epochs"] = c.epochs;
  j["top_k"] = c.top_k;
  j["topic_terms"] = c.topic_terms;
  j["format"] = to_string(c.format);
  return j;
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::Ingest, Stage::Train, Stage::Extract, Stage::Cluster,
                  Stage::Analyze, Stage::Report, Stage::All}) {
    if (to_string(s) == name) return s;
  }
  throw Error("unknown subcommand \"" + std::string(name) + "\"");
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::Train: return "train";
    case Stage::Extract: return "extract";
    case Stage::Cluster: return "cluster";
    case Stage::Analyze: return "analyze";
    case Stage::Report: return "report";
    case Stage::All: return "all";
  }
  return "?";
}

namespace {

void require_file(const fs::path& path, std::string_view what) {
  if (!fs::is_regular_file(path)) {
    throw Error("missing " + std::string(what) + ": " + path.string());
  }
}

// Prerequisite artifact written by an earlier stage.
void require_artifact(const fs::path& path, Stage producer) {
  if (!fs::is_regular_file(path)) {
    throw Error("missing " + path.string() + " (run `ig " + std::string(to_string(producer)) +
                "` first)");
  }
}

std::ifstream open(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream buffer;
  fn(buffer);
  write_text_file(path, buffer.str());
}

Corpus load_statements(const PipelineConfig& c) {
  const fs::path path = c.out / artifacts::kStatements;
  require_artifact(path, Stage::Ingest);
  return load_corpus(path, Format::Jsonl);
}

std::vector<ComponentSpan> load_extraction(const PipelineConfig& c) {
  const fs::path path = c.out / artifacts::kExtraction;
  require_artifact(path, Stage::Extract);
  auto in = open(path);
  return read_spans_jsonl(in);
}

ClusterAssignment load_clusters(const fs::path& path) {
  require_artifact(path, Stage::Cluster);
  auto in = open(path);
  return read_clusters_jsonl(in);
}

}  // namespace

void validate(const PipelineConfig& c, Stage stage) {
  validate(c.clustering);
  if (c.embed_dim == 0) throw Error("--embed-dim must be positive");
  if (c.top_k == 0) throw Error("--top-k must be at least 1");
  if (c.epochs <= 0) throw Error("--epochs must be positive");
  if (c.out.empty()) throw Error("--out is required");
  const bool all = stage == Stage::All;
  if (all || stage == Stage::Ingest) {
    if (c.corpus.empty()) throw Error("--corpus is required");
    require_file(c.corpus, "corpus file");
  }
  if (all || stage == Stage::Train) {
    if (!c.gold) throw Error("--gold is required for training");
    require_file(*c.gold, "gold file");
  }
  if (stage == Stage::Extract) require_file(c.model_path(), "model file");
  if (all || stage == Stage::Analyze) {
    if (!c.taxonomy) throw Error("--taxonomy is required for analysis");
    require_file(*c.taxonomy, "taxonomy file");
  }
}

std::vector<ComponentSpan> extract_spans(const TokenClassifierModel& model,
                                         const Corpus& corpus) {
  const auto statements = corpus.statements();
  std::vector<std::vector<ComponentSpan>> per_statement(statements.size());

  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  const std::size_t chunk = (statements.size() + workers - 1) / std::max<std::size_t>(workers, 1);
  std::vector<std::future<void>> jobs;
  for (std::size_t begin = 0; begin < statements.size(); begin += chunk) {
    const std::size_t end = std::min(statements.size(), begin + chunk);
    jobs.push_back(std::async(std::launch::async, [&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        const InstitutionalStatement& s = *statements[i];
        const auto labels = model.predict(annotate_syntax(s.tokens));
        per_statement[i] = group_spans(labels, s.tokens, s.statement_id);
      }
    }));
  }
  for (auto& job : jobs) job.get();

  std::vector<ComponentSpan> spans;
  for (auto& group : per_statement) {
    std::move(group.begin(), group.end(), std::back_inserter(spans));
  }
  return spans;
}

ClusterAssignment cluster_spans(std::span<const ComponentSpan> spans, ComponentLabel label,
                                const Embedder& embedder, const ClusterParams& params,
                                std::size_t topic_terms) {
  std::vector<EmbeddingVector> vectors;
  std::vector<std::string> texts;
  for (const ComponentSpan& s : spans) {
    if (s.label != label) continue;
    EmbeddingVector v = embedder.embed(s.text);
    v.source = s.ref();
    vectors.push_back(std::move(v));
    texts.push_back(s.text);
  }
  if (vectors.empty()) return {};
  ClusterAssignment assignment = cluster(vectors, params);
  attach_topics(assignment, texts, topic_terms);
  return assignment;
}

AnalysisOutcome analyze(const Corpus& corpus, std::span<const ComponentSpan> spans,
                        const ClusterAssignment& agents, const ClusterAssignment& objects,
                        const CategoryMap& taxonomy) {
  std::unordered_map<std::string, std::vector<const ComponentSpan*>> by_statement;
  for (const ComponentSpan& s : spans) {
    if (corpus.find(s.statement_id) == nullptr) {
      throw Error("extraction references unknown statement_id \"" + s.statement_id + "\"");
    }
    by_statement[s.statement_id].push_back(&s);
  }

  AnalysisOutcome out;
  for (const InstitutionalStatement* st : corpus.statements()) {
    AnalysisRecord r;
    r.statement_id = st->statement_id;
    r.doc_id = st->doc_id;
    const ComponentSpan* agent = nullptr;
    const ComponentSpan* object = nullptr;
    const ComponentSpan* deontic = nullptr;
    if (auto it = by_statement.find(st->statement_id); it != by_statement.end()) {
      for (const ComponentSpan* s : it->second) {
        if (s->label == ComponentLabel::A && !agent) agent = s;
        if (s->label == ComponentLabel::B && !object) object = s;
        if (s->label == ComponentLabel::D && !deontic) deontic = s;
      }
    }
    if (agent) {
      const Category c = categorize_component(*agent, agents, taxonomy, ComponentKind::Agent);
      if (const auto* a = std::get_if<AgentCategory>(&c)) r.agent_category = *a;
      else ++out.agent_other;
    }
    if (object) {
      const Category c = categorize_component(*object, objects, taxonomy, ComponentKind::Object);
      if (const auto* o = std::get_if<ObjectCategory>(&c)) r.object_category = *o;
      else ++out.object_other;
    }
    if (deontic) {
      r.deontic_class = classify_deontic(deontic->text);
      std::string lowered = deontic->text;
      for (char& ch : lowered) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      r.deontic_text = lowered;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

void write_analysis_jsonl(std::span<const AnalysisRecord> records, std::ostream& out) {
  auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  for (const AnalysisRecord& r : records) {
    json j;
    j["statement_id"] = r.statement_id;
    j["doc_id"] = r.doc_id;
    j["agent"] = opt(field_value(r, Field::Agent));
    j["object"] = opt(field_value(r, Field::Object));
    j["deontic_class"] = opt(field_value(r, Field::DeonticClass));
    j["deontic"] = opt(r.deontic_text);
    out << j.dump() << '\n';
  }
}

std::vector<AnalysisRecord> read_analysis_jsonl(std::istream& in) {
  std::vector<AnalysisRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      AnalysisRecord r;
      r.statement_id = j.at("statement_id").get<std::string>();
      r.doc_id = j.at("doc_id").get<std::string>();
      auto str = [&](const char* key) -> std::optional<std::string> {
        const auto& v = j.at(key);
        if (v.is_null()) return std::nullopt;
        return v.get<std::string>();
      };
      if (auto v = str("agent")) {
        r.agent_category = parse_agent_category(*v);
        if (!r.agent_category) throw Error("unknown agent category " + *v);
      }
      if (auto v = str("object")) {
        r.object_category = parse_object_category(*v);
        if (!r.object_category) throw Error("unknown object category " + *v);
      }
      if (auto v = str("deontic_class")) {
        r.deontic_class = parse_deontic_class(*v);
        if (!r.deontic_class) throw Error("unknown deontic class " + *v);
      }
      r.deontic_text = str("deontic");
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error("analysis line " + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("analysis line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

RunReport build_report(const Corpus& corpus, std::span<const ComponentSpan> spans,
                       std::span<const AnalysisRecord> records,
                       const ClusterAssignment& agents, const ClusterAssignment& objects,
                       const PipelineConfig& config) {
  RunReport report;
  report.corpus_digest = corpus.digest();
  report.extraction_file = artifacts::kExtraction;
  report.statement_count = static_cast<std::int64_t>(corpus.statement_count());
  report.config = to_json(config);
  for (ComponentLabel l : kAllLabels) {
    if (l != ComponentLabel::None) report.component_counts[std::string(to_string(l))] = 0;
  }
  for (const ComponentSpan& s : spans) ++report.component_counts[std::string(to_string(s.label))];

  report.histograms = {
      {"doc", "Statements per document", histogram(records, Field::Doc)},
      {"agent", "Statements by agent category", histogram(records, Field::Agent)},
      {"object", "Statements by object category", histogram(records, Field::Object)},
      {"deontic_class", "Statements by deontic strength", histogram(records, Field::DeonticClass)},
      {"deontic", "Statements by deontic", histogram(records, Field::DeonticText)},
  };
  report.crosstabs = {
      {"agent_x_deontic", "Agent by deontic", crosstab(records, Field::Agent, Field::DeonticText)},
      {"object_x_deontic", "Object by deontic", crosstab(records, Field::Object, Field::DeonticText)},
      {"agent_x_deontic_class", "Agent by deontic strength",
       crosstab(records, Field::Agent, Field::DeonticClass)},
      {"object_x_deontic_class", "Object by deontic strength",
       crosstab(records, Field::Object, Field::DeonticClass)},
      {"agent_x_object", "Agent by object", crosstab(records, Field::Agent, Field::Object)},
  };

  const bool any_deontic = std::any_of(records.begin(), records.end(),
                                       [](const AnalysisRecord& r) { return r.deontic_text.has_value(); });
  const std::string k = std::to_string(config.top_k);
  for (const auto& [name, title, row] :
       {std::tuple{"agent_deontic_test", "Agent x top-" + k + " deontics", Field::Agent},
        std::tuple{"object_deontic_test", "Object x top-" + k + " deontics", Field::Object}}) {
    NamedTest test{name, title, std::nullopt, std::nullopt, {}};
    if (!any_deontic) {
      test.skipped_reason = "no deontic spans were extracted";
    } else {
      test.tested = top_k_filter(crosstab(records, row, Field::DeonticText), Axis::Cols, config.top_k);
      try {
        test.result = chi_square(*test.tested);
        for (const auto* dropped : {&test.result->dropped_rows, &test.result->dropped_cols}) {
          for (const std::string& label : *dropped) {
            std::clog << "warning: " << name << ": dropped zero-marginal label \"" << label << "\"\n";
          }
        }
      } catch (const Error& e) {
        test.skipped_reason = e.what();
      }
    }
    report.tests.push_back(std::move(test));
  }

  report.exclusions["agent_other"] = 0;
  report.exclusions["object_other"] = 0;
  report.exclusions["agent_noise"] = static_cast<std::int64_t>(agents.noise_count());
  report.exclusions["object_noise"] = static_cast<std::int64_t>(objects.noise_count());
  // Other-bucket counts are recomputed from the records: a statement with an
  // agent span but no agent category fell through the taxonomy.
  std::unordered_map<std::string, std::pair<bool, bool>> has;
  for (const ComponentSpan& s : spans) {
    auto& h = has[s.statement_id];
    if (s.label == ComponentLabel::A) h.first = true;
    if (s.label == ComponentLabel::B) h.second = true;
  }
  for (const AnalysisRecord& r : records) {
    auto it = has.find(r.statement_id);
    if (it == has.end()) continue;
    if (it->second.first && !r.agent_category) ++report.exclusions["agent_other"];
    if (it->second.second && !r.object_category) ++report.exclusions["object_other"];
  }
  return report;
}

void run_ingest(const PipelineConfig& c) {
  validate(c, Stage::Ingest);
  const Corpus corpus = load_corpus(c.corpus, c.format);
  write_with(c.out / artifacts::kStatements,
             [&](std::ostream& out) { write_corpus(corpus, out, Format::Jsonl); });
}

void run_train(const PipelineConfig& c) {
  validate(c, Stage::Train);
  const Corpus corpus = load_statements(c);
  const auto gold = load_gold(*c.gold, corpus, c.format);
  const auto examples = make_examples(corpus, gold);
  const TokenClassifierModel model = train(examples, c.epochs, c.seed, corpus.digest());
  const fs::path path = c.model_path();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  model.save(path);
}

void run_extract(const PipelineConfig& c) {
  validate(c, Stage::Extract);
  const Corpus corpus = load_statements(c);
  const auto model = TokenClassifierModel::load(c.model_path());
  const auto spans = extract_spans(model, corpus);
  write_with(c.out / artifacts::kExtraction,
             [&](std::ostream& out) { write_spans_jsonl(spans, out); });
}

void run_cluster(const PipelineConfig& c) {
  validate(c, Stage::Cluster);
  const auto spans = load_extraction(c);
  const TrigramHashEmbedder embedder(c.embed_dim);
  const auto agents = cluster_spans(spans, ComponentLabel::A, embedder, c.clustering, c.topic_terms);
  const auto objects = cluster_spans(spans, ComponentLabel::B, embedder, c.clustering, c.topic_terms);
  write_with(c.out / artifacts::kAgentClusters, [&](std::ostream& o) { write_clusters_jsonl(agents, o); });
  write_with(c.out / artifacts::kObjectClusters, [&](std::ostream& o) { write_clusters_jsonl(objects, o); });
  write_with(c.out / artifacts::kAgentTopics, [&](std::ostream& o) { write_topics_jsonl(agents, o); });
  write_with(c.out / artifacts::kObjectTopics, [&](std::ostream& o) { write_topics_jsonl(objects, o); });
}

void run_analyze(const PipelineConfig& c) {
  validate(c, Stage::Analyze);
  const Corpus corpus = load_statements(c);
  const auto spans = load_extraction(c);
  const auto agents = load_clusters(c.out / artifacts::kAgentClusters);
  const auto objects = load_clusters(c.out / artifacts::kObjectClusters);
  const CategoryMap taxonomy = load_taxonomy(*c.taxonomy);
  const AnalysisOutcome outcome = analyze(corpus, spans, agents, objects, taxonomy);
  write_with(c.out / artifacts::kAnalysis,
             [&](std::ostream& out) { write_analysis_jsonl(outcome.records, out); });
}

RunReport run_report(const PipelineConfig& c) {
  validate(c, Stage::Report);
  const Corpus corpus = load_statements(c);
  const auto spans = load_extraction(c);
  const auto agents = load_clusters(c.out / artifacts::kAgentClusters);
  const auto objects = load_clusters(c.out / artifacts::kObjectClusters);
  const fs::path analysis_path = c.out / artifacts::kAnalysis;
  require_artifact(analysis_path, Stage::Analyze);
  auto in = open(analysis_path);
  const auto records = read_analysis_jsonl(in);
  RunReport report = build_report(corpus, spans, records, agents, objects, c);
  write_report(report, c.out);
  return report;
}

void run_stage(Stage stage, const PipelineConfig& c) {
  switch (stage) {
    case Stage::Ingest: run_ingest(c); break;
    case Stage::Train: run_train(c); break;
    case Stage::Extract: run_extract(c); break;
    case Stage::Cluster: run_cluster(c); break;
    case Stage::Analyze: run_analyze(c); break;
    case Stage::Report: run_report(c); break;
    case Stage::All:
      validate(c, Stage::All);
      for (Stage s : {Stage::Ingest, Stage::Train, Stage::Extract, Stage::Cluster,
                      Stage::Analyze, Stage::Report}) {
        run_stage(s, c);
      }
      break;
  }
}

}  // namespace igkit
