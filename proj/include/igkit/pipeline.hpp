#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "igkit/classifier.hpp"
#include "igkit/clustering.hpp"
#include "igkit/corpus.hpp"
#include "igkit/report.hpp"
#include "igkit/stats.hpp"
#include "igkit/taxonomy.hpp"

namespace igkit {

struct PipelineConfig {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> gold;
  std::optional<std::filesystem::path> model;  // default: <out>/model.tsv
  std::optional<std::filesystem::path> taxonomy;
  ClusterParams clustering;
  std::size_t embed_dim = kDefaultEmbeddingDim;
  std::uint64_t seed = 42;
  int epochs = 10;
  std::size_t top_k = 3;
  std::size_t topic_terms = 5;
  Format format = Format::Jsonl;
  std::filesystem::path out = "runs/default";

  std::filesystem::path model_path() const;
};

/// Everything needed to repeat the run; the output directory is left out so
/// that identical runs into different directories produce identical files.
nlohmann::json to_json(const PipelineConfig& config);

enum class Stage { Ingest, Train, Extract, Cluster, Analyze, Report, All };

/// "ingest", "train", "extract", "cluster", "analyze", "report" or "all".
Stage parse_stage(std::string_view name);
std::string_view to_string(Stage stage);

/// Checks the inputs the stage reads directly from the config (not
/// artifacts produced by earlier stages). Throws igkit::Error.
void validate(const PipelineConfig& config, Stage stage);

// Artifact locations inside the output directory.
namespace artifacts {
inline constexpr const char* kStatements = "statements.jsonl";
inline constexpr const char* kExtraction = "extraction.jsonl";
inline constexpr const char* kAnalysis = "analysis.jsonl";
inline constexpr const char* kAgentClusters = "clusters/agent.jsonl";
inline constexpr const char* kObjectClusters = "clusters/object.jsonl";
inline constexpr const char* kAgentTopics = "topics/agent.jsonl";
inline constexpr const char* kObjectTopics = "topics/object.jsonl";
}  // namespace artifacts

/// Predicts and groups spans for every statement, restoring corpus order.
std::vector<ComponentSpan> extract_spans(const TokenClassifierModel& model,
                                         const Corpus& corpus);

/// Embeds and clusters the spans carrying `label`; item refs are span refs.
ClusterAssignment cluster_spans(std::span<const ComponentSpan> spans,
                                ComponentLabel label, const Embedder& embedder,
                                const ClusterParams& params, std::size_t topic_terms);

struct AnalysisOutcome {
  std::vector<AnalysisRecord> records;
  std::int64_t agent_other = 0;
  std::int64_t object_other = 0;
};

/// One record per corpus statement built from its first A, B and D spans.
AnalysisOutcome analyze(const Corpus& corpus, std::span<const ComponentSpan> spans,
                        const ClusterAssignment& agents, const ClusterAssignment& objects,
                        const CategoryMap& taxonomy);

void write_analysis_jsonl(std::span<const AnalysisRecord> records, std::ostream& out);
std::vector<AnalysisRecord> read_analysis_jsonl(std::istream& in);

/// Histograms, crosstabs and the two agent/object x deontic tests (top-k
/// deontic columns), assembled into a report.
RunReport build_report(const Corpus& corpus, std::span<const ComponentSpan> spans,
                       std::span<const AnalysisRecord> records,
                       const ClusterAssignment& agents, const ClusterAssignment& objects,
                       const PipelineConfig& config);

void run_ingest(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
void run_extract(const PipelineConfig& config);
void run_cluster(const PipelineConfig& config);
void run_analyze(const PipelineConfig& config);
RunReport run_report(const PipelineConfig& config);

/// Runs one stage ("all" chains them in order). Throws igkit::Error with a
/// diagnostic naming any missing prerequisite file.
void run_stage(Stage stage, const PipelineConfig& config);

}  // namespace igkit
