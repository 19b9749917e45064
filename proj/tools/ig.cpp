// ig: command-line driver for the institutional-grammar analysis pipeline.
//
//   ig <ingest|train|extract|cluster|analyze|report|all> [flags]
//
// Flags mirror PipelineConfig one-to-one; --config FILE may supply any
// subset of them (TOML/INI "key = value" lines) and flags on the command
// line override it. IG_SEED is consulted when --seed is absent.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "igkit/error.hpp"
#include "igkit/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Institutional grammar (ABDICO) extraction and analysis pipeline", "ig"};
  app.set_config("--config", "", "Read flags from a config file");

  igkit::PipelineConfig config;
  std::string stage = "all";
  std::string corpus, gold, model, taxonomy, out = config.out.string();
  std::string format = "jsonl";

  app.add_option("stage", stage, "Pipeline stage")
      ->required()
      ->check(CLI::IsMember({"ingest", "train", "extract", "cluster", "analyze", "report", "all"}));
  app.add_option("--corpus", corpus, "Statement corpus (jsonl or csv)");
  app.add_option("--gold", gold, "Gold ABDICO annotations");
  app.add_option("--model", model, "Model file (default <out>/model.tsv)");
  app.add_option("--taxonomy", taxonomy, "Category mapping config");
  app.add_option("--seed", config.seed, "Training seed")->envname("IG_SEED")->capture_default_str();
  app.add_option("--epochs", config.epochs, "Perceptron epochs")->capture_default_str();
  app.add_option("--min-cluster-size", config.clustering.min_cluster_size,
                 "Smallest non-noise cluster")->capture_default_str();
  app.add_option("--distance-threshold", config.clustering.distance_threshold,
                 "Average-linkage cosine distance cut-off")->capture_default_str();
  app.add_option("--embed-dim", config.embed_dim, "Embedding dimension")->capture_default_str();
  app.add_option("--top-k", config.top_k, "Deontic columns kept for the tests")->capture_default_str();
  app.add_option("--topic-terms", config.topic_terms, "Keywords per cluster")->capture_default_str();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--format", format, "Input format of corpus and gold files")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    config.corpus = corpus;
    if (!gold.empty()) config.gold = gold;
    if (!model.empty()) config.model = model;
    if (!taxonomy.empty()) config.taxonomy = taxonomy;
    config.out = out;
    config.format = igkit::parse_format(format);
    igkit::run_stage(igkit::parse_stage(stage), config);
  } catch (const igkit::Error& e) {
    std::cerr << "ig " << stage << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ig " << stage << ": unexpected error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
