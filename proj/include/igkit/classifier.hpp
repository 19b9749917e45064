#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "igkit/corpus.hpp"
#include "igkit/labels.hpp"
#include "igkit/syntax.hpp"

namespace igkit {

/// A contiguous token run carrying one non-NONE label.
struct ComponentSpan {
  std::string statement_id;
  ComponentLabel label = ComponentLabel::None;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::string text;

  /// "<statement_id>:<start>-<end>", the key used by clustering output.
  std::string ref() const;

  bool operator==(const ComponentSpan&) const = default;
};

/// Maximal runs of equal labels become spans; NONE runs are dropped.
/// Throws igkit::Error when the lengths differ.
std::vector<ComponentSpan> group_spans(std::span<const ComponentLabel> labels,
                                       std::span<const std::string> tokens,
                                       std::string_view statement_id);

/// Inverse of group_spans: NONE everywhere outside the spans.
std::vector<ComponentLabel> labels_from_spans(std::span<const ComponentSpan> spans,
                                              std::size_t token_count);

/// One gold-labelled statement with its syntactic annotation.
struct TrainingExample {
  std::string statement_id;
  std::vector<SyntacticToken> tokens;
  std::vector<ComponentLabel> labels;
};

/// Joins gold annotations with their corpus statements. Throws naming the
/// statement_id on unknown ids or alignment failures.
std::vector<TrainingExample> make_examples(const Corpus& corpus,
                                           std::span<const GoldAnnotation> gold);

/// Seeded shuffle, then the first round(train_fraction * n) examples train.
std::pair<std::vector<TrainingExample>, std::vector<TrainingExample>>
split_examples(std::vector<TrainingExample> examples, double train_fraction,
               std::uint64_t seed);

struct ModelMetadata {
  std::uint64_t seed = 0;
  int epochs = 0;
  std::string corpus_digest;

  bool operator==(const ModelMetadata&) const = default;
};

/// Linear multi-class token scorer: score(label) = sum over active features
/// of value * weight(feature, label).
class TokenClassifierModel {
 public:
  using WeightRow = std::array<double, kLabelCount>;

  TokenClassifierModel() = default;

  const ModelMetadata& metadata() const { return metadata_; }
  void set_metadata(ModelMetadata metadata) { metadata_ = std::move(metadata); }

  void set_weight(const std::string& feature, ComponentLabel label, double value);
  double weight(const std::string& feature, ComponentLabel label) const;
  std::size_t feature_count() const { return weights_.size(); }

  /// Sorted copy of every non-zero weight.
  std::map<std::pair<std::string, ComponentLabel>, double> weights() const;

  WeightRow scores(const FeatureVector& features) const;

  /// Argmax per token; ties go to the earliest label in A < B < D < I < C < O
  /// < NONE.
  std::vector<ComponentLabel> predict(std::span<const SyntacticToken> tokens) const;

  /// Text form: "#"-prefixed metadata header, then one
  /// "feature<TAB>label<TAB>weight" line per non-zero weight, sorted, with
  /// weights printed to round-trip exactly.
  void save(std::ostream& out) const;
  static TokenClassifierModel load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static TokenClassifierModel load(const std::filesystem::path& path);

 private:
  std::unordered_map<std::string, WeightRow> weights_;
  ModelMetadata metadata_;
};

/// Averaged perceptron. Example order is reshuffled every epoch from a
/// generator seeded with `seed`, so the result depends only on the inputs.
TokenClassifierModel train(std::span<const TrainingExample> gold, int epochs,
                           std::uint64_t seed, std::string corpus_digest = {});

inline std::vector<ComponentLabel> predict(const TokenClassifierModel& model,
                                           std::span<const SyntacticToken> tokens) {
  return model.predict(tokens);
}

struct LabelMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold occurrences
};

struct Metrics {
  double token_accuracy = 0.0;
  std::size_t token_count = 0;
  std::map<ComponentLabel, LabelMetrics> per_label;
};

/// Token-level metrics over labels present in gold or prediction. F1 is 0
/// when precision + recall is 0.
Metrics evaluate(const TokenClassifierModel& model,
                 std::span<const TrainingExample> held_out);

/// Metrics from already-predicted label sequences.
Metrics score_predictions(std::span<const std::vector<ComponentLabel>> gold,
                          std::span<const std::vector<ComponentLabel>> predicted);

/// Extraction records: {"statement_id", "label", "start", "end", "text"}.
void write_spans_jsonl(std::span<const ComponentSpan> spans, std::ostream& out);
std::vector<ComponentSpan> read_spans_jsonl(std::istream& in);

}  // namespace igkit
