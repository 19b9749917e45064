#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace igkit {

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

struct EmbeddingVector {
  std::vector<double> values;
  std::string source;  // text (or component ref) the vector stands for

  bool operator==(const EmbeddingVector&) const = default;
};

/// Pluggable text embedder. Implementations must return unit-norm vectors for
/// non-empty text and the zero vector for text without word characters.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

/// Default backend. The text is lowercased, every non-alphanumeric byte
/// becomes a space, whitespace runs collapse, and the result is wrapped as
/// "#<text>#". Each character trigram is hashed with 32-bit FNV-1a
/// (offset 2166136261, prime 16777619) into bucket hash % dimension; bucket
/// counts are then L2-normalized.
class TrigramHashEmbedder final : public Embedder {
 public:
  explicit TrigramHashEmbedder(std::size_t dimension = kDefaultEmbeddingDim);
  std::size_t dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

EmbeddingVector embed(std::string_view text,
                      std::size_t dimension = kDefaultEmbeddingDim);

/// Normalized form fed to the trigram hasher ("" when nothing remains).
std::string normalize_for_embedding(std::string_view text);

/// Cosine similarity; 0 when either vector is zero.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// A cluster number, or the noise bucket.
class ClusterId {
 public:
  static constexpr ClusterId noise() { return ClusterId(); }
  static constexpr ClusterId of(int id) { return ClusterId(id); }

  constexpr bool is_noise() const { return value_ < 0; }
  constexpr int value() const { return value_; }
  std::string to_string() const;

  constexpr auto operator<=>(const ClusterId&) const = default;

 private:
  constexpr ClusterId() = default;
  constexpr explicit ClusterId(int v) : value_(v) {}
  int value_ = -1;
};

struct ClusterItem {
  std::string component_ref;
  ClusterId cluster = ClusterId::noise();

  bool operator==(const ClusterItem&) const = default;
};

struct TopicTerm {
  std::string term;
  double score = 0.0;

  bool operator==(const TopicTerm&) const = default;
};

struct ClusterAssignment {
  std::vector<ClusterItem> items;                 // input order
  std::map<int, std::vector<TopicTerm>> topics;   // empty until topic_terms runs

  std::size_t cluster_count() const;
  std::size_t noise_count() const;
  /// nullopt when `component_ref` is not present.
  std::optional<ClusterId> find(std::string_view component_ref) const;
};

struct ClusterParams {
  std::size_t min_cluster_size = 2;
  double distance_threshold = 0.6;
};

/// Throws igkit::Error unless min_cluster_size >= 2 and the threshold lies in
/// (0, 2).
void validate(const ClusterParams& params);

/// Pluggable grouping backend over embedded vectors.
class ClusterBackend {
 public:
  virtual ~ClusterBackend() = default;
  /// One id per vector, in input order.
  virtual std::vector<ClusterId> assign(std::span<const EmbeddingVector> vectors,
                                        const ClusterParams& params) const = 0;
};

/// Default backend: average-linkage agglomeration over cosine distance that
/// merges while the closest pair is strictly below the threshold (ties to the
/// pair with the lowest member indices). Groups smaller than min_cluster_size
/// become noise; surviving clusters are numbered by their smallest member
/// index.
class AverageLinkageBackend final : public ClusterBackend {
 public:
  std::vector<ClusterId> assign(std::span<const EmbeddingVector> vectors,
                                const ClusterParams& params) const override;
};

/// Runs the default backend; item refs are the vectors' `source` fields.
ClusterAssignment cluster(std::span<const EmbeddingVector> vectors,
                          const ClusterParams& params = {});
ClusterAssignment cluster(std::span<const EmbeddingVector> vectors,
                          const ClusterParams& params,
                          const ClusterBackend& backend);

/// Lowercased words with punctuation stripped.
std::vector<std::string> topic_words(std::string_view text);

/// Class-based TF-IDF: score(t, c) = tf(t, c) * log(1 + A / f(t)), where
/// tf counts t in the cluster's texts, f(t) counts t across all clusters and
/// A is the mean number of words per cluster. Highest first, ties
/// alphabetical; at most k terms.
std::vector<TopicTerm> topic_terms(std::span<const std::string> members,
                                   std::span<const std::vector<std::string>> all_clusters,
                                   std::size_t k);

/// Fills `assignment.topics` from the member texts (`texts[i]` belongs to
/// `assignment.items[i]`). Noise is not a topic.
void attach_topics(ClusterAssignment& assignment,
                   std::span<const std::string> texts, std::size_t k);

/// Cluster JSONL: {"component_ref", "cluster_id": int | "NOISE"}.
void write_clusters_jsonl(const ClusterAssignment& assignment, std::ostream& out);
ClusterAssignment read_clusters_jsonl(std::istream& in);

/// Topic JSONL: {"cluster_id", "terms": [[term, score], ...]}.
void write_topics_jsonl(const ClusterAssignment& assignment, std::ostream& out);
std::map<int, std::vector<TopicTerm>> read_topics_jsonl(std::istream& in);

}  // namespace igkit
