#include "igkit/clustering.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "igkit/error.hpp"

namespace igkit {

std::string normalize_for_embedding(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    const auto uc = static_cast<unsigned char>(ch);
    if (std::isalnum(uc) || uc >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

TrigramHashEmbedder::TrigramHashEmbedder(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension_ == 0) throw Error("embedding dimension must be positive");
}

EmbeddingVector TrigramHashEmbedder::embed(std::string_view text) const {
  EmbeddingVector v;
  v.source = std::string(text);
  v.values.assign(dimension_, 0.0);
  const std::string normalized = normalize_for_embedding(text);
  if (normalized.empty()) return v;

  const std::string padded = "#" + normalized + "#";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint32_t h = 2166136261u;
    for (std::size_t k = i; k < i + 3; ++k) {
      h ^= static_cast<unsigned char>(padded[k]);
      h *= 16777619u;
    }
    v.values[h % dimension_] += 1.0;
  }
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v.values) x /= norm;
  return v;
}

EmbeddingVector embed(std::string_view text, std::size_t dimension) {
  return TrigramHashEmbedder(dimension).embed(text);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size()) {
    throw Error("cosine_similarity: dimension mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::string ClusterId::to_string() const {
  return is_noise() ? "NOISE" : std::to_string(value_);
}

std::size_t ClusterAssignment::cluster_count() const {
  int top = -1;
  for (const ClusterItem& item : items) top = std::max(top, item.cluster.value());
  return static_cast<std::size_t>(top + 1);
}

std::size_t ClusterAssignment::noise_count() const {
  return static_cast<std::size_t>(std::count_if(
      items.begin(), items.end(), [](const ClusterItem& i) { return i.cluster.is_noise(); }));
}

std::optional<ClusterId> ClusterAssignment::find(std::string_view component_ref) const {
  for (const ClusterItem& item : items) {
    if (item.component_ref == component_ref) return item.cluster;
  }
  return std::nullopt;
}

void validate(const ClusterParams& params) {
  if (params.min_cluster_size < 2) {
    throw Error("min_cluster_size must be at least 2 (got " +
                std::to_string(params.min_cluster_size) + ")");
  }
  if (!(params.distance_threshold > 0.0 && params.distance_threshold < 2.0)) {
    throw Error("distance_threshold must lie in (0, 2)");
  }
}

std::vector<ClusterId> AverageLinkageBackend::assign(
    std::span<const EmbeddingVector> vectors, const ClusterParams& params) const {
  validate(params);
  if (vectors.empty()) throw Error("cluster: no input vectors");
  const std::size_t n = vectors.size();

  // Pairwise distance sums between active groups; a group is addressed by
  // its smallest member index, so iterating slots in order is iterating
  // groups by lowest member.
  std::vector<double> sum(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 1.0 - cosine_similarity(vectors[i], vectors[j]);
      sum[i * n + j] = sum[j * n + i] = d;
    }
  }
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  std::vector<bool> active(n, true);

  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double avg = sum[i * n + j] /
                           static_cast<double>(members[i].size() * members[j].size());
        if (avg < best) {
          best = avg;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || !(best < params.distance_threshold)) break;

    // Merge bj into bi (bi < bj keeps bi the lowest member).
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double merged = sum[bi * n + k] + sum[bj * n + k];
      sum[bi * n + k] = sum[k * n + bi] = merged;
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members[bj].clear();
    active[bj] = false;
  }

  std::vector<ClusterId> ids(n, ClusterId::noise());
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i] || members[i].size() < params.min_cluster_size) continue;
    for (std::size_t m : members[i]) ids[m] = ClusterId::of(next);
    ++next;
  }
  return ids;
}

ClusterAssignment cluster(std::span<const EmbeddingVector> vectors,
                          const ClusterParams& params,
                          const ClusterBackend& backend) {
  const std::vector<ClusterId> ids = backend.assign(vectors, params);
  if (ids.size() != vectors.size()) {
    throw Error("cluster backend returned " + std::to_string(ids.size()) +
                " ids for " + std::to_string(vectors.size()) + " vectors");
  }
  ClusterAssignment out;
  out.items.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.items.push_back({vectors[i].source, ids[i]});
  }
  return out;
}

ClusterAssignment cluster(std::span<const EmbeddingVector> vectors,
                          const ClusterParams& params) {
  return cluster(vectors, params, AverageLinkageBackend{});
}

std::vector<std::string> topic_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    const auto uc = static_cast<unsigned char>(ch);
    if (std::isalnum(uc) || uc >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (ch == '\'') {
      // "podling's" -> "podlings"
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::vector<TopicTerm> topic_terms(std::span<const std::string> members,
                                   std::span<const std::vector<std::string>> all_clusters,
                                   std::size_t k) {
  if (members.empty()) throw Error("topic_terms: empty cluster");
  if (k == 0) throw Error("topic_terms: k must be at least 1");

  std::map<std::string, double> overall;
  double total_words = 0.0;
  for (const auto& texts : all_clusters) {
    for (const std::string& t : texts) {
      for (std::string& w : topic_words(t)) {
        overall[std::move(w)] += 1.0;
        total_words += 1.0;
      }
    }
  }
  std::map<std::string, double> tf;
  for (const std::string& t : members) {
    for (std::string& w : topic_words(t)) tf[std::move(w)] += 1.0;
  }
  // f(t) >= tf(t, c) even when `members` is not one of `all_clusters`.
  const double clusters = std::max<double>(1.0, static_cast<double>(all_clusters.size()));
  const double average = total_words / clusters;

  std::vector<TopicTerm> terms;
  terms.reserve(tf.size());
  for (const auto& [term, count] : tf) {
    const double f = std::max(overall[term], count);
    terms.push_back({term, count * std::log(1.0 + average / f)});
  }
  std::stable_sort(terms.begin(), terms.end(), [](const TopicTerm& a, const TopicTerm& b) {
    return a.score > b.score;
  });
  if (terms.size() > k) terms.resize(k);
  return terms;
}

void attach_topics(ClusterAssignment& assignment, std::span<const std::string> texts,
                   std::size_t k) {
  if (texts.size() != assignment.items.size()) {
    throw Error("attach_topics: text count does not match assignment");
  }
  std::map<int, std::vector<std::string>> by_cluster;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const ClusterId id = assignment.items[i].cluster;
    if (!id.is_noise()) by_cluster[id.value()].push_back(texts[i]);
  }
  std::vector<std::vector<std::string>> all;
  all.reserve(by_cluster.size());
  for (const auto& [id, members] : by_cluster) all.push_back(members);
  assignment.topics.clear();
  for (const auto& [id, members] : by_cluster) {
    assignment.topics[id] = topic_terms(members, all, k);
  }
}

void write_clusters_jsonl(const ClusterAssignment& assignment, std::ostream& out) {
  for (const ClusterItem& item : assignment.items) {
    nlohmann::json record;
    record["component_ref"] = item.component_ref;
    if (item.cluster.is_noise()) {
      record["cluster_id"] = "NOISE";
    } else {
      record["cluster_id"] = item.cluster.value();
    }
    out << record.dump() << '\n';
  }
}

ClusterAssignment read_clusters_jsonl(std::istream& in) {
  ClusterAssignment out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      ClusterItem item;
      item.component_ref = record.at("component_ref").get<std::string>();
      const auto& id = record.at("cluster_id");
      if (id.is_string()) {
        if (id.get<std::string>() != "NOISE") throw Error("bad cluster_id");
      } else {
        const int v = id.get<int>();
        if (v < 0) throw Error("negative cluster_id");
        item.cluster = ClusterId::of(v);
      }
      out.items.push_back(std::move(item));
    } catch (const nlohmann::json::exception& e) {
      throw Error("cluster line " + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("cluster line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

void write_topics_jsonl(const ClusterAssignment& assignment, std::ostream& out) {
  for (const auto& [id, terms] : assignment.topics) {
    nlohmann::json list = nlohmann::json::array();
    for (const TopicTerm& t : terms) list.push_back({t.term, t.score});
    out << nlohmann::json{{"cluster_id", id}, {"terms", list}}.dump() << '\n';
  }
}

std::map<int, std::vector<TopicTerm>> read_topics_jsonl(std::istream& in) {
  std::map<int, std::vector<TopicTerm>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto record = nlohmann::json::parse(line);
    auto& terms = out[record.at("cluster_id").get<int>()];
    for (const auto& pair : record.at("terms")) {
      terms.push_back({pair.at(0).get<std::string>(), pair.at(1).get<double>()});
    }
  }
  return out;
}

}  // namespace igkit
