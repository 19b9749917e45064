#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "igkit/clustering.hpp"
#include "igkit/error.hpp"
#include "support.hpp"

using namespace igkit;

namespace {

// Straight-line reimplementation of the documented embedding, kept separate
// from the library code on purpose.
std::vector<double> oracle_embed(const std::string& text, std::size_t dim) {
  std::string norm;
  bool space = false;
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      if (space && !norm.empty()) norm += ' ';
      space = false;
      norm += static_cast<char>(std::tolower(c));
    } else {
      space = true;
    }
  }
  std::vector<double> v(dim, 0.0);
  if (norm.empty()) return v;
  const std::string padded = "#" + norm + "#";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint32_t h = 2166136261u;
    for (std::size_t k = i; k < i + 3; ++k) {
      h ^= static_cast<unsigned char>(padded[k]);
      h *= 16777619u;
    }
    v[h % dim] += 1.0;
  }
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  for (double& x : v) x /= std::sqrt(norm2);
  return v;
}

std::vector<std::string> agents12() {
  std::istringstream in(test::read_file(test::fixture("agents12.txt")));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<EmbeddingVector> embed_all(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

// Partition as sets of sources, each sorted, independent of id numbering.
std::vector<std::vector<std::string>> partition(const ClusterAssignment& a) {
  std::map<int, std::vector<std::string>> groups;
  for (const auto& item : a.items) groups[item.cluster.value()].push_back(item.component_ref);
  std::vector<std::vector<std::string>> out;
  for (auto& [id, members] : groups) {
    std::sort(members.begin(), members.end());
    out.push_back(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("embedding matches the independent trigram oracle") {
  for (const std::string text : {"the mentor", "Mentors!", "PPMC-level votes", "a", "  x  y ",
                                 "release manager", "(P)PMC"}) {
    for (std::size_t dim : {8u, 64u, 256u}) {
      const auto got = embed(text, dim).values;
      const auto want = oracle_embed(text, dim);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < dim; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
  CHECK(normalize_for_embedding("  The (P)PMC,  votes! ") == "the p pmc votes");
  CHECK(normalize_for_embedding("...") == "");
}

TEST_CASE("embedding norms and degenerate text") {
  for (const std::string text : {"mentor", "the podlings", "x"}) {
    const auto v = embed(text).values;
    CHECK(std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)) == doctest::Approx(1.0));
  }
  for (const std::string text : {"", "   ", "?!."}) {
    const auto v = embed(text).values;
    CHECK(v.size() == kDefaultEmbeddingDim);
    CHECK(std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
    CHECK(cosine_similarity(embed(text), embed("mentor")) == 0.0);
  }
  CHECK_THROWS_AS(TrigramHashEmbedder(0), Error);
}

TEST_CASE("cosine similarity") {
  CHECK(cosine_similarity(embed("the mentor"), embed("the mentor")) == doctest::Approx(1.0));
  // mentor vs mentors share the five trigrams of "#mentor" and differ in the tail.
  const auto a = oracle_embed("mentor", 256);
  const auto b = oracle_embed("mentors", 256);
  const double expected = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  CHECK(cosine_similarity(embed("mentor"), embed("mentors")) == doctest::Approx(expected));
  CHECK(expected > 0.6);

  EmbeddingVector x{{1.0, 0.0}, "x"}, y{{0.0, 1.0}, "y"};
  CHECK(cosine_similarity(x, y) == 0.0);
}

TEST_CASE("agent fixture splits into the hand partition") {
  const auto texts = agents12();
  REQUIRE(texts.size() == 12);
  const ClusterAssignment a = cluster(embed_all(texts));
  CHECK(a.noise_count() == 0);
  CHECK(a.cluster_count() == 3);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    CHECK(a.items[i].component_ref == texts[i]);
    CHECK(a.items[i].cluster == ClusterId::of(static_cast<int>(i / 4)));
  }
}

TEST_CASE("permuted input gives the same canonical partition") {
  const auto texts = agents12();
  const auto reference = partition(cluster(embed_all(texts)));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto shuffled = texts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const ClusterAssignment a = cluster(embed_all(shuffled));
    CHECK(partition(a) == reference);
    // Canonical ids: cluster k first appears before cluster k+1.
    int next = 0;
    for (const auto& item : a.items) {
      if (item.cluster.value() == next) ++next;
      CHECK(item.cluster.value() < next);
    }
  }
}

TEST_CASE("noise and parameters") {
  const std::vector<std::string> texts = {"the mentor", "mentors", "quarterly board report"};
  const ClusterAssignment a = cluster(embed_all(texts));
  CHECK(a.items[0].cluster == ClusterId::of(0));
  CHECK(a.items[1].cluster == ClusterId::of(0));
  CHECK(a.items[2].cluster.is_noise());
  CHECK(a.noise_count() == 1);
  CHECK(a.find("quarterly board report") == ClusterId::noise());
  CHECK_FALSE(a.find("absent").has_value());

  const ClusterAssignment strict = cluster(embed_all(texts), {2, 0.01});
  CHECK(strict.noise_count() == 3);
  const ClusterAssignment big = cluster(embed_all(texts), {3, 0.6});
  CHECK(big.noise_count() == 3);

  CHECK_THROWS_AS(cluster(std::vector<EmbeddingVector>{}), Error);
  CHECK_THROWS_AS(validate(ClusterParams{1, 0.5}), Error);
  CHECK_THROWS_AS(validate(ClusterParams{2, 0.0}), Error);
  CHECK_THROWS_AS(validate(ClusterParams{2, 2.0}), Error);
  CHECK_NOTHROW(validate(ClusterParams{}));
  CHECK(ClusterId::noise().to_string() == "NOISE");
  CHECK(ClusterId::of(4).to_string() == "4");
}

TEST_CASE("identical strings always share a cluster") {
  const std::vector<std::string> texts = {"podling", "release manager", "podling", "release manager"};
  const ClusterAssignment a = cluster(embed_all(texts), {2, 0.05});
  CHECK(a.items[0].cluster == a.items[2].cluster);
  CHECK(a.items[1].cluster == a.items[3].cluster);
  CHECK(a.items[0].cluster != a.items[1].cluster);
}

TEST_CASE("c-TF-IDF scores") {
  CHECK(topic_words("The PPMC's (P)PMC-level votes!") ==
        std::vector<std::string>{"the", "ppmcs", "p", "pmc", "level", "votes"});

  const std::vector<std::string> c0 = {"the mentor", "mentors"};
  const std::vector<std::string> c1 = {"the podling", "podling release"};
  const std::vector<std::vector<std::string>> all = {c0, c1};
  // A = 3.5 words per cluster; podling: 2 * log(1 + 3.5 / 2).
  const auto terms = topic_terms(c1, all, 5);
  REQUIRE(terms.size() == 3);
  CHECK(terms[0].term == "podling");
  CHECK(terms[0].score == doctest::Approx(2.0232018233569597));
  CHECK(terms[1].term == "release");
  CHECK(terms[1].score == doctest::Approx(1.5040773967762742));
  CHECK(terms[2].term == "the");
  CHECK(terms[2].score == doctest::Approx(1.0116009116784799));
  CHECK(topic_terms(c1, all, 1).size() == 1);
}

TEST_CASE("cluster and topic jsonl round trip") {
  const auto texts = agents12();
  ClusterAssignment a = cluster(embed_all(texts));
  attach_topics(a, texts, 3);
  CHECK(a.topics.size() == 3);
  std::stringstream clusters, topics;
  write_clusters_jsonl(a, clusters);
  write_topics_jsonl(a, topics);
  const ClusterAssignment back = read_clusters_jsonl(clusters);
  CHECK(back.items == a.items);
  CHECK(read_topics_jsonl(topics) == a.topics);
}
