#include "igkit/classifier.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include <json.hpp>

#include "igkit/error.hpp"

namespace igkit {

namespace {

constexpr std::string_view kModelMagic = "# igkit token classifier v1";

// Fisher-Yates driven by mt19937_64, whose output sequence is fixed by the
// standard (std::shuffle's is not).
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string ComponentSpan::ref() const {
  return statement_id + ":" + std::to_string(start) + "-" + std::to_string(end);
}

std::vector<ComponentSpan> group_spans(std::span<const ComponentLabel> labels,
                                       std::span<const std::string> tokens,
                                       std::string_view statement_id) {
  if (labels.size() != tokens.size()) {
    throw Error("group_spans: " + std::to_string(labels.size()) + " labels for " +
                std::to_string(tokens.size()) + " tokens in statement \"" +
                std::string(statement_id) + "\"");
  }
  std::vector<ComponentSpan> spans;
  std::size_t start = 0;
  while (start < labels.size()) {
    std::size_t end = start + 1;
    while (end < labels.size() && labels[end] == labels[start]) ++end;
    if (labels[start] != ComponentLabel::None) {
      ComponentSpan span;
      span.statement_id = std::string(statement_id);
      span.label = labels[start];
      span.start = start;
      span.end = end;
      span.text = join_tokens(tokens.subspan(start, end - start));
      spans.push_back(std::move(span));
    }
    start = end;
  }
  return spans;
}

std::vector<ComponentLabel> labels_from_spans(std::span<const ComponentSpan> spans,
                                              std::size_t token_count) {
  std::vector<ComponentLabel> labels(token_count, ComponentLabel::None);
  for (const ComponentSpan& s : spans) {
    if (s.start >= s.end || s.end > token_count) {
      throw Error("span " + s.ref() + " outside [0, " + std::to_string(token_count) + ")");
    }
    for (std::size_t i = s.start; i < s.end; ++i) labels[i] = s.label;
  }
  return labels;
}

std::vector<TrainingExample> make_examples(const Corpus& corpus,
                                           std::span<const GoldAnnotation> gold) {
  std::vector<TrainingExample> out;
  out.reserve(gold.size());
  for (const GoldAnnotation& g : gold) {
    const InstitutionalStatement* s = corpus.find(g.statement_id);
    if (s == nullptr) {
      throw Error("gold references unknown statement_id \"" + g.statement_id + "\"");
    }
    if (s->tokens.size() != g.labels.size()) {
      throw Error("alignment failure for statement \"" + g.statement_id + "\": " +
                  std::to_string(s->tokens.size()) + " tokens, " +
                  std::to_string(g.labels.size()) + " labels");
    }
    out.push_back({g.statement_id, annotate_syntax(s->tokens), g.labels});
  }
  return out;
}

std::pair<std::vector<TrainingExample>, std::vector<TrainingExample>>
split_examples(std::vector<TrainingExample> examples, double train_fraction,
               std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw Error("train fraction must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  seeded_shuffle(examples, rng);
  const auto cut = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(examples.size())));
  std::vector<TrainingExample> held_out(
      std::make_move_iterator(examples.begin() + static_cast<std::ptrdiff_t>(cut)),
      std::make_move_iterator(examples.end()));
  examples.resize(cut);
  return {std::move(examples), std::move(held_out)};
}

void TokenClassifierModel::set_weight(const std::string& feature,
                                      ComponentLabel label, double value) {
  if (!std::isfinite(value)) throw Error("non-finite weight for feature " + feature);
  auto [it, inserted] = weights_.try_emplace(feature);
  if (inserted) it->second.fill(0.0);
  it->second[label_index(label)] = value;
}

double TokenClassifierModel::weight(const std::string& feature,
                                    ComponentLabel label) const {
  auto it = weights_.find(feature);
  return it == weights_.end() ? 0.0 : it->second[label_index(label)];
}

std::map<std::pair<std::string, ComponentLabel>, double>
TokenClassifierModel::weights() const {
  std::map<std::pair<std::string, ComponentLabel>, double> out;
  for (const auto& [feature, row] : weights_) {
    for (ComponentLabel l : kAllLabels) {
      if (row[label_index(l)] != 0.0) out[{feature, l}] = row[label_index(l)];
    }
  }
  return out;
}

TokenClassifierModel::WeightRow TokenClassifierModel::scores(
    const FeatureVector& features) const {
  WeightRow total{};
  for (const auto& [name, value] : features) {
    auto it = weights_.find(name);
    if (it == weights_.end()) continue;
    for (std::size_t l = 0; l < kLabelCount; ++l) total[l] += value * it->second[l];
  }
  return total;
}

namespace {

ComponentLabel argmax(const TokenClassifierModel::WeightRow& scores) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < kLabelCount; ++l) {
    if (scores[l] > scores[best]) best = l;
  }
  return kAllLabels[best];
}

}  // namespace

std::vector<ComponentLabel> TokenClassifierModel::predict(
    std::span<const SyntacticToken> tokens) const {
  std::vector<ComponentLabel> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.push_back(argmax(scores(featurize(tokens, i))));
  }
  return out;
}

void TokenClassifierModel::save(std::ostream& out) const {
  out << kModelMagic << '\n'
      << "# seed=" << metadata_.seed << '\n'
      << "# epochs=" << metadata_.epochs << '\n'
      << "# corpus_digest=" << metadata_.corpus_digest << '\n'
      << "# labels=A B D I C O NONE\n";
  for (const auto& [key, value] : weights()) {
    out << key.first << '\t' << to_string(key.second) << '\t'
        << format_double(value) << '\n';
  }
}

TokenClassifierModel TokenClassifierModel::load(std::istream& in) {
  TokenClassifierModel model;
  std::string line;
  std::size_t number = 0;
  if (!std::getline(in, line) || line != kModelMagic) {
    throw Error("not an igkit model file (missing \"" + std::string(kModelMagic) + "\" header)");
  }
  ++number;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "seed") model.metadata_.seed = std::stoull(value);
      else if (key == "epochs") model.metadata_.epochs = std::stoi(value);
      else if (key == "corpus_digest") model.metadata_.corpus_digest = value;
      continue;
    }
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw Error("model line " + std::to_string(number) + ": expected feature<TAB>label<TAB>weight");
    }
    const ComponentLabel label = parse_label(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    double value = 0.0;
    const char* first = line.data() + t2 + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw Error("model line " + std::to_string(number) + ": bad weight");
    }
    model.set_weight(line.substr(0, t1), label, value);
  }
  return model;
}

void TokenClassifierModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  save(out);
  if (!out) throw Error("write failed: " + path.string());
}

TokenClassifierModel TokenClassifierModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  try {
    return load(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

TokenClassifierModel train(std::span<const TrainingExample> gold, int epochs,
                           std::uint64_t seed, std::string corpus_digest) {
  if (gold.empty()) throw Error("train: empty gold set");
  if (epochs <= 0) throw Error("train: epochs must be positive");

  // Features are fixed per token, so compute them once.
  std::vector<std::vector<FeatureVector>> features(gold.size());
  for (std::size_t e = 0; e < gold.size(); ++e) {
    const TrainingExample& ex = gold[e];
    if (ex.tokens.size() != ex.labels.size()) {
      throw Error("alignment failure for statement \"" + ex.statement_id + "\"");
    }
    features[e].reserve(ex.tokens.size());
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      features[e].push_back(featurize(ex.tokens, i));
    }
  }

  using Row = TokenClassifierModel::WeightRow;
  using StampRow = std::array<std::int64_t, kLabelCount>;
  struct Entry {
    Row current{};
    Row total{};
    StampRow stamp{};
  };
  std::unordered_map<std::string, Entry> state;
  std::int64_t step = 0;

  auto bump = [&](const std::string& name, std::size_t label, double delta) {
    Entry& e = state[name];
    e.total[label] += static_cast<double>(step - e.stamp[label]) * e.current[label];
    e.stamp[label] = step;
    e.current[label] += delta;
  };

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(gold.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    seeded_shuffle(order, rng);
    for (std::size_t e : order) {
      const TrainingExample& ex = gold[e];
      for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
        ++step;
        const FeatureVector& fv = features[e][i];
        Row scores{};
        for (const auto& [name, value] : fv) {
          auto it = state.find(name);
          if (it == state.end()) continue;
          for (std::size_t l = 0; l < kLabelCount; ++l) {
            scores[l] += value * it->second.current[l];
          }
        }
        const ComponentLabel guess = argmax(scores);
        const ComponentLabel truth = ex.labels[i];
        if (guess == truth) continue;
        for (const auto& [name, value] : fv) {
          bump(name, label_index(truth), value);
          bump(name, label_index(guess), -value);
        }
      }
    }
  }

  TokenClassifierModel model;
  for (auto& [name, entry] : state) {
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      entry.total[l] += static_cast<double>(step - entry.stamp[l]) * entry.current[l];
      const double averaged = entry.total[l] / static_cast<double>(step);
      if (averaged != 0.0) model.set_weight(name, kAllLabels[l], averaged);
    }
  }
  model.set_metadata({seed, epochs, std::move(corpus_digest)});
  return model;
}

Metrics score_predictions(std::span<const std::vector<ComponentLabel>> gold,
                          std::span<const std::vector<ComponentLabel>> predicted) {
  if (gold.size() != predicted.size()) {
    throw Error("score_predictions: sequence count mismatch");
  }
  std::array<std::size_t, kLabelCount> tp{}, gold_count{}, pred_count{};
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size()) {
      throw Error("score_predictions: length mismatch in sequence " + std::to_string(s));
    }
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const auto g = label_index(gold[s][i]);
      const auto p = label_index(predicted[s][i]);
      ++gold_count[g];
      ++pred_count[p];
      if (g == p) {
        ++tp[g];
        ++correct;
      }
      ++total;
    }
  }
  Metrics m;
  m.token_count = total;
  m.token_accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  for (ComponentLabel l : kAllLabels) {
    const auto i = label_index(l);
    if (gold_count[i] == 0 && pred_count[i] == 0) continue;
    LabelMetrics lm;
    lm.support = gold_count[i];
    lm.precision = pred_count[i] ? static_cast<double>(tp[i]) / static_cast<double>(pred_count[i]) : 0.0;
    lm.recall = gold_count[i] ? static_cast<double>(tp[i]) / static_cast<double>(gold_count[i]) : 0.0;
    const double denom = lm.precision + lm.recall;
    lm.f1 = denom > 0.0 ? 2.0 * lm.precision * lm.recall / denom : 0.0;
    m.per_label[l] = lm;
  }
  return m;
}

Metrics evaluate(const TokenClassifierModel& model,
                 std::span<const TrainingExample> held_out) {
  if (held_out.empty()) throw Error("evaluate: empty held-out set");
  std::vector<std::vector<ComponentLabel>> gold;
  std::vector<std::vector<ComponentLabel>> predicted;
  for (const TrainingExample& ex : held_out) {
    gold.push_back(ex.labels);
    predicted.push_back(model.predict(ex.tokens));
  }
  return score_predictions(gold, predicted);
}

void write_spans_jsonl(std::span<const ComponentSpan> spans, std::ostream& out) {
  for (const ComponentSpan& s : spans) {
    nlohmann::json record = {{"statement_id", s.statement_id},
                             {"label", to_string(s.label)},
                             {"start", s.start},
                             {"end", s.end},
                             {"text", s.text}};
    out << record.dump() << '\n';
  }
}

std::vector<ComponentSpan> read_spans_jsonl(std::istream& in) {
  std::vector<ComponentSpan> spans;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      ComponentSpan s;
      s.statement_id = record.at("statement_id").get<std::string>();
      s.label = parse_label(record.at("label").get<std::string>());
      s.start = record.at("start").get<std::size_t>();
      s.end = record.at("end").get<std::size_t>();
      s.text = record.at("text").get<std::string>();
      if (s.label == ComponentLabel::None || s.start >= s.end) {
        throw Error("invalid span");
      }
      spans.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error("extraction line " + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("extraction line " + std::to_string(number) + ": " + e.what());
    }
  }
  return spans;
}

}  // namespace igkit
