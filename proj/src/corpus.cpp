#include "igkit/corpus.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "igkit/csv.hpp"
#include "igkit/error.hpp"
#include "igkit/syntax.hpp"

namespace igkit {

using nlohmann::json;

Format parse_format(std::string_view name) {
  if (name == "jsonl") return Format::Jsonl;
  if (name == "csv") return Format::Csv;
  throw Error("unknown format \"" + std::string(name) + "\" (expected jsonl or csv)");
}

std::string_view to_string(Format format) {
  return format == Format::Jsonl ? "jsonl" : "csv";
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

void Corpus::add(InstitutionalStatement statement, std::string_view title) {
  if (statement.text.empty()) {
    throw Error("statement \"" + statement.statement_id + "\" has empty text");
  }
  if (statement.statement_id.empty()) {
    throw Error("statement with empty statement_id in document \"" +
                statement.doc_id + "\"");
  }
  if (index_.contains(statement.statement_id)) {
    throw Error("duplicate statement_id \"" + statement.statement_id + "\"");
  }
  if (statement.tokens.empty()) statement.tokens = tokenize(statement.text);

  auto [it, inserted] = doc_index_.try_emplace(statement.doc_id, documents_.size());
  if (inserted) {
    PolicyDocument doc;
    doc.doc_id = statement.doc_id;
    doc.title = title.empty() ? statement.doc_id : std::string(title);
    documents_.push_back(std::move(doc));
  }
  PolicyDocument& doc = documents_[it->second];
  index_.emplace(statement.statement_id, Slot{it->second, doc.statements.size()});
  doc.statements.push_back(std::move(statement));
}

const InstitutionalStatement* Corpus::find(std::string_view statement_id) const {
  auto it = index_.find(std::string(statement_id));
  if (it == index_.end()) return nullptr;
  return &documents_[it->second.document].statements[it->second.statement];
}

std::vector<const InstitutionalStatement*> Corpus::statements() const {
  std::vector<const InstitutionalStatement*> out;
  out.reserve(index_.size());
  for (const PolicyDocument& doc : documents_) {
    for (const InstitutionalStatement& s : doc.statements) out.push_back(&s);
  }
  return out;
}

std::string Corpus::digest() const {
  std::uint64_t h = fnv1a64("");
  for (const PolicyDocument& doc : documents_) {
    for (const InstitutionalStatement& s : doc.statements) {
      h = fnv1a64(s.doc_id, h);
      h = fnv1a64(std::string_view("\x1f", 1), h);
      h = fnv1a64(s.statement_id, h);
      h = fnv1a64(std::string_view("\x1f", 1), h);
      h = fnv1a64(s.text, h);
      h = fnv1a64(std::string_view("\x1e", 1), h);
    }
  }
  return to_hex(h);
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

bool blank(std::string_view line) {
  for (char ch : line) {
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

std::string line_prefix(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

std::string required_string(const json& record, const char* field,
                            std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw Error(line_prefix(line) + "missing or non-string field \"" + field + "\"");
  }
  return it->get<std::string>();
}

// Visits each JSONL record as (line number, parsed object).
template <typename Fn>
void for_each_jsonl(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(line_prefix(number) + "malformed JSON record: " + e.what());
    }
    if (!record.is_object()) {
      throw Error(line_prefix(number) + "record is not a JSON object");
    }
    fn(number, record);
  }
}

// Visits each CSV data row as (line number, field lookup by header name).
template <typename Fn>
void for_each_csv(std::istream& in, Fn&& fn) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) return;
  std::unordered_map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header->size(); ++i) columns[(*header)[i]] = i;
  while (auto row = reader.next()) {
    if (row->size() == 1 && blank((*row)[0])) continue;
    const std::size_t line = reader.line();
    if (row->size() != header->size()) {
      throw Error(line_prefix(line) + "expected " + std::to_string(header->size()) +
                  " fields, found " + std::to_string(row->size()));
    }
    auto get = [&](const char* field, bool required) -> std::string {
      auto it = columns.find(field);
      if (it == columns.end()) {
        if (required) throw Error(line_prefix(line) + "missing field \"" + field + "\"");
        return {};
      }
      return (*row)[it->second];
    };
    fn(line, get);
  }
}

}  // namespace

Corpus read_corpus(std::istream& in, Format format) {
  Corpus corpus;
  auto add = [&](std::size_t line, InstitutionalStatement s, const std::string& title) {
    try {
      corpus.add(std::move(s), title);
    } catch (const Error& e) {
      throw Error(line_prefix(line) + e.what());
    }
  };
  if (format == Format::Jsonl) {
    for_each_jsonl(in, [&](std::size_t line, const json& record) {
      InstitutionalStatement s;
      s.doc_id = required_string(record, "doc_id", line);
      s.statement_id = required_string(record, "statement_id", line);
      s.text = required_string(record, "text", line);
      std::string title;
      if (auto it = record.find("title"); it != record.end() && it->is_string()) {
        title = it->get<std::string>();
      }
      add(line, std::move(s), title);
    });
  } else {
    for_each_csv(in, [&](std::size_t line, auto& get) {
      InstitutionalStatement s;
      s.doc_id = get("doc_id", true);
      s.statement_id = get("statement_id", true);
      s.text = get("text", true);
      add(line, std::move(s), get("title", false));
    });
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, Format format) {
  auto in = open_input(path);
  try {
    return read_corpus(in, format);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_corpus(const Corpus& corpus, std::ostream& out, Format format) {
  if (format == Format::Csv) out << "doc_id,statement_id,text,title\n";
  for (const PolicyDocument& doc : corpus.documents()) {
    for (const InstitutionalStatement& s : doc.statements) {
      if (format == Format::Jsonl) {
        json record = {{"doc_id", s.doc_id},
                       {"statement_id", s.statement_id},
                       {"text", s.text}};
        if (doc.title != doc.doc_id) record["title"] = doc.title;
        out << record.dump() << '\n';
      } else {
        const std::string title = doc.title != doc.doc_id ? doc.title : std::string();
        out << csv::format_row({s.doc_id, s.statement_id, s.text, title}) << '\n';
      }
    }
  }
}

std::vector<InstitutionalStatement> segment_statements(std::string_view raw_text,
                                                       std::string_view doc_id) {
  std::vector<InstitutionalStatement> out;
  auto emit = [&](std::string_view piece) {
    const auto first = piece.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return;
    const auto last = piece.find_last_not_of(" \t\r\n\f\v");
    InstitutionalStatement s;
    s.doc_id = std::string(doc_id);
    s.statement_id = std::string(doc_id) + "#" + std::to_string(out.size());
    s.text = std::string(piece.substr(first, last - first + 1));
    s.tokens = tokenize(s.text);
    out.push_back(std::move(s));
  };

  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < raw_text.size(); ++i) {
    const char ch = raw_text[i];
    if (ch == '(') {
      ++depth;
    } else if (ch == ')') {
      if (depth > 0) --depth;
    } else if ((ch == '.' || ch == '!' || ch == '?') && depth == 0) {
      const bool boundary =
          i + 1 == raw_text.size() ||
          std::isspace(static_cast<unsigned char>(raw_text[i + 1]));
      if (boundary) {
        emit(raw_text.substr(start, i + 1 - start));
        start = i + 1;
      }
    }
  }
  if (start < raw_text.size()) emit(raw_text.substr(start));
  return out;
}

namespace {

GoldAnnotation make_gold(std::size_t line, std::string statement_id,
                         const std::vector<std::string>& names,
                         const Corpus& corpus) {
  const InstitutionalStatement* s = corpus.find(statement_id);
  if (s == nullptr) {
    throw Error(line_prefix(line) + "unknown statement_id \"" + statement_id + "\"");
  }
  GoldAnnotation gold;
  gold.statement_id = std::move(statement_id);
  gold.labels.reserve(names.size());
  for (const std::string& name : names) {
    try {
      gold.labels.push_back(parse_label(name));
    } catch (const Error& e) {
      throw Error(line_prefix(line) + e.what());
    }
  }
  if (gold.labels.size() != s->tokens.size()) {
    throw Error(line_prefix(line) + "statement \"" + gold.statement_id + "\" has " +
                std::to_string(s->tokens.size()) + " tokens but " +
                std::to_string(gold.labels.size()) + " labels");
  }
  return gold;
}

std::vector<std::string> split_spaces(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string word; in >> word;) out.push_back(word);
  return out;
}

}  // namespace

std::vector<GoldAnnotation> read_gold(std::istream& in, const Corpus& corpus,
                                      Format format) {
  std::vector<GoldAnnotation> out;
  if (format == Format::Jsonl) {
    for_each_jsonl(in, [&](std::size_t line, const json& record) {
      std::string id = required_string(record, "statement_id", line);
      auto it = record.find("labels");
      if (it == record.end() || !it->is_array()) {
        throw Error(line_prefix(line) + "missing or non-array field \"labels\"");
      }
      std::vector<std::string> names;
      for (const json& v : *it) {
        if (!v.is_string()) throw Error(line_prefix(line) + "non-string label");
        names.push_back(v.get<std::string>());
      }
      out.push_back(make_gold(line, std::move(id), names, corpus));
    });
  } else {
    for_each_csv(in, [&](std::size_t line, auto& get) {
      out.push_back(make_gold(line, get("statement_id", true),
                              split_spaces(get("labels", true)), corpus));
    });
  }
  return out;
}

std::vector<GoldAnnotation> load_gold(const std::filesystem::path& path,
                                      const Corpus& corpus, Format format) {
  auto in = open_input(path);
  try {
    return read_gold(in, corpus, format);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_gold(const std::vector<GoldAnnotation>& gold, std::ostream& out,
                Format format) {
  if (format == Format::Csv) out << "statement_id,labels\n";
  for (const GoldAnnotation& g : gold) {
    std::vector<std::string> names;
    for (ComponentLabel l : g.labels) names.emplace_back(to_string(l));
    if (format == Format::Jsonl) {
      out << json{{"statement_id", g.statement_id}, {"labels", names}}.dump() << '\n';
    } else {
      std::string joined;
      for (const auto& n : names) {
        if (!joined.empty()) joined.push_back(' ');
        joined += n;
      }
      out << csv::format_row({g.statement_id, joined}) << '\n';
    }
  }
}

}  // namespace igkit
