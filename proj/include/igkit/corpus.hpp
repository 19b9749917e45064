#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "igkit/labels.hpp"

namespace igkit {

enum class Format { Jsonl, Csv };

/// "jsonl" or "csv"; throws igkit::Error otherwise.
Format parse_format(std::string_view name);
std::string_view to_string(Format format);

struct InstitutionalStatement {
  std::string statement_id;
  std::string doc_id;
  std::string text;
  std::vector<std::string> tokens;

  bool operator==(const InstitutionalStatement&) const = default;
};

struct PolicyDocument {
  std::string doc_id;
  std::string title;
  std::vector<InstitutionalStatement> statements;
};

/// Ordered documents with a corpus-wide statement index. Documents appear in
/// order of first mention; statements keep file order within a document.
class Corpus {
 public:
  /// Appends a statement, creating its document on first sight. Tokenizes
  /// the text if `tokens` is empty. Throws on an empty text or a duplicate
  /// statement_id.
  void add(InstitutionalStatement statement, std::string_view title = {});

  const std::vector<PolicyDocument>& documents() const { return documents_; }
  std::size_t statement_count() const { return index_.size(); }
  bool empty() const { return documents_.empty(); }

  /// nullptr when unknown.
  const InstitutionalStatement* find(std::string_view statement_id) const;

  /// All statements in document order.
  std::vector<const InstitutionalStatement*> statements() const;

  /// FNV-1a 64 over ids and texts, as 16 lowercase hex digits.
  std::string digest() const;

 private:
  struct Slot {
    std::size_t document;
    std::size_t statement;
  };
  std::vector<PolicyDocument> documents_;
  std::unordered_map<std::string, std::size_t> doc_index_;
  std::unordered_map<std::string, Slot> index_;
};

/// Statement records: {"doc_id", "statement_id", "text"} plus optional
/// "title". CSV input uses the same names as header columns.
Corpus load_corpus(const std::filesystem::path& path, Format format);
Corpus read_corpus(std::istream& in, Format format);
void write_corpus(const Corpus& corpus, std::ostream& out, Format format);

/// Splits on . ! or ? followed by whitespace (or end of text), never inside
/// parentheses. Ids are "<doc_id>#<k>" counting from 0.
std::vector<InstitutionalStatement> segment_statements(std::string_view raw_text,
                                                       std::string_view doc_id);

struct GoldAnnotation {
  std::string statement_id;
  std::vector<ComponentLabel> labels;

  bool operator==(const GoldAnnotation&) const = default;
};

/// Gold records: {"statement_id", "labels": [..]}. In CSV the labels column
/// holds space-separated label names. Every record is validated against the
/// corpus tokenization while loading.
std::vector<GoldAnnotation> load_gold(const std::filesystem::path& path,
                                      const Corpus& corpus, Format format);
std::vector<GoldAnnotation> read_gold(std::istream& in, const Corpus& corpus,
                                      Format format);
void write_gold(const std::vector<GoldAnnotation>& gold, std::ostream& out,
                Format format);

/// 64-bit FNV-1a, used wherever a stable cross-platform hash is needed.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 14695981039346656037ULL);
std::string to_hex(std::uint64_t value);

}  // namespace igkit
