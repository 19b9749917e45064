#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace igkit {

/// Closed coarse tagset produced by the lexicon + suffix tagger.
enum class Pos : unsigned char {
  Noun, Verb, Modal, Adj, Adv, Det, Adp, Pron, Num, Punct, Other,
};

/// Closed dependency-relation inventory of the shallow annotator.
enum class Relation : unsigned char { Root, Aux, Det, Amod, Obj, Other };

std::string_view to_string(Pos pos);
std::string_view to_string(Relation relation);

struct SyntacticToken {
  int index = 0;
  std::string form;
  std::string lower;
  Pos pos = Pos::Other;
  int head = -1;  // -1 marks the root
  Relation relation = Relation::Other;
  std::string shape;

  bool operator==(const SyntacticToken&) const = default;
};

/// Sparse named features. Ordered, so iteration and serialization are stable.
using FeatureVector = std::map<std::string, double>;

struct TokenOffset {
  std::size_t begin = 0;
  std::size_t length = 0;
};

/// Splits on whitespace, then detaches leading and trailing characters from
/// the set . , ; : ! ? " ' ( ) as one-character tokens. Internal hyphens,
/// slashes and punctuation stay inside the token; case is never altered.
std::vector<std::string> tokenize(std::string_view text);

/// Same segmentation as tokenize(), reported as byte ranges of `text`.
std::vector<TokenOffset> tokenize_offsets(std::string_view text);

/// Inverse of tokenize() for single-spaced text: no space before closing
/// punctuation or after an opening parenthesis; quotes alternate between
/// opening and closing.
std::string join_tokens(std::span<const std::string> tokens);

bool is_modal(std::string_view lower);

/// Tags and attaches every token. The main verb (first verb after the first
/// modal, else the first verb, else token 0) is the root; determiners and
/// adjectives attach to the nearest following noun; modals to the nearest
/// following verb; everything else to the root.
std::vector<SyntacticToken> annotate_syntax(std::span<const std::string> tokens);

/// Symbolic features for the token at `index`: surface/tag/shape/relation,
/// head context, a +-2 window with <S> / </S> sentinels, modality and a
/// position bucket.
FeatureVector featurize(std::span<const SyntacticToken> tokens,
                        std::size_t index);

}  // namespace igkit
