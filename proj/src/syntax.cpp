#include "igkit/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "igkit/error.hpp"

namespace igkit {

namespace {

constexpr std::string_view kDetachable = ".,;:!?\"'()";

bool is_space(char ch) {
  return std::isspace(static_cast<unsigned char>(ch)) != 0;
}

bool is_detachable(char ch) {
  return kDetachable.find(ch) != std::string_view::npos;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

using Lexicon = std::unordered_set<std::string_view>;

const Lexicon& modals() {
  static const Lexicon set = {"must", "will", "shall", "may",
                              "can",  "should", "might", "would"};
  return set;
}

const Lexicon& determiners() {
  static const Lexicon set = {
      "the", "a", "an", "each", "every", "all", "any", "this", "that",
      "these", "those", "its", "their", "his", "her", "our", "your", "no",
      "some", "both", "either", "neither", "another"};
  return set;
}

const Lexicon& pronouns() {
  static const Lexicon set = {"it", "they", "them", "he", "she", "we",
                              "you", "i", "who", "whom", "which", "itself",
                              "themselves", "someone", "anyone", "everyone"};
  return set;
}

const Lexicon& adpositions() {
  static const Lexicon set = {
      "of", "to", "in", "on", "for", "with", "by", "at", "from", "before",
      "after", "within", "about", "under", "during", "into", "without",
      "upon", "through", "per", "over", "across", "between", "via", "among",
      "until", "unless", "if", "when", "once", "while", "where", "whether",
      "as", "than", "against", "prior", "because", "since", "following"};
  return set;
}

const Lexicon& adverbs() {
  static const Lexicon set = {
      "not", "never", "also", "only", "always", "then", "otherwise",
      "however", "still", "already", "soon", "again", "n't", "often",
      "together", "instead", "here", "there", "too", "very", "else"};
  return set;
}

const Lexicon& conjunctions() {
  static const Lexicon set = {"and", "or", "but", "nor", "so", "yet"};
  return set;
}

const Lexicon& adjectives() {
  static const Lexicon set = {
      "new", "official", "public", "private", "responsible", "required",
      "necessary", "active", "open", "final", "formal", "binding", "other",
      "several", "least", "many", "more", "most", "same", "such", "initial",
      "regular", "monthly", "quarterly", "sufficient", "valid", "legal",
      "good", "clear", "binary", "current", "next", "prior", "proper",
      "able", "two", "three", "first", "last", "full", "entire", "own"};
  return set;
}

const Lexicon& verbs() {
  static const Lexicon set = {
      "vote", "notify", "report", "release", "approve", "review", "publish",
      "sign", "subscribe", "discuss", "verify", "include", "maintain",
      "follow", "document", "submit", "elect", "nominate", "appoint",
      "provide", "ensure", "send", "announce", "call", "cast", "graduate",
      "retire", "request", "accept", "reject", "create", "make", "keep",
      "use", "have", "has", "had", "be", "is", "are", "was", "were", "been",
      "being", "do", "does", "did", "become", "help", "monitor", "oversee",
      "guide", "assist", "respond", "resolve", "record", "track", "update",
      "check", "contact", "join", "leave", "remove", "add", "manage",
      "handle", "prepare", "tag", "build", "host", "move", "apply",
      "register", "comply", "describe", "explain", "propose", "consider",
      "decide", "agree", "veto", "mentor", "file", "list", "post", "answer",
      "train", "welcome", "recruit", "audit", "archive", "license", "ask",
      "give", "take", "get", "see", "meet", "hold", "run", "share", "work",
      "write", "read", "need", "require", "encourage", "allow", "grant"};
  return set;
}

bool has_suffix(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() + 1 &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool is_number(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' ||
           ch == ',' || ch == '%';
  }) && std::isdigit(static_cast<unsigned char>(s.front()));
}

bool all_punct(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return std::ispunct(static_cast<unsigned char>(ch)) != 0;
  });
}

// Context-free tag from lexicon membership and suffixes.
Pos lexical_tag(std::string_view form, std::string_view lower) {
  if (all_punct(form)) return Pos::Punct;
  if (is_number(form)) return Pos::Num;
  if (modals().contains(lower)) return Pos::Modal;
  if (determiners().contains(lower)) return Pos::Det;
  if (pronouns().contains(lower)) return Pos::Pron;
  if (adpositions().contains(lower)) return Pos::Adp;
  if (adverbs().contains(lower)) return Pos::Adv;
  if (conjunctions().contains(lower)) return Pos::Other;
  if (adjectives().contains(lower)) return Pos::Adj;
  if (verbs().contains(lower)) return Pos::Verb;
  if (std::isupper(static_cast<unsigned char>(form.front()))) return Pos::Noun;
  if (has_suffix(lower, "ly")) return Pos::Adv;
  for (std::string_view suffix : {"ous", "ful", "able", "ible", "ive", "ic", "al"}) {
    if (has_suffix(lower, suffix)) return Pos::Adj;
  }
  for (std::string_view suffix : {"ize", "ise", "ify", "ed"}) {
    if (has_suffix(lower, suffix)) return Pos::Verb;
  }
  return Pos::Noun;
}

std::string word_shape(std::string_view form) {
  std::string shape;
  for (char ch : form) {
    const auto uc = static_cast<unsigned char>(ch);
    char cls = ch;
    if (std::isupper(uc)) cls = 'X';
    else if (std::islower(uc)) cls = 'x';
    else if (std::isdigit(uc)) cls = 'd';
    if (shape.empty() || shape.back() != cls) shape.push_back(cls);
  }
  return shape;
}

}  // namespace

std::string_view to_string(Pos pos) {
  static constexpr std::array<std::string_view, 11> names = {
      "NOUN", "VERB", "MODAL", "ADJ", "ADV", "DET",
      "ADP", "PRON", "NUM", "PUNCT", "OTHER"};
  return names[static_cast<std::size_t>(pos)];
}

std::string_view to_string(Relation relation) {
  static constexpr std::array<std::string_view, 6> names = {
      "root", "aux", "det", "amod", "obj", "other"};
  return names[static_cast<std::size_t>(relation)];
}

std::vector<TokenOffset> tokenize_offsets(std::string_view text) {
  std::vector<TokenOffset> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    if (end == i) break;

    std::size_t lo = i;
    std::size_t hi = end;
    while (lo < hi && is_detachable(text[lo])) {
      out.push_back({lo, 1});
      ++lo;
    }
    std::vector<TokenOffset> trailing;
    while (hi > lo && is_detachable(text[hi - 1])) {
      --hi;
      trailing.push_back({hi, 1});
    }
    if (hi > lo) out.push_back({lo, hi - lo});
    out.insert(out.end(), trailing.rbegin(), trailing.rend());
    i = end;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (const TokenOffset& t : tokenize_offsets(text)) {
    tokens.emplace_back(text.substr(t.begin, t.length));
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  static constexpr std::string_view kNoSpaceBefore = ".,;:!?)";
  std::string out;
  bool suppress_next = false;
  bool double_open = false;
  bool single_open = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    bool space = i > 0 && !suppress_next;
    suppress_next = false;
    if (tok.size() == 1) {
      const char ch = tok[0];
      if (kNoSpaceBefore.find(ch) != std::string_view::npos) {
        space = false;
      } else if (ch == '(') {
        suppress_next = true;
      } else if (ch == '"' || ch == '\'') {
        bool& open = ch == '"' ? double_open : single_open;
        if (open) {
          space = false;
        } else {
          suppress_next = true;
        }
        open = !open;
      }
    }
    if (space) out.push_back(' ');
    out += tok;
  }
  return out;
}

bool is_modal(std::string_view lower) { return modals().contains(lower); }

std::vector<SyntacticToken> annotate_syntax(std::span<const std::string> tokens) {
  const int n = static_cast<int>(tokens.size());
  std::vector<SyntacticToken> out(tokens.size());
  for (int i = 0; i < n; ++i) {
    SyntacticToken& t = out[i];
    t.index = i;
    t.form = tokens[i];
    t.lower = lowercase(t.form);
    t.shape = word_shape(t.form);
    t.pos = t.form.empty() ? Pos::Other : lexical_tag(t.form, t.lower);
  }

  // Verb/noun ambiguity: a lexicon verb right after a determiner, adjective,
  // number or non-"to" adposition is read as a noun ("the release").
  for (int i = 1; i < n; ++i) {
    SyntacticToken& t = out[i];
    if (t.pos != Pos::Verb) continue;
    const SyntacticToken& prev = out[i - 1];
    const bool nominal_context =
        prev.pos == Pos::Det || prev.pos == Pos::Adj || prev.pos == Pos::Num ||
        (prev.pos == Pos::Adp && prev.lower != "to") ||
        (prev.pos == Pos::Noun && i + 1 < n && out[i + 1].pos == Pos::Modal);
    if (nominal_context) t.pos = Pos::Noun;
  }
  // ...and a lexicon noun right after a modal (optionally through "not") is
  // read as a verb.
  for (int i = 1; i < n; ++i) {
    SyntacticToken& t = out[i];
    if (t.pos != Pos::Noun) continue;
    const SyntacticToken& prev = out[i - 1];
    const bool after_modal =
        prev.pos == Pos::Modal ||
        (prev.pos == Pos::Adv && i >= 2 && out[i - 2].pos == Pos::Modal);
    if (after_modal && std::islower(static_cast<unsigned char>(t.form.front()))) {
      t.pos = Pos::Verb;
    }
  }

  if (n == 0) return out;

  int root = -1;
  int first_modal = -1;
  for (int i = 0; i < n && first_modal < 0; ++i) {
    if (out[i].pos == Pos::Modal) first_modal = i;
  }
  if (first_modal >= 0) {
    for (int i = first_modal + 1; i < n && root < 0; ++i) {
      if (out[i].pos == Pos::Verb) root = i;
    }
  }
  for (int i = 0; i < n && root < 0; ++i) {
    if (out[i].pos == Pos::Verb) root = i;
  }
  if (root < 0) root = 0;

  auto next_with = [&](int from, Pos pos) {
    for (int j = from + 1; j < n; ++j) {
      if (out[j].pos == pos) return j;
    }
    return -1;
  };

  for (int i = 0; i < n; ++i) {
    SyntacticToken& t = out[i];
    if (i == root) {
      t.head = -1;
      t.relation = Relation::Root;
      continue;
    }
    int head = -1;
    Relation rel = Relation::Other;
    if (t.pos == Pos::Det || t.pos == Pos::Adj) {
      head = next_with(i, Pos::Noun);
      rel = t.pos == Pos::Det ? Relation::Det : Relation::Amod;
    } else if (t.pos == Pos::Modal) {
      head = next_with(i, Pos::Verb);
      rel = Relation::Aux;
    }
    if (head < 0) {
      head = root;
      rel = (i > root && (t.pos == Pos::Noun || t.pos == Pos::Pron))
                ? Relation::Obj
                : Relation::Other;
    }
    t.head = head;
    t.relation = rel;
  }
  return out;
}

FeatureVector featurize(std::span<const SyntacticToken> tokens,
                        std::size_t index) {
  if (index >= tokens.size()) {
    throw Error("featurize: index " + std::to_string(index) +
                " out of range for " + std::to_string(tokens.size()) +
                " tokens");
  }
  const SyntacticToken& t = tokens[index];
  const std::string pos(to_string(t.pos));
  FeatureVector f;
  auto set = [&f](std::string name) { f[std::move(name)] = 1.0; };

  set("bias");
  set("lower=" + t.lower);
  set("pos=" + pos);
  set("shape=" + t.shape);
  set("rel=" + std::string(to_string(t.relation)));
  if (t.lower.size() > 3) set("suffix3=" + t.lower.substr(t.lower.size() - 3));
  set(std::string("ismodal=") + (is_modal(t.lower) ? "1" : "0"));

  std::string head_pos = "<ROOT>";
  if (t.head >= 0) {
    const SyntacticToken& h = tokens[static_cast<std::size_t>(t.head)];
    head_pos = to_string(h.pos);
    set("headlower=" + h.lower);
    set(std::string("headdir=") + (t.head > t.index ? "right" : "left"));
  } else {
    set("headlower=<ROOT>");
    set("headdir=none");
  }
  set("headpos=" + head_pos);
  set("rel+headpos=" + std::string(to_string(t.relation)) + "|" + head_pos);

  // Side of the root and of the first modal: separates Attribute from Object
  // material that shares surface forms.
  int root = -1;
  int modal = -1;
  for (const SyntacticToken& s : tokens) {
    if (s.head < 0 && root < 0) root = s.index;
    if (s.pos == Pos::Modal && modal < 0) modal = s.index;
  }
  set(std::string("rootside=") +
      (t.index < root ? "pre" : t.index == root ? "at" : "post"));
  set(std::string("modalside=") +
      (modal < 0 ? "none" : t.index < modal ? "pre" : t.index == modal ? "at" : "post"));

  const auto n = static_cast<long>(tokens.size());
  const auto i = static_cast<long>(index);
  auto lower_at = [&](long j) -> std::string {
    if (j < 0) return "<S>";
    if (j >= n) return "</S>";
    return tokens[static_cast<std::size_t>(j)].lower;
  };
  auto pos_at = [&](long j) -> std::string {
    if (j < 0) return "<S>";
    if (j >= n) return "</S>";
    return std::string(to_string(tokens[static_cast<std::size_t>(j)].pos));
  };
  set("prev1=" + lower_at(i - 1));
  set("prev2=" + lower_at(i - 2));
  set("next1=" + lower_at(i + 1));
  set("next2=" + lower_at(i + 2));
  set("prev1pos=" + pos_at(i - 1));
  set("prev2pos=" + pos_at(i - 2));
  set("next1pos=" + pos_at(i + 1));
  set("next2pos=" + pos_at(i + 2));
  set("prev1pos+pos=" + pos_at(i - 1) + "|" + pos);
  set("pos+next1pos=" + pos + "|" + pos_at(i + 1));

  const char* bucket = index == 0                ? "first"
                       : index + 1 == tokens.size() ? "last"
                                                    : "interior";
  set(std::string("posbucket=") + bucket);
  return f;
}

}  // namespace igkit
