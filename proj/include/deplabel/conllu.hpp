#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deplabel/tree.hpp"

namespace deplabel {

enum class PosSource { upos, xpos };

std::string_view to_string(PosSource source);
/// Throws DataError on anything but "upos" / "xpos".
PosSource parse_pos_source(std::string_view text);

/// One syntactic word of a CoNLL-U sentence. String columns keep their raw
/// text ("_" included); only HEAD has an explicit absent state.
struct Token {
  int id = 0;
  std::string form = "_";
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  std::optional<int> head;
  std::string deprel = "_";
  std::string deps = "_";
  std::string misc = "_";

  friend bool operator==(const Token&, const Token&) = default;
};

/// A multiword-token range or empty-node line, kept verbatim. It is written
/// back right before the token at index `before_token` (0-based).
struct PreservedLine {
  std::size_t before_token = 0;
  std::string line;

  friend bool operator==(const PreservedLine&, const PreservedLine&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<std::string> comments;  // full lines, leading '#' included
  std::vector<PreservedLine> preserved;

  int size() const { return static_cast<int>(tokens.size()); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Parses CoNLL-U (or 10-column CoNLL-X) text. Errors carry the 1-based
/// line number.
std::vector<Sentence> read_conllu(std::istream& in);
std::vector<Sentence> read_conllu_string(std::string_view text);
std::vector<Sentence> read_conllu_file(const std::string& path);

/// Throws DataError if a token has no head.
void write_conllu(std::ostream& out, std::span<const Sentence> sentences);
std::string write_conllu_string(std::span<const Sentence> sentences);

/// The gold tree of a sentence. Throws DataError if any head or deprel is
/// absent.
DepTree tree_of(const Sentence& sentence);

/// Overwrites HEAD and DEPREL of every token.
void apply_tree(Sentence& sentence, const DepTree& tree);

std::vector<std::string> pos_tags(const Sentence& sentence, PosSource source);

}  // namespace deplabel
