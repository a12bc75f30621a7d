#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "deplabel/tree.hpp"

namespace deplabel {

enum class Encoding { naive, relpos, pos, bracket };

inline constexpr Encoding kAllEncodings[] = {Encoding::naive, Encoding::relpos,
                                             Encoding::pos, Encoding::bracket};

std::string_view to_string(Encoding encoding);
/// Throws DataError for an unknown name.
Encoding parse_encoding(std::string_view text);

/// Tag carried by the dummy root under the PoS-based encoding.
inline constexpr std::string_view kRootTag = "ROOT";

// Head components, one alternative per encoding.
struct Absolute {
  int head = 0;
  friend bool operator==(const Absolute&, const Absolute&) = default;
};
struct Offset {
  int delta = 0;  // never 0
  friend bool operator==(const Offset&, const Offset&) = default;
};
struct PosRank {
  std::string pos;
  int rank = 0;  // never 0; negative means "to the left"
  friend bool operator==(const PosRank&, const PosRank&) = default;
};
struct Bracket {
  std::string brackets;  // matches (<)?((\)*|(/)*)(>)?
  friend bool operator==(const Bracket&, const Bracket&) = default;
};

using HeadCode = std::variant<Absolute, Offset, PosRank, Bracket>;

struct EncodedLabel {
  HeadCode head;
  std::string deprel;
  friend bool operator==(const EncodedLabel&, const EncodedLabel&) = default;
};

Encoding encoding_of(const HeadCode& code);

std::vector<EncodedLabel> encode_naive(const DepTree& tree);
std::vector<EncodedLabel> encode_relpos(const DepTree& tree);
/// `pos` holds one tag per token (token 1 first); the dummy root is tagged
/// kRootTag implicitly.
std::vector<EncodedLabel> encode_pos(const DepTree& tree,
                                     std::span<const std::string> pos);
/// Throws EncodeError naming a crossing arc pair for non-projective trees.
std::vector<EncodedLabel> encode_bracket(const DepTree& tree);

std::vector<EncodedLabel> encode(Encoding encoding, const DepTree& tree,
                                 std::span<const std::string> pos = {});

/// Tags may not collide with kRootTag or contain '@', '|' or whitespace
/// separators used by the label files.
void check_pos_tags(std::span<const std::string> pos);

bool is_bracket_string(std::string_view text);

// Serialized head components: naive "3", relpos "+1"/"-2", pos "V@+1",
// bracket "<\>" with the empty string written as "_".
std::string format_head(const HeadCode& code);
/// Throws DataError when `text` does not follow the encoding's grammar.
HeadCode parse_head(Encoding encoding, std::string_view text);

/// Canonical single-string form of a full label: head component, a tab,
/// then the deprel. Used as the class name by the tagger and in inventories.
std::string label_key(const EncodedLabel& label);
EncodedLabel parse_label_key(Encoding encoding, std::string_view key);

struct TaggedTree {
  DepTree tree;
  std::vector<std::string> pos;
};

struct LabelInventory {
  Encoding encoding = Encoding::naive;
  std::size_t distinct_labels = 0;
  std::size_t distinct_heads = 0;  // distinct head components
  std::size_t tokens = 0;
  std::size_t skipped_sentences = 0;  // non-projective, bracket only
  std::map<std::string, std::size_t> frequencies;  // label_key -> count

  /// Merges another shard's counts into this one.
  void merge(const LabelInventory& other);
  /// The `limit` most frequent labels; ties are broken by label_key.
  std::vector<std::pair<std::string, std::size_t>> top(std::size_t limit) const;
};

LabelInventory label_inventory(std::span<const TaggedTree> treebank,
                               Encoding encoding);

}  // namespace deplabel
