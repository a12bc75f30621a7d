#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deplabel/conllu.hpp"
#include "deplabel/decoding.hpp"
#include "deplabel/encoding.hpp"

namespace deplabel {

// Labeled-token files:
//
//   # encoding = pos
//   # pos-source = upos
//   1<TAB>Alice<TAB>N<TAB>NNP<TAB>V@+1<TAB>nsubj
//   ...
//
// one row per token, sentences separated by blank lines. k-best files put
// '|'-separated candidate lists in the last two columns and add a seventh
// column of '|'-separated scores, best first.

struct LabeledRow {
  int id = 0;
  std::string form = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::vector<EncodedLabel> candidates;  // best first, never empty
  std::vector<double> scores;            // empty, or one per candidate

  friend bool operator==(const LabeledRow&, const LabeledRow&) = default;
};

struct LabeledSentence {
  std::vector<LabeledRow> rows;

  int size() const { return static_cast<int>(rows.size()); }
  std::vector<EncodedLabel> best_labels() const;
  std::vector<std::string> pos_tags(PosSource source) const;
  bool has_scores() const;
  KBestLabels kbest() const;

  friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

struct LabelTable {
  Encoding encoding = Encoding::naive;
  std::optional<PosSource> pos_source;  // required for Encoding::pos
  std::vector<LabeledSentence> sentences;

  friend bool operator==(const LabelTable&, const LabelTable&) = default;
};

LabelTable read_labels(std::istream& in);
LabelTable read_labels_string(std::string_view text);

/// Writes seven columns for rows with scores and six otherwise.
void write_labels(std::ostream& out, const LabelTable& table);
std::string write_labels_string(const LabelTable& table);

/// Encodes a treebank into a label table. Throws EncodeError (with the
/// sentence number) for trees the encoding cannot represent.
LabelTable encode_treebank(std::span<const Sentence> sentences, Encoding encoding,
                           std::optional<PosSource> pos_source);

LabeledSentence labeled_sentence(const Sentence& sentence,
                                 const std::vector<EncodedLabel>& labels);
LabeledSentence labeled_sentence(const Sentence& sentence, const KBestLabels& kbest);

/// A CoNLL-U skeleton (ID FORM UPOS XPOS) for a labeled sentence.
Sentence skeleton_sentence(const LabeledSentence& sentence);

}  // namespace deplabel
