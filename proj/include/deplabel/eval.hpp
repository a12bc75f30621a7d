#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "deplabel/conllu.hpp"
#include "deplabel/encoding.hpp"
#include "deplabel/tree.hpp"

namespace deplabel {

struct EvalResult {
  int tokens_scored = 0;
  int excluded = 0;
  int head_correct = 0;
  int label_correct = 0;  // head and deprel both correct

  double uas() const;
  double las() const;
  void merge(const EvalResult& other);
};

/// Percentage with two decimals, rounded half-up ("93.99"). 0 of 0 prints
/// "0.00".
std::string format_percent(int correct, int total);

std::set<std::string> default_punct_tags();

struct ScoringOptions {
  bool exclude_punct = false;
  // A token is punctuation when its gold UPOS or XPOS is in this set.
  std::set<std::string> punct_tags = default_punct_tags();
};

/// `gold_tags` is optional; when given it holds, per sentence and token, the
/// tags checked against ScoringOptions::punct_tags. Throws DataError naming
/// the first sentence whose length differs.
EvalResult attachment_scores(std::span<const DepTree> gold,
                             std::span<const DepTree> pred,
                             const ScoringOptions& options = {},
                             std::span<const std::vector<std::string>> gold_tags = {});

EvalResult attachment_scores(std::span<const Sentence> gold,
                             std::span<const Sentence> pred,
                             const ScoringOptions& options = {});

/// Encodes every gold tree, decodes it back through the repair pipeline and
/// scores the result. Trees the encoding cannot represent are decoded from
/// an all-headless parse.
EvalResult oracle_roundtrip(std::span<const Sentence> treebank, Encoding encoding,
                            PosSource pos_source = PosSource::upos,
                            const ScoringOptions& options = {});

/// Heads of the "attach to the next token, last token to the root"
/// baseline.
DepTree next_token_baseline(const Sentence& sentence);

}  // namespace deplabel
