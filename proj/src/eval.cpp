#include "deplabel/eval.hpp"

#include <cstdint>

#include "deplabel/decoding.hpp"
#include "deplabel/error.hpp"

namespace deplabel {

namespace {

double percent(int correct, int total) {
  return total == 0 ? 0.0 : 100.0 * correct / total;
}

}  // namespace

double EvalResult::uas() const { return percent(head_correct, tokens_scored); }
double EvalResult::las() const { return percent(label_correct, tokens_scored); }

void EvalResult::merge(const EvalResult& other) {
  tokens_scored += other.tokens_scored;
  excluded += other.excluded;
  head_correct += other.head_correct;
  label_correct += other.label_correct;
}

std::string format_percent(int correct, int total) {
  if (total <= 0) return "0.00";
  // Hundredths of a percent, rounded half-up in exact integer arithmetic.
  const std::int64_t scaled = (std::int64_t{correct} * 20000 + total) / (2 * std::int64_t{total});
  std::string frac = std::to_string(scaled % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(scaled / 100) + "." + frac;
}

std::set<std::string> default_punct_tags() {
  // UPOS PUNCT plus the Penn Treebank punctuation tags.
  return {"PUNCT", "``", "''", ",", ".", ":", "-LRB-", "-RRB-", "#", "$"};
}

EvalResult attachment_scores(std::span<const DepTree> gold, std::span<const DepTree> pred,
                             const ScoringOptions& options,
                             std::span<const std::vector<std::string>> gold_tags) {
  if (gold.size() != pred.size())
    throw DataError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                    std::to_string(pred.size()));
  if (!gold_tags.empty() && gold_tags.size() != gold.size())
    throw DataError("gold tag list does not cover every sentence");

  EvalResult result;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const DepTree& g = gold[s];
    const DepTree& p = pred[s];
    if (g.size() != p.size() || p.deprels.size() != p.heads.size())
      throw DataError("sentence " + std::to_string(s + 1) + ": gold has " +
                      std::to_string(g.size()) + " tokens, prediction has " +
                      std::to_string(p.size()));
    for (int i = 1; i <= g.size(); ++i) {
      if (options.exclude_punct && !gold_tags.empty()) {
        const auto& tags = gold_tags[s];
        if (static_cast<std::size_t>(i) <= tags.size() && options.punct_tags.contains(tags[i - 1])) {
          ++result.excluded;
          continue;
        }
      }
      ++result.tokens_scored;
      if (g.head(i) == p.head(i)) {
        ++result.head_correct;
        if (g.deprel(i) == p.deprel(i)) ++result.label_correct;
      }
    }
  }
  return result;
}

namespace {

// Tags checked for punctuation: a token is excluded if either its UPOS or
// its XPOS matches, so each token contributes a single tag that matches
// whenever one of them does.
std::vector<std::string> punct_probe_tags(const Sentence& sentence, const ScoringOptions& options) {
  std::vector<std::string> tags;
  tags.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens)
    tags.push_back(options.punct_tags.contains(t.upos) ? t.upos : t.xpos);
  return tags;
}

}  // namespace

EvalResult attachment_scores(std::span<const Sentence> gold, std::span<const Sentence> pred,
                             const ScoringOptions& options) {
  if (gold.size() != pred.size())
    throw DataError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                    std::to_string(pred.size()));
  std::vector<DepTree> gold_trees, pred_trees;
  std::vector<std::vector<std::string>> tags;
  gold_trees.reserve(gold.size());
  pred_trees.reserve(pred.size());
  for (std::size_t s = 0; s < gold.size(); ++s) {
    try {
      gold_trees.push_back(tree_of(gold[s]));
      pred_trees.push_back(tree_of(pred[s]));
    } catch (const DataError& e) {
      throw DataError("sentence " + std::to_string(s + 1) + ": " + e.what());
    }
    tags.push_back(punct_probe_tags(gold[s], options));
  }
  return attachment_scores(gold_trees, pred_trees, options, tags);
}

EvalResult oracle_roundtrip(std::span<const Sentence> treebank, Encoding encoding,
                            PosSource pos_source, const ScoringOptions& options) {
  std::vector<DepTree> gold, decoded;
  std::vector<std::vector<std::string>> tags;
  gold.reserve(treebank.size());
  decoded.reserve(treebank.size());
  for (std::size_t s = 0; s < treebank.size(); ++s) {
    const Sentence& sentence = treebank[s];
    DepTree tree;
    try {
      tree = tree_of(sentence);
    } catch (const DataError& e) {
      throw DataError("sentence " + std::to_string(s + 1) + ": " + e.what());
    }
    std::vector<std::string> pos;
    if (encoding == Encoding::pos) pos = pos_tags(sentence, pos_source);

    RepairResult result;
    try {
      result = decode(encoding, encode(encoding, tree, pos), pos);
    } catch (const EncodeError&) {
      // Not representable: start from a parse where every head is missing.
      RawParse raw;
      raw.heads.assign(tree.size(), std::nullopt);
      raw.deprels = tree.deprels;
      for (int i = 1; i <= tree.size(); ++i) raw.anomalies.emplace_back(i, Anomaly::no_head);
      result = repair(raw, encoding, nullptr, false, pos);
    }
    gold.push_back(std::move(tree));
    decoded.push_back(std::move(result.tree));
    tags.push_back(punct_probe_tags(sentence, options));
  }
  return attachment_scores(gold, decoded, options, tags);
}

DepTree next_token_baseline(const Sentence& sentence) {
  DepTree tree;
  const int n = sentence.size();
  for (int i = 1; i <= n; ++i) {
    tree.heads.push_back(i == n ? 0 : i + 1);
    tree.deprels.push_back(i == n ? "root" : "dep");
  }
  return tree;
}

}  // namespace deplabel
