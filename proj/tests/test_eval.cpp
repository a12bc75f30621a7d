#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "deplabel/error.hpp"
#include "deplabel/eval.hpp"
#include "fixtures.hpp"

using namespace deplabel;

namespace {

// "name UAS LAS" lines, '#' comments skipped.
std::map<std::string, std::pair<std::string, std::string>> read_expected(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::map<std::string, std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name, uas, las;
    fields >> name >> uas >> las;
    out[name] = {uas, las};
  }
  return out;
}

std::pair<std::string, std::string> scores(const EvalResult& r) {
  return {format_percent(r.head_correct, r.tokens_scored),
          format_percent(r.label_correct, r.tokens_scored)};
}

}  // namespace

TEST_CASE("percentages round half up to two decimals") {
  CHECK(format_percent(0, 0) == "0.00");
  CHECK(format_percent(4, 4) == "100.00");
  CHECK(format_percent(3, 4) == "75.00");
  CHECK(format_percent(2, 3) == "66.67");
  CHECK(format_percent(1, 3) == "33.33");
  CHECK(format_percent(1, 800) == "0.13");   // 0.125
  CHECK(format_percent(1, 4000) == "0.03");  // 0.025
  CHECK(format_percent(9399, 10000) == "93.99");
  CHECK(format_percent(37, 40) == "92.50");
}

TEST_CASE("hand-scored prediction files") {
  const auto gold = read_conllu_file(testing::data_path("eval/gold.conllu"));
  const auto expected = read_expected(testing::data_path("eval/expected.txt"));
  REQUIRE(expected.size() == 3);
  for (const auto& [name, want] : expected) {
    CAPTURE(name);
    const auto pred = read_conllu_file(testing::data_path("eval/" + name));
    const auto result = attachment_scores(gold, pred);
    CHECK(result.tokens_scored == 4);
    CHECK(scores(result) == want);
  }
}

TEST_CASE("scores as doubles") {
  const DepTree gold = testing::figure1_tree();
  DepTree pred = gold;
  pred.deprels[3] = "obj";
  const std::vector<DepTree> g{gold}, p{pred};
  const auto result = attachment_scores(g, p);
  CHECK(result.uas() == doctest::Approx(100.0));
  CHECK(result.las() == doctest::Approx(75.0));
  CHECK(EvalResult{}.uas() == 0.0);
}

TEST_CASE("a wrong deprel on a wrong head costs nothing extra") {
  DepTree pred = testing::figure1_tree();
  pred.heads[2] = 2;
  pred.deprels[2] = "amod";
  const std::vector<DepTree> g{testing::figure1_tree()}, p{pred};
  const auto result = attachment_scores(g, p);
  CHECK(result.head_correct == 3);
  CHECK(result.label_correct == 3);
}

TEST_CASE("punctuation exclusion looks at both tag columns") {
  const auto mixed = read_conllu_file(testing::data_path("mixed.conllu"));
  const auto all = attachment_scores(mixed, mixed);
  CHECK(all.tokens_scored == 40);
  CHECK(all.excluded == 0);

  ScoringOptions options;
  options.exclude_punct = true;
  const auto no_punct = attachment_scores(mixed, mixed, options);
  CHECK(no_punct.tokens_scored == 39);
  CHECK(no_punct.excluded == 1);

  // XPOS alone is enough.
  auto xpos_only = mixed;
  for (auto& s : xpos_only)
    for (auto& t : s.tokens)
      if (t.upos == "PUNCT") t.upos = "SYM";
  CHECK(attachment_scores(xpos_only, xpos_only, options).excluded == 1);

  options.punct_tags = {"DET"};
  CHECK(attachment_scores(mixed, mixed, options).excluded == 4);
}

TEST_CASE("mismatched lengths name the sentence") {
  const std::vector<DepTree> gold{testing::figure1_tree(), testing::figure1_tree()};
  const std::vector<DepTree> pred{testing::figure1_tree(), DepTree{{0}, {"root"}}};
  try {
    attachment_scores(gold, pred);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).starts_with("sentence 2:"));
  }
  CHECK_THROWS_AS(attachment_scores(gold, std::span<const DepTree>(pred).first(1)), DataError);
}

TEST_CASE("a treebank scores 100 against itself and drops with every flipped head") {
  const auto bank = read_conllu_file(testing::data_path("mixed.conllu"));
  std::vector<DepTree> gold;
  for (const auto& s : bank) gold.push_back(tree_of(s));
  const auto base = attachment_scores(gold, gold);
  CHECK(scores(base) == std::pair<std::string, std::string>{"100.00", "100.00"});
  for (std::size_t s = 0; s < gold.size(); ++s)
    for (int i = 1; i <= gold[s].size(); ++i) {
      auto pred = gold;
      pred[s].heads[i - 1] = gold[s].head(i) == 0 ? (i == 1 ? 2 : 1) : 0;
      CHECK(attachment_scores(gold, pred).uas() < base.uas());
    }
}

TEST_CASE("oracle round trip on the mixed treebank matches the hand-scored file") {
  const auto bank = read_conllu_file(testing::data_path("mixed.conllu"));
  const auto expected = read_expected(testing::data_path("mixed_oracle_expected.txt"));
  REQUIRE(expected.size() == 4);
  for (Encoding e : kAllEncodings) {
    CAPTURE(to_string(e));
    const auto result = oracle_roundtrip(bank, e, PosSource::upos);
    CHECK(result.tokens_scored == 40);
    CHECK(scores(result) == expected.at(std::string(to_string(e))));
  }
}

TEST_CASE("oracle round trip over the projective sentences only is exact") {
  auto bank = read_conllu_file(testing::data_path("mixed.conllu"));
  std::erase_if(bank, [](const Sentence& s) { return !is_projective(tree_of(s)); });
  REQUIRE(bank.size() == 9);
  const auto result = oracle_roundtrip(bank, Encoding::bracket);
  CHECK(result.head_correct == result.tokens_scored);
  CHECK(result.label_correct == result.tokens_scored);
}

TEST_CASE("the next-token baseline") {
  const DepTree baseline = next_token_baseline(testing::figure1_sentence());
  CHECK(baseline.heads == std::vector<int>{2, 3, 4, 0});
  CHECK(validate(baseline.heads).valid());
  const std::vector<DepTree> g{testing::figure1_tree()}, p{baseline};
  CHECK(attachment_scores(g, p).head_correct == 2);
}

TEST_CASE("results merge by summing counts") {
  EvalResult a{4, 1, 3, 2}, b{6, 0, 6, 5};
  a.merge(b);
  CHECK(a.tokens_scored == 10);
  CHECK(a.excluded == 1);
  CHECK(a.head_correct == 9);
  CHECK(a.label_correct == 7);
}
