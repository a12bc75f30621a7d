#include "deplabel/conllu.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "deplabel/error.hpp"

namespace deplabel {

std::string_view to_string(PosSource source) {
  return source == PosSource::upos ? "upos" : "xpos";
}

PosSource parse_pos_source(std::string_view text) {
  if (text == "upos") return PosSource::upos;
  if (text == "xpos") return PosSource::xpos;
  throw DataError("unknown PoS source '" + std::string(text) + "' (expected upos or xpos)");
}

namespace {

constexpr int kColumns = 10;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& message) {
  throw DataError("line " + std::to_string(line_no) + ": " + message);
}

struct PendingSentence {
  Sentence sentence;
  std::vector<std::size_t> token_lines;  // source line of each token
  std::size_t first_line = 0;
  bool started = false;
};

void finish(PendingSentence& pending, std::vector<Sentence>& out) {
  if (!pending.started) return;
  Sentence& s = pending.sentence;
  if (s.tokens.empty()) {
    // Comments or preserved lines without any token line.
    fail(pending.first_line, "sentence has no token lines");
  }
  const int n = s.size();
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const Token& t = s.tokens[i];
    if (t.head && (*t.head < 0 || *t.head > n))
      fail(pending.token_lines[i], "head " + std::to_string(*t.head) +
                                       " outside [0, " + std::to_string(n) + "]");
  }
  out.push_back(std::move(s));
  pending = PendingSentence{};
}

}  // namespace

std::vector<Sentence> read_conllu(std::istream& in) {
  std::vector<Sentence> sentences;
  PendingSentence pending;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      finish(pending, sentences);
      continue;
    }
    if (!pending.started) pending.first_line = line_no;
    pending.started = true;

    if (line.front() == '#') {
      pending.sentence.comments.emplace_back(line);
      continue;
    }

    const auto fields = split_tabs(line);
    if (fields.size() != kColumns)
      fail(line_no, "expected 10 tab-separated columns, found " + std::to_string(fields.size()));

    const std::string_view id = fields[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      pending.sentence.preserved.push_back({pending.sentence.tokens.size(), std::string(line)});
      continue;
    }

    Token token;
    const auto id_value = parse_int(id);
    if (!id_value) fail(line_no, "non-numeric token id '" + std::string(id) + "'");
    const int expected = pending.sentence.size() + 1;
    if (*id_value != expected)
      fail(line_no, "token id " + std::to_string(*id_value) + " where " +
                        std::to_string(expected) + " was expected");
    token.id = *id_value;
    token.form = fields[1];
    token.lemma = fields[2];
    token.upos = fields[3];
    token.xpos = fields[4];
    token.feats = fields[5];
    if (fields[6] != "_") {
      const auto head = parse_int(fields[6]);
      if (!head) fail(line_no, "non-numeric head '" + std::string(fields[6]) + "'");
      if (*head == token.id) fail(line_no, "token " + std::to_string(token.id) + " is its own head");
      token.head = *head;
    }
    token.deprel = fields[7];
    token.deps = fields[8];
    token.misc = fields[9];
    pending.sentence.tokens.push_back(std::move(token));
    pending.token_lines.push_back(line_no);
  }
  finish(pending, sentences);
  return sentences;
}

std::vector<Sentence> read_conllu_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_conllu(in);
}

std::vector<Sentence> read_conllu_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  try {
    return read_conllu(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_conllu(std::ostream& out, std::span<const Sentence> sentences) {
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const Sentence& sentence = sentences[s];
    for (const auto& c : sentence.comments) out << c << '\n';
    std::size_t next_preserved = 0;
    auto flush_preserved = [&](std::size_t before) {
      while (next_preserved < sentence.preserved.size() &&
             sentence.preserved[next_preserved].before_token <= before)
        out << sentence.preserved[next_preserved++].line << '\n';
    };
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      flush_preserved(i);
      const Token& t = sentence.tokens[i];
      if (!t.head)
        throw DataError("sentence " + std::to_string(s + 1) + ", token " +
                        std::to_string(t.id) + ": missing head");
      out << t.id << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t'
          << t.xpos << '\t' << t.feats << '\t' << *t.head << '\t' << t.deprel << '\t'
          << t.deps << '\t' << t.misc << '\n';
    }
    flush_preserved(sentence.tokens.size());
    out << '\n';
  }
}

std::string write_conllu_string(std::span<const Sentence> sentences) {
  std::ostringstream out;
  write_conllu(out, sentences);
  return out.str();
}

DepTree tree_of(const Sentence& sentence) {
  DepTree tree;
  tree.heads.reserve(sentence.tokens.size());
  tree.deprels.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) {
    if (!t.head) throw DataError("token " + std::to_string(t.id) + " has no head");
    if (t.deprel == "_" || t.deprel.empty())
      throw DataError("token " + std::to_string(t.id) + " has no deprel");
    tree.heads.push_back(*t.head);
    tree.deprels.push_back(t.deprel);
  }
  return tree;
}

void apply_tree(Sentence& sentence, const DepTree& tree) {
  if (tree.size() != sentence.size())
    throw DataError("tree has " + std::to_string(tree.size()) + " tokens, sentence has " +
                    std::to_string(sentence.size()));
  for (int i = 1; i <= tree.size(); ++i) {
    sentence.tokens[i - 1].head = tree.head(i);
    sentence.tokens[i - 1].deprel = tree.deprel(i);
  }
}

std::vector<std::string> pos_tags(const Sentence& sentence, PosSource source) {
  std::vector<std::string> tags;
  tags.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens)
    tags.push_back(source == PosSource::upos ? t.upos : t.xpos);
  return tags;
}

}  // namespace deplabel
