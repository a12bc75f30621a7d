#include "deplabel/label_file.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "deplabel/error.hpp"

namespace deplabel {

std::vector<EncodedLabel> LabeledSentence::best_labels() const {
  std::vector<EncodedLabel> labels;
  labels.reserve(rows.size());
  for (const auto& row : rows) labels.push_back(row.candidates.front());
  return labels;
}

std::vector<std::string> LabeledSentence::pos_tags(PosSource source) const {
  std::vector<std::string> tags;
  tags.reserve(rows.size());
  for (const auto& row : rows) tags.push_back(source == PosSource::upos ? row.upos : row.xpos);
  return tags;
}

bool LabeledSentence::has_scores() const {
  return !rows.empty() && !rows.front().scores.empty();
}

KBestLabels LabeledSentence::kbest() const {
  KBestLabels kbest;
  kbest.tokens.reserve(rows.size());
  for (const auto& row : rows) {
    auto& token = kbest.tokens.emplace_back();
    for (std::size_t c = 0; c < row.candidates.size(); ++c)
      token.push_back({row.candidates[c], row.scores.empty() ? 0.0 : row.scores[c]});
  }
  return kbest;
}

namespace {

constexpr std::string_view kEncodingHeader = "# encoding = ";
constexpr std::string_view kPosSourceHeader = "# pos-source = ";

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = text.find(sep, start);
    if (at == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, at - start));
    start = at + 1;
  }
}

[[noreturn]] void fail(std::size_t line_no, const std::string& message) {
  throw DataError("line " + std::to_string(line_no) + ": " + message);
}

double parse_score(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    fail(line_no, "invalid score '" + std::string(text) + "'");
  return value;
}

std::string format_score(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

}  // namespace

LabelTable read_labels(std::istream& in) {
  LabelTable table;
  std::string raw;
  std::size_t line_no = 0;
  bool have_encoding = false;
  bool in_header = true;
  LabeledSentence current;

  auto flush = [&]() {
    if (!current.rows.empty()) table.sentences.push_back(std::move(current));
    current = LabeledSentence{};
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (in_header && line_no == 1) {
      if (!line.starts_with(kEncodingHeader))
        fail(line_no, "expected '# encoding = {naive|relpos|pos|bracket}' header");
      try {
        table.encoding = parse_encoding(line.substr(kEncodingHeader.size()));
      } catch (const DataError& e) {
        fail(line_no, e.what());
      }
      have_encoding = true;
      continue;
    }
    if (in_header && line.starts_with(kPosSourceHeader)) {
      try {
        table.pos_source = parse_pos_source(line.substr(kPosSourceHeader.size()));
      } catch (const DataError& e) {
        fail(line_no, e.what());
      }
      continue;
    }
    if (in_header && !line.empty() && line.front() == '#') continue;
    in_header = false;

    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;

    const auto fields = split(line, '\t');
    if (fields.size() != 6 && fields.size() != 7)
      fail(line_no, "expected 6 or 7 tab-separated columns, found " + std::to_string(fields.size()));

    LabeledRow row;
    const auto id = fields[0];
    int id_value = 0;
    auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), id_value);
    if (ec != std::errc() || ptr != id.data() + id.size())
      fail(line_no, "non-numeric token id '" + std::string(id) + "'");
    if (id_value != current.size() + 1)
      fail(line_no, "token id " + std::to_string(id_value) + " where " +
                        std::to_string(current.size() + 1) + " was expected");
    row.id = id_value;
    row.form = fields[1];
    row.upos = fields[2];
    row.xpos = fields[3];

    const auto heads = split(fields[4], '|');
    const auto deprels = split(fields[5], '|');
    if (heads.size() != deprels.size())
      fail(line_no, "candidate lists differ in length");
    if (fields.size() == 7) {
      for (auto score : split(fields[6], '|')) row.scores.push_back(parse_score(score, line_no));
      if (row.scores.size() != heads.size()) fail(line_no, "score list differs in length");
    } else if (heads.size() > 1) {
      fail(line_no, "k-best candidates need a score column");
    }
    for (std::size_t c = 0; c < heads.size(); ++c) {
      try {
        row.candidates.push_back({parse_head(table.encoding, heads[c]), std::string(deprels[c])});
      } catch (const DataError& e) {
        fail(line_no, e.what());
      }
    }
    current.rows.push_back(std::move(row));
  }
  flush();

  if (!have_encoding) throw DataError("missing '# encoding = ...' header");
  if (table.encoding == Encoding::pos && !table.pos_source)
    throw DataError("pos encoding requires a '# pos-source = {upos|xpos}' header");
  return table;
}

LabelTable read_labels_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_labels(in);
}

void write_labels(std::ostream& out, const LabelTable& table) {
  out << kEncodingHeader << to_string(table.encoding) << '\n';
  if (table.pos_source) out << kPosSourceHeader << to_string(*table.pos_source) << '\n';
  for (const auto& sentence : table.sentences) {
    for (const auto& row : sentence.rows) {
      if (row.candidates.empty())
        throw DataError("token " + std::to_string(row.id) + " has no label");
      out << row.id << '\t' << row.form << '\t' << row.upos << '\t' << row.xpos << '\t';
      for (std::size_t c = 0; c < row.candidates.size(); ++c)
        out << (c ? "|" : "") << format_head(row.candidates[c].head);
      out << '\t';
      for (std::size_t c = 0; c < row.candidates.size(); ++c)
        out << (c ? "|" : "") << row.candidates[c].deprel;
      if (!row.scores.empty()) {
        out << '\t';
        for (std::size_t c = 0; c < row.scores.size(); ++c)
          out << (c ? "|" : "") << format_score(row.scores[c]);
      }
      out << '\n';
    }
    out << '\n';
  }
}

std::string write_labels_string(const LabelTable& table) {
  std::ostringstream out;
  write_labels(out, table);
  return out.str();
}

LabeledSentence labeled_sentence(const Sentence& sentence, const std::vector<EncodedLabel>& labels) {
  if (static_cast<int>(labels.size()) != sentence.size())
    throw DataError("label count does not match sentence length");
  LabeledSentence out;
  out.rows.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Token& t = sentence.tokens[i];
    out.rows.push_back({t.id, t.form, t.upos, t.xpos, {labels[i]}, {}});
  }
  return out;
}

LabeledSentence labeled_sentence(const Sentence& sentence, const KBestLabels& kbest) {
  if (kbest.size() != sentence.size())
    throw DataError("k-best list does not match sentence length");
  LabeledSentence out;
  out.rows.reserve(kbest.tokens.size());
  for (std::size_t i = 0; i < kbest.tokens.size(); ++i) {
    const Token& t = sentence.tokens[i];
    LabeledRow row{t.id, t.form, t.upos, t.xpos, {}, {}};
    for (const auto& c : kbest.tokens[i]) {
      row.candidates.push_back(c.label);
      row.scores.push_back(c.score);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

LabelTable encode_treebank(std::span<const Sentence> sentences, Encoding encoding,
                           std::optional<PosSource> pos_source) {
  if (encoding == Encoding::pos && !pos_source)
    throw DataError("pos encoding requires a PoS source");
  LabelTable table;
  table.encoding = encoding;
  table.pos_source = pos_source;
  table.sentences.reserve(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    try {
      const DepTree tree = tree_of(sentences[s]);
      std::vector<std::string> pos;
      if (encoding == Encoding::pos) pos = pos_tags(sentences[s], *pos_source);
      table.sentences.push_back(labeled_sentence(sentences[s], encode(encoding, tree, pos)));
    } catch (const EncodeError& e) {
      throw EncodeError("sentence " + std::to_string(s + 1) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("sentence " + std::to_string(s + 1) + ": " + e.what());
    }
  }
  return table;
}

Sentence skeleton_sentence(const LabeledSentence& sentence) {
  Sentence out;
  out.tokens.reserve(sentence.rows.size());
  for (const auto& row : sentence.rows) {
    Token t;
    t.id = row.id;
    t.form = row.form;
    t.upos = row.upos;
    t.xpos = row.xpos;
    out.tokens.push_back(std::move(t));
  }
  return out;
}

}  // namespace deplabel
