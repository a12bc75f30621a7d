#include "deplabel/encoding.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "deplabel/error.hpp"

namespace deplabel {

std::string_view to_string(Encoding encoding) {
  switch (encoding) {
    case Encoding::naive: return "naive";
    case Encoding::relpos: return "relpos";
    case Encoding::pos: return "pos";
    case Encoding::bracket: return "bracket";
  }
  return "?";
}

Encoding parse_encoding(std::string_view text) {
  for (Encoding e : kAllEncodings)
    if (to_string(e) == text) return e;
  throw DataError("unknown encoding '" + std::string(text) +
                  "' (expected naive, relpos, pos or bracket)");
}

Encoding encoding_of(const HeadCode& code) {
  return static_cast<Encoding>(code.index());
}

namespace {

void require_encodable(const DepTree& tree) {
  if (tree.deprels.size() != tree.heads.size())
    throw DataError("tree has mismatched head and deprel counts");
  if (tree.heads.empty()) throw DataError("cannot encode an empty tree");
  if (!validate(tree.heads).valid()) throw DataError("cannot encode an invalid tree");
}

std::string signed_string(int value) {
  return (value > 0 ? "+" : "") + std::to_string(value);
}

}  // namespace

std::vector<EncodedLabel> encode_naive(const DepTree& tree) {
  require_encodable(tree);
  std::vector<EncodedLabel> labels;
  labels.reserve(tree.heads.size());
  for (int i = 1; i <= tree.size(); ++i) labels.push_back({Absolute{tree.head(i)}, tree.deprel(i)});
  return labels;
}

std::vector<EncodedLabel> encode_relpos(const DepTree& tree) {
  require_encodable(tree);
  std::vector<EncodedLabel> labels;
  labels.reserve(tree.heads.size());
  for (int i = 1; i <= tree.size(); ++i)
    labels.push_back({Offset{tree.head(i) - i}, tree.deprel(i)});
  return labels;
}

void check_pos_tags(std::span<const std::string> pos) {
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const std::string& tag = pos[i];
    const std::string where = "token " + std::to_string(i + 1) + ": ";
    if (tag.empty()) throw DataError(where + "empty PoS tag");
    if (tag == kRootTag)
      throw DataError(where + "PoS tag '" + tag + "' is reserved for the dummy root");
    if (tag.find_first_of("@|\t\n\r") != std::string::npos)
      throw DataError(where + "PoS tag '" + tag + "' contains a reserved character");
  }
}

std::vector<EncodedLabel> encode_pos(const DepTree& tree, std::span<const std::string> pos) {
  require_encodable(tree);
  if (static_cast<int>(pos.size()) != tree.size())
    throw DataError("PoS-based encoding needs one tag per token (" +
                    std::to_string(tree.size()) + " tokens, " + std::to_string(pos.size()) +
                    " tags)");
  check_pos_tags(pos);

  auto tag_at = [&](int node) -> std::string_view {
    return node == 0 ? kRootTag : std::string_view(pos[node - 1]);
  };

  std::vector<EncodedLabel> labels;
  labels.reserve(pos.size());
  for (int i = 1; i <= tree.size(); ++i) {
    const int h = tree.head(i);
    const std::string_view tag = tag_at(h);
    int rank = 0;
    if (h > i) {
      for (int j = i + 1; j <= h; ++j) rank += tag_at(j) == tag;
    } else {
      for (int j = i - 1; j >= h; --j) rank -= tag_at(j) == tag;
    }
    labels.push_back({PosRank{std::string(tag), rank}, tree.deprel(i)});
  }
  return labels;
}

std::vector<EncodedLabel> encode_bracket(const DepTree& tree) {
  require_encodable(tree);
  if (!is_projective(tree)) {
    const auto arcs = find_crossing_arcs(tree);
    std::string message = "bracket encoding needs a projective tree";
    if (arcs) {
      auto show = [](const Arc& a) {
        return std::to_string(a.first) + "->" + std::to_string(a.second);
      };
      message += "; arcs " + show(arcs->first) + " and " + show(arcs->second) + " cross";
    }
    throw EncodeError(message);
  }

  const int n = tree.size();
  // Per fencepost: whether '<' / '>' is present, and the '\' and '/' counts.
  std::vector<char> open_left(n + 1, 0), close_right(n + 1, 0);
  std::vector<int> backslashes(n + 1, 0), slashes(n + 1, 0);
  for (int d = 1; d <= n; ++d) {
    const int h = tree.head(d);
    if (h == 0) continue;  // root arcs are not represented
    if (h < d) {
      ++slashes[h + 1];
      close_right[d] = 1;
    } else {
      open_left[d + 1] = 1;
      ++backslashes[h];
    }
  }

  std::vector<EncodedLabel> labels;
  labels.reserve(n);
  for (int i = 1; i <= n; ++i) {
    std::string s;
    if (open_left[i]) s += '<';
    s.append(backslashes[i], '\\');
    s.append(slashes[i], '/');
    if (close_right[i]) s += '>';
    labels.push_back({Bracket{std::move(s)}, tree.deprel(i)});
  }
  return labels;
}

std::vector<EncodedLabel> encode(Encoding encoding, const DepTree& tree,
                                 std::span<const std::string> pos) {
  switch (encoding) {
    case Encoding::naive: return encode_naive(tree);
    case Encoding::relpos: return encode_relpos(tree);
    case Encoding::pos: return encode_pos(tree, pos);
    case Encoding::bracket: return encode_bracket(tree);
  }
  throw DataError("unknown encoding");
}

bool is_bracket_string(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && text[i] == '<') ++i;
  if (i < text.size() && (text[i] == '\\' || text[i] == '/')) {
    const char run = text[i];
    while (i < text.size() && text[i] == run) ++i;
  }
  if (i < text.size() && text[i] == '>') ++i;
  return i == text.size();
}

std::string format_head(const HeadCode& code) {
  struct Formatter {
    std::string operator()(const Absolute& a) const { return std::to_string(a.head); }
    std::string operator()(const Offset& o) const { return signed_string(o.delta); }
    std::string operator()(const PosRank& p) const { return p.pos + "@" + signed_string(p.rank); }
    std::string operator()(const Bracket& b) const {
      return b.brackets.empty() ? std::string("_") : b.brackets;
    }
  };
  return std::visit(Formatter{}, code);
}

namespace {

std::optional<int> parse_unsigned(std::string_view text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string_view::npos)
    return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// "+3" / "-2": sign mandatory, value nonzero.
std::optional<int> parse_signed_nonzero(std::string_view text) {
  if (text.size() < 2 || (text[0] != '+' && text[0] != '-')) return std::nullopt;
  const auto magnitude = parse_unsigned(text.substr(1));
  if (!magnitude || *magnitude == 0) return std::nullopt;
  return text[0] == '-' ? -*magnitude : *magnitude;
}

[[noreturn]] void bad_head(Encoding encoding, std::string_view text) {
  throw DataError("'" + std::string(text) + "' is not a valid " +
                  std::string(to_string(encoding)) + " head label");
}

}  // namespace

HeadCode parse_head(Encoding encoding, std::string_view text) {
  switch (encoding) {
    case Encoding::naive:
      if (const auto v = parse_unsigned(text)) return Absolute{*v};
      break;
    case Encoding::relpos:
      if (const auto v = parse_signed_nonzero(text)) return Offset{*v};
      break;
    case Encoding::pos: {
      const std::size_t at = text.rfind('@');
      if (at == std::string_view::npos || at == 0) break;
      const std::string_view tag = text.substr(0, at);
      if (tag.find_first_of("@|\t") != std::string_view::npos) break;
      if (const auto v = parse_signed_nonzero(text.substr(at + 1)))
        return PosRank{std::string(tag), *v};
      break;
    }
    case Encoding::bracket:
      if (text == "_") return Bracket{};
      if (!text.empty() && is_bracket_string(text)) return Bracket{std::string(text)};
      break;
  }
  bad_head(encoding, text);
}

std::string label_key(const EncodedLabel& label) {
  return format_head(label.head) + '\t' + label.deprel;
}

EncodedLabel parse_label_key(Encoding encoding, std::string_view key) {
  const std::size_t tab = key.find('\t');
  if (tab == std::string_view::npos) throw DataError("malformed label '" + std::string(key) + "'");
  return {parse_head(encoding, key.substr(0, tab)), std::string(key.substr(tab + 1))};
}

void LabelInventory::merge(const LabelInventory& other) {
  tokens += other.tokens;
  skipped_sentences += other.skipped_sentences;
  for (const auto& [key, count] : other.frequencies) frequencies[key] += count;
  distinct_labels = frequencies.size();
  std::set<std::string_view> heads;
  for (const auto& [key, count] : frequencies) heads.insert(std::string_view(key).substr(0, key.find('\t')));
  distinct_heads = heads.size();
}

std::vector<std::pair<std::string, std::size_t>> LabelInventory::top(std::size_t limit) const {
  std::vector<std::pair<std::string, std::size_t>> entries(frequencies.begin(), frequencies.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (entries.size() > limit) entries.resize(limit);
  return entries;
}

LabelInventory label_inventory(std::span<const TaggedTree> treebank, Encoding encoding) {
  LabelInventory shard;
  shard.encoding = encoding;
  for (const TaggedTree& item : treebank) {
    std::vector<EncodedLabel> labels;
    try {
      labels = encode(encoding, item.tree, item.pos);
    } catch (const EncodeError&) {
      ++shard.skipped_sentences;
      continue;
    }
    shard.tokens += labels.size();
    for (const auto& label : labels) ++shard.frequencies[label_key(label)];
  }
  LabelInventory result;
  result.encoding = encoding;
  result.merge(shard);
  return result;
}

}  // namespace deplabel
