#include "deplabel/decoding.hpp"

#include <algorithm>
#include <sstream>

#include "deplabel/error.hpp"

namespace deplabel {

std::string_view to_string(Anomaly anomaly) {
  switch (anomaly) {
    case Anomaly::out_of_range: return "out_of_range";
    case Anomaly::unmatched_bracket: return "unmatched_bracket";
    case Anomaly::no_head: return "no_head";
  }
  return "?";
}

std::string_view to_string(RootSource source) {
  switch (source) {
    case RootSource::decoded: return "decoded";
    case RootSource::kbest_search: return "kbest_search";
    case RootSource::first_token: return "first_token";
    case RootSource::multi_root_collapse: return "multi_root_collapse";
  }
  return "?";
}

bool RawParse::has_anomaly(int token, Anomaly kind) const {
  return std::find(anomalies.begin(), anomalies.end(), std::pair{token, kind}) != anomalies.end();
}

std::vector<EncodedLabel> KBestLabels::best() const {
  std::vector<EncodedLabel> labels;
  labels.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty())
      throw DataError("token " + std::to_string(i + 1) + " has no candidate labels");
    labels.push_back(tokens[i].front().label);
  }
  return labels;
}

namespace {

std::string join(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

void check_label(Encoding encoding, const EncodedLabel& label, int token) {
  const std::string where = "token " + std::to_string(token) + ": ";
  if (encoding_of(label.head) != encoding)
    throw DataError(where + "label '" + format_head(label.head) + "' does not belong to the " +
                    std::string(to_string(encoding)) + " encoding");
  if (const auto* o = std::get_if<Offset>(&label.head); o && o->delta == 0)
    throw DataError(where + "relative offset 0");
  if (const auto* p = std::get_if<PosRank>(&label.head); p && p->rank == 0)
    throw DataError(where + "PoS rank 0");
  if (const auto* b = std::get_if<Bracket>(&label.head); b && !is_bracket_string(b->brackets))
    throw DataError(where + "malformed bracket string '" + b->brackets + "'");
}

// Head named by a single non-bracket label of token i; may be out of range.
// nullopt when a PoS rank points past the available tags.
std::optional<int> head_of(const EncodedLabel& label, int i, std::span<const std::string> pos) {
  const int n = static_cast<int>(pos.size());
  if (const auto* a = std::get_if<Absolute>(&label.head)) return a->head;
  if (const auto* o = std::get_if<Offset>(&label.head)) return i + o->delta;
  if (const auto* p = std::get_if<PosRank>(&label.head)) {
    auto tag_at = [&](int node) -> std::string_view {
      return node == 0 ? kRootTag : std::string_view(pos[node - 1]);
    };
    int remaining = p->rank > 0 ? p->rank : -p->rank;
    if (p->rank > 0) {
      for (int j = i + 1; j <= n; ++j)
        if (tag_at(j) == p->pos && --remaining == 0) return j;
    } else {
      for (int j = i - 1; j >= 0; --j)
        if (tag_at(j) == p->pos && --remaining == 0) return j;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

RawParse decode_brackets(std::span<const EncodedLabel> labels) {
  const int n = static_cast<int>(labels.size());
  RawParse raw;
  raw.heads.assign(n, std::nullopt);

  // A token keeps the first head the brackets give it.
  auto attach = [&](int head, int dep) {
    if (!raw.heads[dep - 1]) raw.heads[dep - 1] = head;
  };

  std::vector<int> left_pending;  // dependents waiting for a head to their right
  std::vector<int> right_heads;   // heads waiting for a dependent to their right
  for (int i = 1; i <= n; ++i) {
    const std::string& s = std::get<Bracket>(labels[i - 1].head).brackets;
    for (char c : s) {
      switch (c) {
        case '<':
          left_pending.push_back(i - 1);
          break;
        case '\\':
          if (left_pending.empty() || left_pending.back() == 0) {
            if (!left_pending.empty()) left_pending.pop_back();
            raw.anomalies.emplace_back(i, Anomaly::unmatched_bracket);
          } else {
            attach(i, left_pending.back());
            left_pending.pop_back();
          }
          break;
        case '/':
          right_heads.push_back(i - 1);
          break;
        case '>':
          if (right_heads.empty()) {
            raw.anomalies.emplace_back(i, Anomaly::unmatched_bracket);
          } else {
            attach(right_heads.back(), i);
            right_heads.pop_back();
          }
          break;
        default:
          break;
      }
    }
  }
  for (int d : left_pending) raw.anomalies.emplace_back(d == 0 ? 1 : d, Anomaly::unmatched_bracket);
  for (int h : right_heads) raw.anomalies.emplace_back(h == 0 ? 1 : h, Anomaly::unmatched_bracket);

  for (int i = 1; i <= n; ++i) {
    if (raw.heads[i - 1]) continue;
    const bool flagged = std::any_of(raw.anomalies.begin(), raw.anomalies.end(),
                                     [i](const auto& a) { return a.first == i; });
    if (!flagged) raw.anomalies.emplace_back(i, Anomaly::no_head);
  }
  std::sort(raw.anomalies.begin(), raw.anomalies.end());
  raw.anomalies.erase(std::unique(raw.anomalies.begin(), raw.anomalies.end()), raw.anomalies.end());
  return raw;
}

}  // namespace

RawParse decode_raw(Encoding encoding, std::span<const EncodedLabel> labels,
                    std::span<const std::string> pos) {
  const int n = static_cast<int>(labels.size());
  for (int i = 1; i <= n; ++i) check_label(encoding, labels[i - 1], i);
  if (encoding == Encoding::pos) {
    if (static_cast<int>(pos.size()) != n)
      throw DataError("PoS-based decoding needs one tag per token (" + std::to_string(n) +
                      " labels, " + std::to_string(pos.size()) + " tags)");
    check_pos_tags(pos);
  }

  RawParse raw;
  if (encoding == Encoding::bracket) {
    raw = decode_brackets(labels);
  } else {
    raw.heads.reserve(n);
    for (int i = 1; i <= n; ++i) {
      const auto head = head_of(labels[i - 1], i, encoding == Encoding::pos ? pos : std::span<const std::string>{});
      raw.heads.push_back(head);
      if (!head || *head < 0 || *head > n) raw.anomalies.emplace_back(i, Anomaly::out_of_range);
    }
  }
  raw.deprels.reserve(n);
  for (const auto& label : labels) raw.deprels.push_back(label.deprel);
  return raw;
}

RepairResult repair(const RawParse& raw, Encoding encoding, const KBestLabels* kbest,
                    bool single_root, std::span<const std::string> pos) {
  const int n = raw.size();
  if (kbest && kbest->size() != n)
    throw DataError("k-best list covers " + std::to_string(kbest->size()) + " tokens, parse has " +
                    std::to_string(n));
  if (encoding == Encoding::pos && static_cast<int>(pos.size()) != n)
    throw DataError("PoS-based repair needs one tag per token");

  RepairResult result;
  if (n == 0) return result;
  RepairReport& report = result.report;
  std::vector<int> heads(n + 1, -1);  // 1-based; -1 = not attached yet
  std::vector<std::string> deprels = raw.deprels;
  std::vector<std::optional<double>> used_score(n + 1);
  if (kbest)
    for (int i = 1; i <= n; ++i)
      if (!kbest->tokens[i - 1].empty()) used_score[i] = kbest->tokens[i - 1].front().score;

  std::vector<int> detached;
  for (int i = 1; i <= n; ++i) {
    const auto& h = raw.heads[i - 1];
    if (h && *h >= 0 && *h <= n) {
      heads[i] = *h;
    } else if (!h && encoding == Encoding::bracket && raw.has_anomaly(i, Anomaly::no_head)) {
      heads[i] = 0;  // no bracket claims it: a child of the dummy root
    } else {
      detached.push_back(i);
    }
  }

  auto first_root = [&]() {
    for (int i = 1; i <= n; ++i)
      if (heads[i] == 0) return i;
    return 0;
  };

  // (1) out-of-range and unmatched tokens go under the root token.
  int root = first_root();
  if (root != 0) {
    for (int t : detached) heads[t] = root;
    report.reattached_out_of_range = detached;
    detached.clear();
  }

  // (2) make sure some token hangs from the dummy root.
  if (root == 0) {
    report.root_imputed = true;
    if (kbest && encoding != Encoding::bracket) {
      for (int i = 1; i <= n && root == 0; ++i) {
        const auto& candidates = kbest->tokens[i - 1];
        const std::size_t depth = std::min<std::size_t>(candidates.size(), kRootSearchDepth);
        for (std::size_t c = 0; c < depth; ++c) {
          const auto head = head_of(candidates[c].label, i, pos);
          if (head && *head == 0) {
            root = i;
            deprels[i - 1] = candidates[c].label.deprel;
            used_score[i] = candidates[c].score;
            report.root_source = RootSource::kbest_search;
            break;
          }
        }
      }
    }
    if (root == 0) {
      root = 1;
      deprels[0] = "root";
      report.root_source = RootSource::first_token;
    }
    heads[root] = 0;
    std::erase(detached, root);
  }

  // (3) tokens deferred in step 1.
  for (int t : detached) {
    heads[t] = root;
    report.reattached_out_of_range.push_back(t);
  }
  std::sort(report.reattached_out_of_range.begin(), report.reattached_out_of_range.end());

  // (4) optionally keep a single root: best scoring, leftmost on ties.
  if (single_root) {
    std::vector<int> roots;
    for (int i = 1; i <= n; ++i)
      if (heads[i] == 0) roots.push_back(i);
    if (roots.size() > 1) {
      int keep = roots.front();
      for (int r : roots)
        if (used_score[r] && (!used_score[keep] || *used_score[r] > *used_score[keep])) keep = r;
      for (int r : roots) {
        if (r == keep) continue;
        heads[r] = keep;
        report.collapsed_roots.push_back(r);
      }
      report.root_source = RootSource::multi_root_collapse;
      root = keep;
    }
  }

  // (5) break cycles, smallest index first, at the cycle's leftmost token.
  for (;;) {
    const auto validity = validate(std::span<const int>(heads).subspan(1));
    if (validity.cycles.empty()) break;
    const auto& cycle = validity.cycles.front();
    heads[cycle.front()] = root;
    report.broken_cycles.push_back({cycle, cycle.front()});
  }

  result.tree.heads.assign(heads.begin() + 1, heads.end());
  result.tree.deprels = std::move(deprels);
  return result;
}

RepairResult decode(Encoding encoding, std::span<const EncodedLabel> labels,
                    std::span<const std::string> pos, bool single_root) {
  return repair(decode_raw(encoding, labels, pos), encoding, nullptr, single_root, pos);
}

RepairResult decode(Encoding encoding, const KBestLabels& kbest, std::span<const std::string> pos,
                    bool single_root) {
  const auto best = kbest.best();
  return repair(decode_raw(encoding, best, pos), encoding, &kbest, single_root, pos);
}

std::string RepairReport::summary() const {
  if (empty()) return "no repairs";
  std::ostringstream out;
  const char* sep = "";
  if (root_imputed || root_source != RootSource::decoded) {
    out << "root " << to_string(root_source);
    sep = "; ";
  }
  if (!reattached_out_of_range.empty()) {
    out << sep << "reattached " << join(reattached_out_of_range);
    sep = "; ";
  }
  if (!collapsed_roots.empty()) {
    out << sep << "collapsed roots " << join(collapsed_roots);
    sep = "; ";
  }
  for (const auto& broken : broken_cycles) {
    out << sep << "broke cycle " << join(broken.cycle) << " at " << broken.detached;
    sep = "; ";
  }
  return out.str();
}

}  // namespace deplabel
