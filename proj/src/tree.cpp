#include "deplabel/tree.hpp"

#include <algorithm>
#include <cstdlib>

#include "deplabel/error.hpp"

namespace deplabel {

ValidityReport validate(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  ValidityReport report;

  auto in_range = [n](int h) { return h >= 0 && h <= n; };
  for (int i = 1; i <= n; ++i) {
    const int h = heads[i - 1];
    if (!in_range(h)) {
      report.in_range = false;
      report.out_of_range.push_back(i);
    } else if (h == 0) {
      ++report.root_children;
    }
  }

  // The head function is a functional graph, so its cycles are disjoint.
  // state: 0 unvisited, 1 on the current walk, 2 finished.
  std::vector<int> state(n + 1, 0);
  for (int start = 1; start <= n; ++start) {
    if (state[start] != 0) continue;
    std::vector<int> walk;
    int node = start;
    while (node >= 1 && node <= n && state[node] == 0) {
      state[node] = 1;
      walk.push_back(node);
      node = heads[node - 1];
    }
    if (node >= 1 && node <= n && state[node] == 1) {
      auto first = std::find(walk.begin(), walk.end(), node);
      std::vector<int> cycle(first, walk.end());
      std::sort(cycle.begin(), cycle.end());
      report.cycles.push_back(std::move(cycle));
    }
    for (int v : walk) state[v] = 2;
  }
  std::sort(report.cycles.begin(), report.cycles.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  report.acyclic = report.cycles.empty();
  return report;
}

namespace {

void require_valid(const DepTree& tree) {
  if (tree.deprels.size() != tree.heads.size())
    throw DataError("tree has " + std::to_string(tree.heads.size()) + " heads but " +
                    std::to_string(tree.deprels.size()) + " deprels");
  if (tree.heads.empty()) throw DataError("tree has no tokens");
  if (!validate(tree.heads).valid()) throw DataError("not a valid dependency tree");
}

}  // namespace

bool is_projective(const DepTree& tree) {
  require_valid(tree);
  // An arc is projective iff every token strictly inside its span has its
  // head inside the span too (so the arc's head dominates the span).
  // A tree is projective iff all of its arcs, root arcs included, are.
  const int n = tree.size();
  for (int d = 1; d <= n; ++d) {
    const int lo = std::min(d, tree.head(d));
    const int hi = std::max(d, tree.head(d));
    for (int k = lo + 1; k < hi; ++k) {
      const int h = tree.head(k);
      if (h < lo || h > hi) return false;
    }
  }
  return true;
}

std::optional<std::pair<Arc, Arc>> find_crossing_arcs(const DepTree& tree) {
  const int n = tree.size();
  for (int a = 1; a <= n; ++a) {
    const int a_lo = std::min(a, tree.head(a));
    const int a_hi = std::max(a, tree.head(a));
    for (int b = 1; b <= n; ++b) {
      const int b_lo = std::min(b, tree.head(b));
      const int b_hi = std::max(b, tree.head(b));
      if (a_lo < b_lo && b_lo < a_hi && a_hi < b_hi)
        return std::pair{Arc{tree.head(a), a}, Arc{tree.head(b), b}};
    }
  }
  return std::nullopt;
}

void enumerate_trees(int n, std::span<const std::string> labels,
                     const std::function<void(const DepTree&)>& visit) {
  if (n < 1 || n > kMaxEnumerationSize)
    throw DataError("tree enumeration supports 1 to " +
                    std::to_string(kMaxEnumerationSize) + " tokens, got " +
                    std::to_string(n));
  if (labels.empty()) throw DataError("tree enumeration needs at least one deprel");

  // Odometer over heads[i] in {0..n} \ {i}.
  std::vector<int> heads(n, 0);
  auto skip_self = [&](int i) {
    if (heads[i] == i + 1) ++heads[i];
  };
  for (int i = 0; i < n; ++i) skip_self(i);

  const int label_count = static_cast<int>(labels.size());
  DepTree tree;
  tree.deprels.assign(n, labels.front());
  std::vector<int> label_index(n, 0);

  for (;;) {
    if (validate(heads).valid()) {
      tree.heads = heads;
      std::fill(label_index.begin(), label_index.end(), 0);
      for (;;) {
        for (int i = 0; i < n; ++i) tree.deprels[i] = labels[label_index[i]];
        visit(tree);
        int pos = n - 1;
        while (pos >= 0 && ++label_index[pos] == label_count) label_index[pos--] = 0;
        if (pos < 0) break;
      }
    }
    int pos = n - 1;
    for (; pos >= 0; --pos) {
      ++heads[pos];
      skip_self(pos);
      if (heads[pos] <= n) break;
      heads[pos] = 0;
      skip_self(pos);
    }
    if (pos < 0) break;
  }
}

std::vector<DepTree> all_trees(int n, std::span<const std::string> labels) {
  std::vector<DepTree> trees;
  enumerate_trees(n, labels, [&](const DepTree& t) { trees.push_back(t); });
  return trees;
}

}  // namespace deplabel
