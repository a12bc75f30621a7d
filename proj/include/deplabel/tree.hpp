#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace deplabel {

/// A rooted dependency tree over tokens 1..n. Node 0 is the dummy root.
/// heads[i - 1] and deprels[i - 1] describe token i.
struct DepTree {
  std::vector<int> heads;
  std::vector<std::string> deprels;

  int size() const { return static_cast<int>(heads.size()); }
  int head(int token) const { return heads[token - 1]; }
  const std::string& deprel(int token) const { return deprels[token - 1]; }

  friend bool operator==(const DepTree&, const DepTree&) = default;
};

struct ValidityReport {
  bool in_range = true;
  bool acyclic = true;
  int root_children = 0;
  std::vector<int> out_of_range;  // tokens whose head is outside [0, n]
  // Each cycle lists its tokens in increasing order; cycles are sorted by
  // their smallest token.
  std::vector<std::vector<int>> cycles;

  bool valid() const { return in_range && acyclic && root_children >= 1; }
};

/// Checks a candidate head assignment (heads[i - 1] is the head of token i).
ValidityReport validate(std::span<const int> heads);

/// An arc written as (head, dependent).
using Arc = std::pair<int, int>;

/// True iff no two arcs cross, counting the arcs from node 0.
/// Throws DataError when the tree is not valid.
bool is_projective(const DepTree& tree);

/// Some pair of crossing arcs, or nullopt for a projective tree.
std::optional<std::pair<Arc, Arc>> find_crossing_arcs(const DepTree& tree);

inline constexpr int kMaxEnumerationSize = 7;

/// Visits every valid tree over n tokens crossed with every assignment of
/// deprels from `labels`, each exactly once. Throws DataError for n outside
/// [1, kMaxEnumerationSize] or an empty label alphabet.
void enumerate_trees(int n, std::span<const std::string> labels,
                     const std::function<void(const DepTree&)>& visit);

std::vector<DepTree> all_trees(int n, std::span<const std::string> labels);

}  // namespace deplabel
