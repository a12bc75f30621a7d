#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deplabel/encoding.hpp"
#include "deplabel/tree.hpp"

namespace deplabel {

enum class Anomaly { out_of_range, unmatched_bracket, no_head };

std::string_view to_string(Anomaly anomaly);

/// Head assignment read straight off a label sequence, before repair.
/// Out-of-range heads keep their decoded value; heads that cannot be
/// computed at all are nullopt.
struct RawParse {
  std::vector<std::optional<int>> heads;
  std::vector<std::string> deprels;
  std::vector<std::pair<int, Anomaly>> anomalies;  // (token, kind)

  int size() const { return static_cast<int>(heads.size()); }
  bool has_anomaly(int token, Anomaly kind) const;
};

struct ScoredLabel {
  EncodedLabel label;
  double score = 0.0;
};

/// Per token, candidate labels best first. Scores are non-increasing.
struct KBestLabels {
  std::vector<std::vector<ScoredLabel>> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  std::vector<EncodedLabel> best() const;
};

enum class RootSource { decoded, kbest_search, first_token, multi_root_collapse };

std::string_view to_string(RootSource source);

struct BrokenCycle {
  std::vector<int> cycle;
  int detached = 0;
};

struct RepairReport {
  bool root_imputed = false;
  RootSource root_source = RootSource::decoded;
  std::vector<int> reattached_out_of_range;  // out-of-range and unmatched
  std::vector<int> collapsed_roots;          // extra roots moved under the kept one
  std::vector<BrokenCycle> broken_cycles;

  bool empty() const {
    return !root_imputed && reattached_out_of_range.empty() &&
           collapsed_roots.empty() && broken_cycles.empty();
  }
  /// One-line human-readable description of the actions taken.
  std::string summary() const;
};

struct RepairResult {
  DepTree tree;
  RepairReport report;
};

/// Number of candidates consulted per token by the root search.
inline constexpr int kRootSearchDepth = 3;

/// `pos` (one tag per token) is required for the PoS-based encoding and
/// ignored otherwise. Throws DataError if it is missing or if a label does
/// not belong to `encoding`.
RawParse decode_raw(Encoding encoding, std::span<const EncodedLabel> labels,
                    std::span<const std::string> pos = {});

/// Turns a raw parse into a valid tree. Steps, in order: reattach
/// out-of-range and unmatched tokens to the root token, make sure a root
/// exists (k-best search, then the first token), optionally collapse
/// multiple roots, then break cycles at their leftmost token. Headless
/// tokens of a bracket parse are root children and need no repair.
RepairResult repair(const RawParse& raw, Encoding encoding,
                    const KBestLabels* kbest, bool single_root,
                    std::span<const std::string> pos = {});

RepairResult decode(Encoding encoding, std::span<const EncodedLabel> labels,
                    std::span<const std::string> pos = {},
                    bool single_root = false);
RepairResult decode(Encoding encoding, const KBestLabels& kbest,
                    std::span<const std::string> pos = {},
                    bool single_root = false);

}  // namespace deplabel
