#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "deplabel/conllu.hpp"
#include "deplabel/decoding.hpp"
#include "deplabel/encoding.hpp"

namespace deplabel {

/// Bumped whenever the feature templates or the model file layout change.
inline constexpr int kModelVersion = 1;
inline constexpr int kFeatureTemplateVersion = 1;

/// Sparse binary features of token `index` (0-based) over a +-2 window.
std::vector<std::string> extract_features(const Sentence& sentence, int index);

struct TrainOptions {
  Encoding encoding = Encoding::relpos;
  PosSource pos_source = PosSource::upos;
  int epochs = 10;
  std::uint64_t seed = 1;
  // Share of sentences held out for per-epoch accuracy reports. Nothing is
  // held out from treebanks of fewer than 10 sentences.
  double heldout_fraction = 0.1;
};

struct EpochReport {
  int epoch = 0;
  double train_accuracy = 0.0;
  std::optional<double> heldout_accuracy;
};

/// Averaged multiclass perceptron over encoded labels. Holds only the
/// averaged weights; training state lives in train().
class PerceptronModel {
 public:
  Encoding encoding() const { return encoding_; }
  PosSource pos_source() const { return pos_source_; }
  int epochs() const { return epochs_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Top-k labels per token, best first. Ties go to the label seen more
  /// often in training, so an untrained model predicts the majority label.
  /// Throws DataError for k < 1.
  KBestLabels predict(const Sentence& sentence, int k = kRootSearchDepth) const;

  /// Raw margin of every label, indexed like labels().
  std::vector<double> score(const std::vector<std::string>& features) const;

  void save(std::ostream& out) const;
  /// Throws DataError on a malformed file or a version mismatch.
  static PerceptronModel load(std::istream& in);

  friend bool operator==(const PerceptronModel&, const PerceptronModel&) = default;

 private:
  friend class PerceptronTrainer;

  Encoding encoding_ = Encoding::relpos;
  PosSource pos_source_ = PosSource::upos;
  int epochs_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> label_counts_;
  // feature -> (label index, weight), sorted by label index
  std::unordered_map<std::string, std::vector<std::pair<int, double>>> weights_;
};

struct TrainResult {
  PerceptronModel model;
  std::vector<EpochReport> epochs;
  int skipped_sentences = 0;  // not encodable under the chosen encoding
};

/// Throws DataError if no sentence is encodable.
TrainResult train(std::span<const Sentence> treebank, const TrainOptions& options);

struct ParseResult {
  Sentence sentence;  // input with HEAD and DEPREL filled in
  RepairReport report;
};

/// Tags, decodes and repairs every sentence. Throws DataError if the input
/// lacks the PoS column the model's encoding needs.
std::vector<ParseResult> parse(const PerceptronModel& model,
                               std::span<const Sentence> sentences,
                               bool single_root = false, int k = kRootSearchDepth);

}  // namespace deplabel
