#include "deplabel/tagger.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include <json.hpp>

#include "deplabel/error.hpp"

namespace deplabel {

namespace {

constexpr std::string_view kModelFormat = "deplabel-perceptron";

std::string lowercase_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// Byte offsets of UTF-8 code point starts.
std::vector<std::size_t> code_points(std::string_view text) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < text.size(); ++i)
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) starts.push_back(i);
  return starts;
}

std::string prefix(std::string_view text, std::size_t chars) {
  const auto starts = code_points(text);
  if (starts.size() <= chars) return std::string(text);
  return std::string(text.substr(0, starts[chars]));
}

std::string suffix(std::string_view text, std::size_t chars) {
  const auto starts = code_points(text);
  if (starts.size() <= chars) return std::string(text);
  return std::string(text.substr(starts[starts.size() - chars]));
}

bool is_predicate(const Token& t) { return t.upos == "VERB" || t.upos == "AUX"; }

}  // namespace

std::vector<std::string> extract_features(const Sentence& sentence, int index) {
  const int n = sentence.size();
  auto form = [&](int j) -> std::string {
    if (j < 0) return "<s>";
    if (j >= n) return "</s>";
    return lowercase_ascii(sentence.tokens[j].form);
  };
  auto upos = [&](int j) -> std::string {
    if (j < 0) return "<s>";
    if (j >= n) return "</s>";
    return sentence.tokens[j].upos;
  };
  auto xpos = [&](int j) -> std::string {
    if (j < 0) return "<s>";
    if (j >= n) return "</s>";
    return sentence.tokens[j].xpos;
  };

  const int i = index;
  const std::string w0 = form(i);
  const std::string p0 = upos(i);
  std::vector<std::string> f;
  f.reserve(40);
  f.emplace_back("b");
  f.push_back("w0=" + w0);
  f.push_back("w-1=" + form(i - 1));
  f.push_back("w+1=" + form(i + 1));
  f.push_back("w-2=" + form(i - 2));
  f.push_back("w+2=" + form(i + 2));
  f.push_back("p0=" + p0);
  f.push_back("p-1=" + upos(i - 1));
  f.push_back("p+1=" + upos(i + 1));
  f.push_back("p-2=" + upos(i - 2));
  f.push_back("p+2=" + upos(i + 2));
  f.push_back("x0=" + xpos(i));
  f.push_back("x-1=" + xpos(i - 1));
  f.push_back("x+1=" + xpos(i + 1));
  f.push_back("p-1p0=" + upos(i - 1) + "|" + p0);
  f.push_back("p0p+1=" + p0 + "|" + upos(i + 1));
  f.push_back("p-1p0p+1=" + upos(i - 1) + "|" + p0 + "|" + upos(i + 1));
  f.push_back("p-2p-1p0=" + upos(i - 2) + "|" + upos(i - 1) + "|" + p0);
  f.push_back("p0p+1p+2=" + p0 + "|" + upos(i + 1) + "|" + upos(i + 2));
  f.push_back("w0p0=" + w0 + "|" + p0);
  f.push_back("w-1p0=" + form(i - 1) + "|" + p0);
  f.push_back("p0w+1=" + p0 + "|" + form(i + 1));
  f.push_back("pre3=" + prefix(w0, 3));
  f.push_back("suf3=" + suffix(w0, 3));
  f.push_back("suf2p0=" + suffix(w0, 2) + "|" + p0);

  // Position relative to the sentence edges.
  const int from_start = std::min(i, 5);
  const int to_end = std::min(n - 1 - i, 5);
  f.push_back("i=" + std::to_string(from_start));
  f.push_back("ni=" + std::to_string(to_end));
  f.push_back("i,ni,p0=" + std::to_string(from_start) + "," + std::to_string(to_end) + "|" + p0);
  f.push_back("abs=" + std::to_string(i + 1));

  // Distance to the nearest verb or auxiliary on each side, capped at 6.
  int left = 0, right = 0;
  for (int j = i - 1; j >= 0; --j)
    if (is_predicate(sentence.tokens[j])) {
      left = std::min(i - j, 6);
      break;
    }
  for (int j = i + 1; j < n; ++j)
    if (is_predicate(sentence.tokens[j])) {
      right = std::min(j - i, 6);
      break;
    }
  f.push_back("vl=" + std::to_string(left) + "|" + p0);
  f.push_back("vr=" + std::to_string(right) + "|" + p0);
  f.push_back("vlr=" + std::to_string(left) + "," + std::to_string(right));
  return f;
}

std::vector<double> PerceptronModel::score(const std::vector<std::string>& features) const {
  std::vector<double> scores(labels_.size(), 0.0);
  for (const auto& feature : features) {
    const auto it = weights_.find(feature);
    if (it == weights_.end()) continue;
    for (const auto& [label, weight] : it->second) scores[label] += weight;
  }
  return scores;
}

KBestLabels PerceptronModel::predict(const Sentence& sentence, int k) const {
  if (k < 1) throw DataError("k must be at least 1, got " + std::to_string(k));
  if (labels_.empty()) throw DataError("model has an empty label vocabulary");

  KBestLabels out;
  out.tokens.reserve(sentence.tokens.size());
  std::vector<int> order(labels_.size());
  const std::size_t keep = std::min<std::size_t>(k, labels_.size());
  for (int i = 0; i < sentence.size(); ++i) {
    const auto scores = score(extract_features(sentence, i));
    std::iota(order.begin(), order.end(), 0);
    // Label indices follow training frequency, so ties favour common labels.
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](int a, int b) {
      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    });
    auto& token = out.tokens.emplace_back();
    token.reserve(keep);
    for (std::size_t r = 0; r < keep; ++r)
      token.push_back({parse_label_key(encoding_, labels_[order[r]]), scores[order[r]]});
  }
  return out;
}

void PerceptronModel::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["feature_templates"] = kFeatureTemplateVersion;
  j["encoding"] = to_string(encoding_);
  j["pos_source"] = to_string(pos_source_);
  j["epochs"] = epochs_;
  j["seed"] = seed_;
  j["labels"] = labels_;
  j["label_counts"] = label_counts_;
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& [feature, entries] : weights_) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& [label, weight] : entries) row.push_back({label, weight});
    weights[feature] = std::move(row);
  }
  j["weights"] = std::move(weights);
  out << j.dump() << '\n';
}

PerceptronModel PerceptronModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormat)
      throw DataError("not a deplabel model file");
    const int version = j.at("version").get<int>();
    if (version != kModelVersion)
      throw DataError("model file version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kModelVersion) + ")");
    const int templates = j.at("feature_templates").get<int>();
    if (templates != kFeatureTemplateVersion)
      throw DataError("model uses feature templates v" + std::to_string(templates) +
                      ", this build has v" + std::to_string(kFeatureTemplateVersion));

    PerceptronModel model;
    model.encoding_ = parse_encoding(j.at("encoding").get<std::string>());
    model.pos_source_ = parse_pos_source(j.at("pos_source").get<std::string>());
    model.epochs_ = j.at("epochs").get<int>();
    model.seed_ = j.at("seed").get<std::uint64_t>();
    model.labels_ = j.at("labels").get<std::vector<std::string>>();
    model.label_counts_ = j.at("label_counts").get<std::vector<std::uint64_t>>();
    if (model.label_counts_.size() != model.labels_.size())
      throw DataError("label counts do not match the label vocabulary");
    for (const auto& label : model.labels_) parse_label_key(model.encoding_, label);
    const int label_count = static_cast<int>(model.labels_.size());
    for (const auto& [feature, row] : j.at("weights").items()) {
      auto& entries = model.weights_[feature];
      for (const auto& entry : row) {
        const int label = entry.at(0).get<int>();
        if (label < 0 || label >= label_count) throw DataError("weight refers to unknown label");
        entries.emplace_back(label, entry.at(1).get<double>());
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

// Holds the averaging state while a model is being trained.
class PerceptronTrainer {
 public:
  PerceptronTrainer(std::vector<std::string> labels, std::vector<std::uint64_t> counts)
      : labels_(std::move(labels)), counts_(std::move(counts)) {}

  int predict(const std::vector<int>& features) const {
    std::vector<double> scores(labels_.size(), 0.0);
    for (int f : features)
      for (const auto& [label, param] : params_[f]) scores[label] += param.weight;
    int best = 0;
    for (int l = 1; l < static_cast<int>(scores.size()); ++l)
      if (scores[l] > scores[best]) best = l;
    return best;
  }

  std::vector<int> intern(const std::vector<std::string>& features) {
    std::vector<int> ids;
    ids.reserve(features.size());
    for (const auto& f : features) {
      auto [it, inserted] = feature_ids_.try_emplace(f, static_cast<int>(names_.size()));
      if (inserted) {
        names_.push_back(f);
        params_.emplace_back();
      }
      ids.push_back(it->second);
    }
    return ids;
  }

  std::vector<int> lookup(const std::vector<std::string>& features) const {
    std::vector<int> ids;
    for (const auto& f : features)
      if (auto it = feature_ids_.find(f); it != feature_ids_.end()) ids.push_back(it->second);
    return ids;
  }

  void tick() { ++clock_; }

  void update(const std::vector<int>& features, int gold, int guess) {
    for (int f : features) {
      bump(f, gold, 1.0);
      bump(f, guess, -1.0);
    }
  }

  PerceptronModel averaged(const TrainOptions& options) const {
    PerceptronModel model;
    model.encoding_ = options.encoding;
    model.pos_source_ = options.pos_source;
    model.epochs_ = options.epochs;
    model.seed_ = options.seed;
    model.labels_ = labels_;
    model.label_counts_ = counts_;
    if (clock_ == 0) return model;
    for (std::size_t f = 0; f < params_.size(); ++f) {
      std::vector<std::pair<int, double>> entries;
      for (const auto& [label, param] : params_[f]) {
        const double total = param.total + param.weight * static_cast<double>(clock_ - param.stamp);
        const double avg = total / static_cast<double>(clock_);
        if (avg != 0.0) entries.emplace_back(label, avg);
      }
      if (entries.empty()) continue;
      std::sort(entries.begin(), entries.end());
      model.weights_.emplace(names_[f], std::move(entries));
    }
    return model;
  }

 private:
  struct Param {
    double weight = 0.0;
    double total = 0.0;  // sum of weight over all ticks up to `stamp`
    long long stamp = 0;
  };

  void bump(int feature, int label, double delta) {
    auto& row = params_[feature];
    auto it = std::find_if(row.begin(), row.end(), [label](const auto& e) { return e.first == label; });
    if (it == row.end()) {
      row.emplace_back(label, Param{0.0, 0.0, clock_});
      it = row.end() - 1;
    }
    Param& p = it->second;
    p.total += p.weight * static_cast<double>(clock_ - p.stamp);
    p.stamp = clock_;
    p.weight += delta;
  }

  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, int> feature_ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::pair<int, Param>>> params_;
  long long clock_ = 0;
};

namespace {

struct Example {
  std::vector<std::string> features;
  std::string label;
};

}  // namespace

TrainResult train(std::span<const Sentence> treebank, const TrainOptions& options) {
  if (options.epochs < 0) throw DataError("epochs must be non-negative");

  // Encode every sentence; the bracket encoding skips non-projective trees.
  std::vector<std::vector<Example>> sentences;
  TrainResult result;
  for (std::size_t s = 0; s < treebank.size(); ++s) {
    const Sentence& sentence = treebank[s];
    std::vector<EncodedLabel> labels;
    try {
      const DepTree tree = tree_of(sentence);
      std::vector<std::string> pos;
      if (options.encoding == Encoding::pos) pos = pos_tags(sentence, options.pos_source);
      labels = encode(options.encoding, tree, pos);
    } catch (const EncodeError&) {
      ++result.skipped_sentences;
      continue;
    } catch (const DataError& e) {
      throw DataError("training sentence " + std::to_string(s + 1) + ": " + e.what());
    }
    auto& examples = sentences.emplace_back();
    for (int i = 0; i < sentence.size(); ++i)
      examples.push_back({extract_features(sentence, i), label_key(labels[i])});
  }
  if (sentences.empty()) throw DataError("no encodable training sentences");

  std::size_t heldout = 0;
  if (sentences.size() >= 10 && options.heldout_fraction > 0.0)
    heldout = std::max<std::size_t>(1, static_cast<std::size_t>(sentences.size() * options.heldout_fraction));
  const std::size_t train_count = sentences.size() - heldout;

  // Label vocabulary over the training part, most frequent first.
  std::map<std::string, std::uint64_t> frequency;
  for (std::size_t s = 0; s < train_count; ++s)
    for (const auto& ex : sentences[s]) ++frequency[ex.label];
  std::vector<std::pair<std::string, std::uint64_t>> ranked(frequency.begin(), frequency.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> labels;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, int> label_ids;
  for (const auto& [label, count] : ranked) {
    label_ids.emplace(label, static_cast<int>(labels.size()));
    labels.push_back(label);
    counts.push_back(count);
  }

  PerceptronTrainer trainer(labels, counts);
  std::vector<std::vector<std::pair<std::vector<int>, int>>> train_set(train_count);
  for (std::size_t s = 0; s < train_count; ++s)
    for (const auto& ex : sentences[s])
      train_set[s].emplace_back(trainer.intern(ex.features), label_ids.at(ex.label));

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(train_count);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    std::size_t correct = 0, total = 0;
    for (std::size_t s : order) {
      for (const auto& [features, gold] : train_set[s]) {
        trainer.tick();
        const int guess = trainer.predict(features);
        if (guess != gold) trainer.update(features, gold, guess);
        correct += guess == gold;
        ++total;
      }
    }
    EpochReport report;
    report.epoch = epoch;
    report.train_accuracy = total ? static_cast<double>(correct) / total : 0.0;
    if (heldout > 0) {
      const PerceptronModel snapshot = trainer.averaged(options);
      std::size_t hits = 0, seen = 0;
      for (std::size_t s = train_count; s < sentences.size(); ++s) {
        for (const auto& ex : sentences[s]) {
          const auto scores = snapshot.score(ex.features);
          int best = 0;
          for (int l = 1; l < static_cast<int>(scores.size()); ++l)
            if (scores[l] > scores[best]) best = l;
          hits += labels[best] == ex.label;
          ++seen;
        }
      }
      report.heldout_accuracy = seen ? static_cast<double>(hits) / seen : 0.0;
    }
    result.epochs.push_back(report);
  }

  result.model = trainer.averaged(options);
  return result;
}

std::vector<ParseResult> parse(const PerceptronModel& model, std::span<const Sentence> sentences,
                               bool single_root, int k) {
  std::vector<ParseResult> results;
  results.reserve(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const Sentence& sentence = sentences[s];
    std::vector<std::string> pos;
    if (model.encoding() == Encoding::pos) {
      pos = pos_tags(sentence, model.pos_source());
      const bool untagged = std::all_of(pos.begin(), pos.end(), [](const auto& t) { return t == "_"; });
      if (untagged)
        throw DataError("sentence " + std::to_string(s + 1) + ": the model needs " +
                        std::string(to_string(model.pos_source())) + " tags, input has none");
    }
    try {
      const KBestLabels kbest = model.predict(sentence, k);
      RepairResult decoded = decode(model.encoding(), kbest, pos, single_root);
      ParseResult& out = results.emplace_back();
      out.sentence = sentence;
      apply_tree(out.sentence, decoded.tree);
      out.report = std::move(decoded.report);
    } catch (const DataError& e) {
      throw DataError("sentence " + std::to_string(s + 1) + ": " + e.what());
    }
  }
  return results;
}

}  // namespace deplabel
