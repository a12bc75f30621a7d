#include "deplabel/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "deplabel/conllu.hpp"
#include "deplabel/decoding.hpp"
#include "deplabel/encoding.hpp"
#include "deplabel/error.hpp"
#include "deplabel/eval.hpp"
#include "deplabel/label_file.hpp"
#include "deplabel/tagger.hpp"

namespace deplabel {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string encoding;
  std::string pos_source;
  std::vector<std::string> inputs;
  std::string output;
  int k = kRootSearchDepth;
  bool single_root = false;
  bool exclude_punct = false;
  std::string punct_tags;
  std::uint64_t seed = 1;
  int epochs = 10;
};

std::optional<Encoding> chosen_encoding(const RunConfig& config, bool required) {
  if (config.encoding.empty()) {
    if (required) throw UsageError("--encoding is required");
    return std::nullopt;
  }
  try {
    return parse_encoding(config.encoding);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

// --pos-source is required with the PoS-based encoding and rejected otherwise.
std::optional<PosSource> chosen_pos_source(const RunConfig& config, std::optional<Encoding> encoding) {
  if (config.pos_source.empty()) {
    if (encoding == Encoding::pos) throw UsageError("--pos-source is required with --encoding pos");
    return std::nullopt;
  }
  if (encoding && encoding != Encoding::pos)
    throw UsageError("--pos-source only applies to --encoding pos");
  try {
    return parse_pos_source(config.pos_source);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

ScoringOptions scoring_options(const RunConfig& config) {
  ScoringOptions options;
  options.exclude_punct = config.exclude_punct;
  if (!config.punct_tags.empty()) {
    options.punct_tags.clear();
    std::stringstream list(config.punct_tags);
    std::string tag;
    while (std::getline(list, tag, ','))
      if (!tag.empty()) options.punct_tags.insert(tag);
  }
  return options;
}

// Writes to --output when given, otherwise to stdout.
template <typename Writer>
void emit(const RunConfig& config, std::ostream& out, Writer&& write) {
  if (config.output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(config.output, std::ios::binary);
  if (!file) throw DataError(config.output + ": cannot open for writing");
  write(file);
  if (!file) throw DataError(config.output + ": write failed");
}

void print_scores(std::ostream& out, const EvalResult& result) {
  out << "UAS " << format_percent(result.head_correct, result.tokens_scored) << '\n'
      << "LAS " << format_percent(result.label_correct, result.tokens_scored) << '\n'
      << "scored " << result.tokens_scored << " excluded " << result.excluded << '\n';
}

void report_repairs(std::ostream& err, std::size_t sentence, const RepairReport& report) {
  if (!report.empty()) err << "sentence " << sentence << ": " << report.summary() << '\n';
}

int run_encode(const RunConfig& config, std::ostream& out) {
  const auto encoding = chosen_encoding(config, true);
  const auto pos_source = chosen_pos_source(config, encoding);
  const auto sentences = read_conllu_file(config.inputs.at(0));
  const LabelTable table = encode_treebank(sentences, *encoding, pos_source);
  emit(config, out, [&](std::ostream& o) { write_labels(o, table); });
  return kExitOk;
}

int run_decode(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto encoding = chosen_encoding(config, true);
  const auto pos_source = chosen_pos_source(config, encoding);
  if (config.k < 1) throw UsageError("--k must be at least 1");
  const std::string& path = config.inputs.at(0);
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  LabelTable table;
  try {
    table = read_labels(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
  if (table.encoding != *encoding)
    throw DataError(path + ": file holds " + std::string(to_string(table.encoding)) +
                    " labels, --encoding says " + std::string(to_string(*encoding)));
  if (pos_source && table.pos_source && *pos_source != *table.pos_source)
    throw DataError(path + ": file was encoded with " + std::string(to_string(*table.pos_source)) +
                    " tags, --pos-source says " + std::string(to_string(*pos_source)));
  const PosSource source = pos_source.value_or(table.pos_source.value_or(PosSource::upos));

  std::vector<Sentence> decoded;
  decoded.reserve(table.sentences.size());
  for (std::size_t s = 0; s < table.sentences.size(); ++s) {
    const LabeledSentence& labeled = table.sentences[s];
    std::vector<std::string> pos;
    if (*encoding == Encoding::pos) pos = labeled.pos_tags(source);
    RepairResult result;
    try {
      if (labeled.has_scores()) {
        KBestLabels kbest = labeled.kbest();
        for (auto& token : kbest.tokens)
          if (static_cast<int>(token.size()) > config.k) token.resize(config.k);
        result = decode(*encoding, kbest, pos, config.single_root);
      } else {
        result = decode(*encoding, labeled.best_labels(), pos, config.single_root);
      }
    } catch (const DataError& e) {
      throw DataError(path + ": sentence " + std::to_string(s + 1) + ": " + e.what());
    }
    report_repairs(err, s + 1, result.report);
    Sentence sentence = skeleton_sentence(labeled);
    apply_tree(sentence, result.tree);
    decoded.push_back(std::move(sentence));
  }
  emit(config, out, [&](std::ostream& o) { write_conllu(o, decoded); });
  return kExitOk;
}

int run_train(const RunConfig& config, std::ostream& err) {
  const auto encoding = chosen_encoding(config, true);
  const auto pos_source = chosen_pos_source(config, encoding);
  if (config.output.empty()) throw UsageError("train needs --output for the model file");
  if (config.epochs < 0) throw UsageError("--epochs must be non-negative");
  const auto sentences = read_conllu_file(config.inputs.at(0));

  TrainOptions options;
  options.encoding = *encoding;
  options.pos_source = pos_source.value_or(PosSource::upos);
  options.epochs = config.epochs;
  options.seed = config.seed;
  const TrainResult result = train(sentences, options);
  if (result.skipped_sentences > 0)
    err << "warning: skipped " << result.skipped_sentences
        << " sentence(s) the encoding cannot represent\n";
  for (const auto& epoch : result.epochs) {
    err << "epoch " << epoch.epoch << " train accuracy " << std::fixed << std::setprecision(4)
        << epoch.train_accuracy;
    if (epoch.heldout_accuracy) err << " held-out accuracy " << *epoch.heldout_accuracy;
    err << '\n' << std::defaultfloat;
  }
  emit(config, err, [&](std::ostream& o) { result.model.save(o); });
  return kExitOk;
}

int run_parse(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto encoding = chosen_encoding(config, true);
  const auto pos_source = chosen_pos_source(config, encoding);
  if (config.k < 1) throw UsageError("--k must be at least 1");
  const std::string& model_path = config.inputs.at(0);
  std::ifstream model_in(model_path);
  if (!model_in) throw DataError(model_path + ": cannot open file");
  PerceptronModel model;
  try {
    model = PerceptronModel::load(model_in);
  } catch (const DataError& e) {
    throw DataError(model_path + ": " + e.what());
  }
  if (model.encoding() != *encoding)
    throw DataError(model_path + ": model predicts " + std::string(to_string(model.encoding())) +
                    " labels, --encoding says " + std::string(to_string(*encoding)));
  if (pos_source && *pos_source != model.pos_source())
    throw DataError(model_path + ": model was trained on " +
                    std::string(to_string(model.pos_source())) + " tags, --pos-source says " +
                    std::string(to_string(*pos_source)));

  const auto sentences = read_conllu_file(config.inputs.at(1));
  const auto results = parse(model, sentences, config.single_root, config.k);
  std::vector<Sentence> parsed;
  parsed.reserve(results.size());
  for (std::size_t s = 0; s < results.size(); ++s) {
    report_repairs(err, s + 1, results[s].report);
    parsed.push_back(results[s].sentence);
  }
  emit(config, out, [&](std::ostream& o) { write_conllu(o, parsed); });
  return kExitOk;
}

int run_eval(const RunConfig& config, std::ostream& out) {
  const auto gold = read_conllu_file(config.inputs.at(0));
  const auto pred = read_conllu_file(config.inputs.at(1));
  const EvalResult result = attachment_scores(gold, pred, scoring_options(config));
  emit(config, out, [&](std::ostream& o) { print_scores(o, result); });
  return kExitOk;
}

int run_oracle(const RunConfig& config, std::ostream& out) {
  const auto encoding = chosen_encoding(config, true);
  const auto pos_source = chosen_pos_source(config, encoding);
  const auto sentences = read_conllu_file(config.inputs.at(0));
  const EvalResult result = oracle_roundtrip(sentences, *encoding, pos_source.value_or(PosSource::upos),
                                             scoring_options(config));
  emit(config, out, [&](std::ostream& o) { print_scores(o, result); });
  return kExitOk;
}

int run_stats(const RunConfig& config, std::ostream& out) {
  const auto encoding = chosen_encoding(config, false);
  const auto pos_source = chosen_pos_source(config, encoding).value_or(PosSource::upos);
  const auto sentences = read_conllu_file(config.inputs.at(0));

  std::vector<TaggedTree> treebank;
  treebank.reserve(sentences.size());
  std::size_t tokens = 0, projective = 0;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    try {
      TaggedTree item{tree_of(sentences[s]), pos_tags(sentences[s], pos_source)};
      tokens += item.tree.heads.size();
      projective += is_projective(item.tree);
      treebank.push_back(std::move(item));
    } catch (const DataError& e) {
      throw DataError(config.inputs.at(0) + ": sentence " + std::to_string(s + 1) + ": " + e.what());
    }
  }

  std::vector<Encoding> encodings;
  if (encoding) encodings.push_back(*encoding);
  else encodings.assign(std::begin(kAllEncodings), std::end(kAllEncodings));

  emit(config, out, [&](std::ostream& o) {
    o << "sentences " << sentences.size() << "\ntokens " << tokens << "\nprojective "
      << projective << " (" << format_percent(static_cast<int>(projective), static_cast<int>(sentences.size()))
      << "%)\n";
    for (Encoding e : encodings) {
      const LabelInventory inventory = label_inventory(treebank, e);
      o << "\nencoding " << to_string(e);
      if (e == Encoding::pos) o << " (" << to_string(pos_source) << ")";
      o << "\ndistinct labels " << inventory.distinct_labels << "\ndistinct heads "
        << inventory.distinct_heads << "\nskipped sentences " << inventory.skipped_sentences
        << "\ntop labels\n";
      for (const auto& [key, count] : inventory.top(20)) o << count << '\t' << key << '\n';
    }
  });
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dependency parsing as sequence labeling: encode, decode, train, parse, evaluate"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_encoding = [&](CLI::App* sub) {
    sub->add_option("--encoding", config.encoding, "naive, relpos, pos or bracket")
        ->check(CLI::IsMember({"naive", "relpos", "pos", "bracket"}));
    sub->add_option("--pos-source", config.pos_source, "PoS column for the pos encoding")
        ->check(CLI::IsMember({"upos", "xpos"}));
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", config.output, "Output path (default: stdout)");
  };
  auto add_punct = [&](CLI::App* sub) {
    auto* flag = sub->add_flag("--exclude-punct", config.exclude_punct, "Do not score punctuation");
    sub->add_option("--punct-tags", config.punct_tags, "Comma-separated punctuation tags")->needs(flag);
  };

  auto* encode_cmd = app.add_subcommand("encode", "CoNLL-U -> labeled-token file");
  encode_cmd->add_option("input", config.inputs, "CoNLL-U treebank")->required()->expected(1);
  add_encoding(encode_cmd);
  add_output(encode_cmd);

  auto* decode_cmd = app.add_subcommand("decode", "labeled-token or k-best file -> CoNLL-U");
  decode_cmd->add_option("input", config.inputs, "Labeled-token file")->required()->expected(1);
  add_encoding(decode_cmd);
  add_output(decode_cmd);
  decode_cmd->add_option("--k", config.k, "Candidates per token used from k-best files");
  decode_cmd->add_flag("--single-root", config.single_root, "Keep exactly one root");

  auto* train_cmd = app.add_subcommand("train", "Train the perceptron tagger");
  train_cmd->add_option("input", config.inputs, "CoNLL-U training treebank")->required()->expected(1);
  add_encoding(train_cmd);
  add_output(train_cmd);
  train_cmd->add_option("--epochs", config.epochs, "Training epochs (default 10)");
  train_cmd->add_option("--seed", config.seed, "Shuffling seed (default 1)");

  auto* parse_cmd = app.add_subcommand("parse", "Parse CoNLL-U input with a trained model");
  parse_cmd->add_option("inputs", config.inputs, "MODEL INPUT.conllu")->required()->expected(2);
  add_encoding(parse_cmd);
  add_output(parse_cmd);
  parse_cmd->add_option("--k", config.k, "Candidates per token for root search (default 3)");
  parse_cmd->add_flag("--single-root", config.single_root, "Keep exactly one root");

  auto* eval_cmd = app.add_subcommand("eval", "Attachment scores of a prediction");
  eval_cmd->add_option("inputs", config.inputs, "GOLD.conllu PRED.conllu")->required()->expected(2);
  add_punct(eval_cmd);
  add_output(eval_cmd);

  auto* oracle_cmd = app.add_subcommand("oracle", "Encode-decode round-trip scores");
  oracle_cmd->add_option("input", config.inputs, "CoNLL-U treebank")->required()->expected(1);
  add_encoding(oracle_cmd);
  add_punct(oracle_cmd);
  add_output(oracle_cmd);

  auto* stats_cmd = app.add_subcommand("stats", "Label inventory and projectivity report");
  stats_cmd->add_option("input", config.inputs, "CoNLL-U treebank")->required()->expected(1);
  add_encoding(stats_cmd);
  add_output(stats_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (encode_cmd->parsed()) return run_encode(config, out);
    if (decode_cmd->parsed()) return run_decode(config, out, err);
    if (train_cmd->parsed()) return run_train(config, err);
    if (parse_cmd->parsed()) return run_parse(config, out, err);
    if (eval_cmd->parsed()) return run_eval(config, out);
    if (oracle_cmd->parsed()) return run_oracle(config, out);
    if (stats_cmd->parsed()) return run_stats(config, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsageError;
}

}  // namespace deplabel
