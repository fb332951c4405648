#include "unra/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "unra/embedding_table.hpp"
#include "unra/errors.hpp"
#include "unra/eval.hpp"
#include "unra/network.hpp"
#include "unra/query.hpp"
#include "unra/synth.hpp"
#include "unra/trainer.hpp"

namespace unra::cli {

namespace {

// TOML reader that files top-level keys under one subcommand.
class ScopedConfig : public CLI::ConfigTOML {
 public:
  explicit ScopedConfig(std::string scope) : scope_(std::move(scope)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    if (!scope_.empty()) {
      for (auto& item : items) {
        if (item.parents.empty()) item.parents.push_back(scope_);
      }
    }
    return items;
  }

 private:
  std::string scope_;
};

struct CorpusFlags {
  std::vector<std::string> edges;
  std::string docs;
  std::string links;
  std::string labels;

  void add_to(CLI::App& app, bool labels_required) {
    app.add_option("--edges", edges, "Edge file of a node source; repeat once per source, in source order")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--docs", docs, "Documents file (doc_index<TAB>words)")->required()->check(CLI::ExistingFile);
    app.add_option("--links", links, "Links file (doc_index<TAB>k:id...)")->required()->check(CLI::ExistingFile);
    auto* opt = app.add_option("--labels", labels, "Labels file (doc_index<TAB>label)")->check(CLI::ExistingFile);
    if (labels_required) opt->required();
  }

  NetworkPaths paths() const {
    NetworkPaths p;
    p.edges.assign(edges.begin(), edges.end());
    p.docs = docs;
    p.links = links;
    if (!labels.empty()) p.labels = labels;
    return p;
  }
};

struct TrainFlags {
  CorpusFlags corpus;
  TrainConfig config;
  std::string out;
  std::string text_out;
  std::string objective_log;
  std::string corpus_dump;
  std::string vocab_dump;
  bool no_structure = false;
  bool no_content = false;
  bool no_labels = false;
};

struct QueryFlags {
  std::string model;
  std::vector<std::string> inputs;
  std::size_t top_k = 10;
  std::vector<std::string> filter;
  bool include_inputs = false;
};

struct EvalFlags {
  CorpusFlags corpus;
  std::string model;
  EvalConfig config;
  std::string vectors = "first";
  std::string out;
};

struct SynthFlags {
  SynthConfig config;
  std::string out_dir;
};

const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
      double v = 0;
      if (!CLI::detail::lexical_cast(s, v)) return "not a number: " + s;
      if (!(v > 0.0 && v < 1.0)) return "value " + s + " not in (0, 1)";
      return {};
    },
    "FRACTION in (0,1)");

void setup_train(CLI::App& app, TrainFlags& f) {
  f.corpus.add_to(app, false);
  auto& c = f.config;
  app.add_option("--out", f.out, "Binary model output path")->required();
  app.add_option("--text-out", f.text_out, "Also export the model as text");
  app.add_option("--objective-log", f.objective_log, "Per-epoch objective log path (default: stdout)");
  app.add_option("--corpus-dump", f.corpus_dump, "Write the random-walk corpus to this path");
  app.add_option("--vocab-dump", f.vocab_dump, "Write vocabularies with Huffman codes to this path");
  app.add_option("--dim", c.dim, "Embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--window", c.window, "Context window size")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--iter", c.iterations, "Training epochs")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--alpha", c.alpha, "Structure weight; content and labels get 1-alpha")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--lr", c.initial_learning_rate, "Initial learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--min-lr", c.min_learning_rate, "Final learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--walks", c.walks_per_node, "Random walks started per node")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--walk-length", c.walk_length, "Maximum walk length")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app.add_option("--min-count-nodes", c.min_count_nodes, "Minimum walk occurrences of a node")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--min-count-words", c.min_count_words, "Minimum corpus occurrences of a word")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--sample", c.sample, "Frequent-word subsampling threshold (0 disables)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--threads", c.threads, "Worker threads; more than 1 gives up bit-reproducibility")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-structure", f.no_structure, "Drop the node-structure term");
  app.add_flag("--no-content", f.no_content, "Drop the node-content term");
  app.add_flag("--no-labels", f.no_labels, "Drop the label-content term");
  app.add_flag("--train-word-context", c.train_word_context, "Also train word vectors with word-to-word skip-gram");
}

int cmd_train(TrainFlags& f, std::ostream& out, std::ostream& err) {
  auto& c = f.config;
  c.deterministic = c.threads == 1;
  c.use_structure = !f.no_structure;
  c.use_content = !f.no_content;
  c.use_labels = !f.no_labels;

  const auto network = load_network(f.corpus.paths());
  const auto report = validate(network);
  if (!report.ok()) throw ValidationError(report.errors().front());
  if (!report.isolated_nodes.empty()) {
    err << "warning: " << report.isolated_nodes.size() << " isolated node(s)\n";
  }

  const auto result = train(network, c);
  save_binary(result.model.input, f.out);
  if (!f.text_out.empty()) save_text(result.model.input, f.text_out);

  if (f.objective_log.empty()) {
    write_objective_log(result.log, out);
  } else {
    std::ofstream log(f.objective_log);
    if (!log) throw std::runtime_error("cannot write " + f.objective_log);
    write_objective_log(result.log, log);
  }
  if (!f.corpus_dump.empty()) {
    std::ofstream dump(f.corpus_dump);
    if (!dump) throw std::runtime_error("cannot write " + f.corpus_dump);
    for (const auto& corpus : result.corpora) write_corpus(corpus, dump);
  }
  if (!f.vocab_dump.empty()) {
    std::ofstream dump(f.vocab_dump);
    if (!dump) throw std::runtime_error("cannot write " + f.vocab_dump);
    const auto& v = result.vocabularies;
    const auto& trees = result.model.trees;
    write_vocab(v.words, trees[kWordTree], dump);
    for (std::size_t k = 0; k < v.nodes.size(); ++k) write_vocab(v.nodes[k], trees[k + 1], dump);
    write_vocab(v.labels, HuffmanTree{}, dump);
  }
  return kSuccess;
}

void setup_query(CLI::App& app, QueryFlags& f) {
  app.add_option("--model", f.model, "Model file (binary or text)")->required()->check(CLI::ExistingFile);
  app.add_option("--input", f.inputs, "Query token (k:id, w:word or c:label); repeat for a mean-vector query")
      ->required();
  app.add_option("--topk", f.top_k, "Number of results")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--filter", f.filter, "Restrict results to namespaces: source ids, 'words', 'labels'")
      ->delimiter(',');
  app.add_flag("--include-inputs", f.include_inputs, "Allow input tokens in the results");
}

int cmd_query(const QueryFlags& f, std::ostream& out, std::ostream& err) {
  const auto table = load_embeddings(f.model);
  QueryOptions options;
  options.top_k = f.top_k;
  options.include_inputs = f.include_inputs;
  if (!f.filter.empty()) {
    TokenFilter filter;
    for (const auto& item : f.filter) {
      if (item == "words") {
        filter.words = true;
      } else if (item == "labels") {
        filter.labels = true;
      } else {
        int k = 0;
        if (!CLI::detail::lexical_cast(item, k) || k < 1) throw CLI::ValidationError("--filter", "bad namespace '" + item + "'");
        filter.sources.insert(k);
      }
    }
    options.filter = filter;
  }
  const auto result = most_similar(table, f.inputs, options);
  if (!result.skipped.empty()) {
    err << "warning: skipped " << result.skipped.size() << " zero-norm candidate(s)\n";
  }
  char buf[64];
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f", result.ranked[i].second);
    out << (i + 1) << '\t' << result.ranked[i].first << '\t' << buf << '\n';
  }
  return kSuccess;
}

void setup_eval(CLI::App& app, EvalFlags& f) {
  f.corpus.add_to(app, true);
  auto& c = f.config;
  app.add_option("--model", f.model, "Model file (binary or text)")->required()->check(CLI::ExistingFile);
  app.add_option("--fractions", c.fractions, "Comma-separated training fractions")
      ->delimiter(',')
      ->capture_default_str()
      ->check(kOpenUnit);
  app.add_option("--repeats", c.repeats, "Random splits per fraction")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app.add_option("--vectors", f.vectors, "Document vector: first linked node or mean of linked nodes")
      ->capture_default_str()
      ->check(CLI::IsMember({"first", "mean"}));
  app.add_option("--epochs", c.classifier.epochs, "Classifier epochs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--clf-lr", c.classifier.learning_rate, "Classifier learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--l2", c.classifier.l2, "Classifier L2 penalty")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_flag("!--no-standardize", c.classifier.standardize, "Use raw embedding components as classifier features");
  app.add_option("--threads", c.threads, "Repeats evaluated in parallel")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", f.out, "Report path (default: stdout)");
}

int cmd_eval(EvalFlags& f, std::ostream& out) {
  f.config.vectors = f.vectors == "mean" ? VectorSource::MeanOfLinkedNodes : VectorSource::FirstLinkedNode;
  const auto network = load_network(f.corpus.paths());
  const auto table = load_embeddings(f.model);
  const auto report = evaluate(table, network, f.config);
  if (f.out.empty()) {
    write_report(report, out);
  } else {
    std::ofstream file(f.out);
    if (!file) throw std::runtime_error("cannot write " + f.out);
    write_report(report, file);
  }
  return kSuccess;
}

void setup_synth(CLI::App& app, SynthFlags& f) {
  auto& c = f.config;
  app.add_option("--out-dir", f.out_dir, "Directory for the generated files")->required();
  app.add_option("--communities", c.communities, "Number of communities")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--papers", c.papers, "Total paper nodes")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--authors", c.authors, "Total author nodes")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--overlap", c.overlap, "Shared fraction of each community word pool")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--pool-size", c.pool_size, "Words per community pool")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--words-per-doc", c.words_per_doc, "Words per document")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--paper-p-in", c.paper_intra_prob, "Paper edge probability within a community")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--paper-p-out", c.paper_inter_prob, "Paper edge probability across communities")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--author-p-in", c.author_intra_prob, "Author edge probability within a community")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--author-p-out", c.author_inter_prob, "Author edge probability across communities")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--max-authors", c.max_authors_per_paper, "Maximum authors linked to a paper")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--label-fraction", c.label_fraction, "Fraction of documents given a label")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  const auto synth = synthesize(f.config);
  const auto paths = write_synth(synth, f.out_dir);
  const auto report = validate(synth.network);
  out << "wrote " << synth.network.node_count() << " nodes, " << synth.network.edge_count() << " edges, "
      << synth.network.documents().size() << " documents, " << synth.network.labels().size() << " labels to "
      << f.out_dir << '\n';
  if (!report.ok()) throw ValidationError(report.errors().front());
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heterogeneous network embedding: train, query, evaluate, synthesize", "unra"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  TrainFlags train_flags;
  QueryFlags query_flags;
  EvalFlags eval_flags;
  SynthFlags synth_flags;

  auto* train_cmd = app.add_subcommand("train", "Learn a shared embedding for all node sources, words and labels");
  auto* query_cmd = app.add_subcommand("query", "Rank tokens by cosine similarity to the mean of the inputs");
  auto* eval_cmd = app.add_subcommand("eval", "Node classification with Macro/Micro F1 over random label splits");
  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-partition publication network");
  // Unsectioned config keys apply to the subcommand named on the command line.
  std::string scope;
  for (const auto& a : args) {
    if (a == "train" || a == "query" || a == "eval" || a == "synth") {
      scope = a;
      break;
    }
  }
  app.config_formatter(std::make_shared<ScopedConfig>(scope));
  app.set_config("--config", "", "Read flags from a TOML file (keys as flag names without dashes); command-line flags take precedence");
  for (auto* sub : {train_cmd, query_cmd, eval_cmd, synth_cmd}) {
    sub->fallthrough();
    sub->footer("Flags may also come from --config FILE, a TOML file of flag = value lines.");
  }
  setup_train(*train_cmd, train_flags);
  setup_query(*query_cmd, query_flags);
  setup_eval(*eval_cmd, eval_flags);
  setup_synth(*synth_cmd, synth_flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsageError;
  }

  try {
    if (*train_cmd) return cmd_train(train_flags, out, err);
    if (*query_cmd) return cmd_query(query_flags, out, err);
    if (*eval_cmd) return cmd_eval(eval_flags, out);
    if (*synth_cmd) return cmd_synth(synth_flags, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace unra::cli
