#include "unra/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "unra/errors.hpp"
#include "unra/hsoftmax.hpp"
#include "unra/random.hpp"

namespace unra {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (dim < 1) fail("dimension must be >= 1");
  if (window < 1) fail("window must be >= 1");
  if (iterations < 0) fail("iterations must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (!(initial_learning_rate > 0.0)) fail("initial learning rate must be positive");
  if (!(min_learning_rate > 0.0)) fail("minimum learning rate must be positive");
  if (min_learning_rate > initial_learning_rate) fail("minimum learning rate exceeds the initial learning rate");
  if (walks_per_node < 1) fail("walks per node must be >= 1");
  if (walk_length < 1) fail("walk length must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
  if (min_count_nodes < 1 || min_count_words < 1) fail("min counts must be >= 1");
  if (!(sample >= 0.0)) fail("sample threshold must be non-negative");
}

LearningRate::LearningRate(double initial, double minimum, std::uint64_t total_pairs)
    : initial_(initial), minimum_(minimum), total_(total_pairs) {}

double LearningRate::current() const {
  if (total_ == 0) return initial_;
  const double progress = std::min(1.0, static_cast<double>(processed()) / static_cast<double>(total_));
  return initial_ - (initial_ - minimum_) * progress;
}

double PassStats::mean() const {
  return predictions == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : log_likelihood / static_cast<double>(predictions);
}

double ObjectiveTerms::total(const TrainConfig& config) const {
  return config.structure_weight() * structure + config.content_weight() * content + config.label_weight() * label;
}

namespace {

// Learning-rate refresh interval, in training pairs.
constexpr std::uint64_t kRefresh = 256;

struct Worker {
  Worker(LearningRate& schedule, std::size_t dim) : lr(schedule), scratch(dim), rate(schedule.current()) {}

  void step(std::span<double> input, const HuffmanTree& tree, std::span<double> inner, std::size_t leaf,
            double weight) {
    double ll = 0.0;
    hs_gradient_step(input, tree, inner, leaf, rate, weight, scratch, &ll);
    stats.log_likelihood += ll;
    ++stats.predictions;
    if (++pending == kRefresh) flush();
  }

  void flush() {
    lr.advance(pending);
    pending = 0;
    rate = lr.current();
  }

  LearningRate& lr;
  std::vector<double> scratch;
  double rate;
  std::uint64_t pending = 0;
  PassStats stats;
};

// Runs fn(worker, item) over [0, items). With one worker the order is the
// item order; otherwise contiguous chunks run concurrently without locks.
template <typename Fn>
PassStats run_workers(std::size_t items, int workers, LearningRate& lr, std::size_t dim, Fn&& fn) {
  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)),
                                                      std::max<std::size_t>(1, items));
  std::vector<Worker> state;
  state.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) state.emplace_back(lr, dim);

  auto run = [&](std::size_t w, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fn(state[w], i);
    state[w].flush();
  };
  if (n_workers == 1) {
    run(0, 0, items);
  } else {
    const std::size_t chunk = (items + n_workers - 1) / n_workers;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
      const std::size_t b = std::min(items, w * chunk);
      const std::size_t e = std::min(items, b + chunk);
      pool.emplace_back(run, w, b, e);
    }
  }
  PassStats total;
  for (const auto& w : state) total += w.stats;
  return total;
}

std::uint64_t window_pairs(std::size_t length, int window) {
  const auto b = static_cast<std::size_t>(window);
  std::uint64_t n = 0;
  for (std::size_t t = 0; t < length; ++t) n += std::min(b, t) + std::min(b, length - 1 - t);
  return n;
}

// Calls fn(center_position, target_position) for every in-bounds offset.
template <typename Fn>
void for_each_pair(std::size_t length, int window, Fn&& fn) {
  const auto b = static_cast<std::ptrdiff_t>(window);
  const auto n = static_cast<std::ptrdiff_t>(length);
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    for (std::ptrdiff_t j = -b; j <= b; ++j) {
      if (j == 0 || t + j < 0 || t + j >= n) continue;
      fn(static_cast<std::size_t>(t), static_cast<std::size_t>(t + j));
    }
  }
}

// ---------------------------------------------------------------------------
// Walk encoding

struct EncodedWalks {
  int source_id = 0;
  // Per walk, the (input row, leaf) of each in-vocabulary node.
  std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> walks;
};

EncodedWalks encode_walks(const EmbeddingModel& model, const WalkCorpus& corpus) {
  const int k = corpus.source_id;
  if (k < 1 || static_cast<std::size_t>(k) >= model.trees.size()) {
    throw std::invalid_argument("corpus/tree source mismatch: no node tree for source " + std::to_string(k));
  }
  const auto& tree = model.trees[static_cast<std::size_t>(k)];
  if (tree.empty() && corpus.token_count() > 0) {
    throw std::invalid_argument("corpus/tree source mismatch: node tree of source " + std::to_string(k) + " is empty");
  }
  std::vector<std::size_t> rows(corpus.names.size());
  std::vector<std::int64_t> leaves(corpus.names.size(), -1);
  for (std::size_t i = 0; i < corpus.names.size(); ++i) {
    const std::string token = NodeRef{k, corpus.names[i]}.str();
    rows[i] = model.input.at(token);
    if (auto leaf = tree.find(token)) leaves[i] = static_cast<std::int64_t>(*leaf);
  }
  EncodedWalks out;
  out.source_id = k;
  out.walks.reserve(corpus.walks.size());
  for (const auto& walk : corpus.walks) {
    auto& enc = out.walks.emplace_back();
    enc.reserve(walk.size());
    for (auto v : walk) {
      if (leaves[v] >= 0) enc.emplace_back(rows[v], static_cast<std::uint32_t>(leaves[v]));
    }
  }
  return out;
}

PassStats run_structure(EmbeddingModel& model, const EncodedWalks& walks, const TrainConfig& config,
                        LearningRate& lr) {
  const double weight = config.structure_weight();
  if (weight <= 0.0) return {};
  const auto k = static_cast<std::size_t>(walks.source_id);
  const auto& tree = model.trees[k];
  auto inner = std::span<double>(model.inner[k]);
  return run_workers(walks.walks.size(), config.workers(), lr, model.dim(), [&](Worker& w, std::size_t i) {
    const auto& walk = walks.walks[i];
    for_each_pair(walk.size(), config.window, [&](std::size_t center, std::size_t target) {
      w.step(model.input.row(walk[center].first), tree, inner, walk[target].second, weight);
    });
  });
}

// ---------------------------------------------------------------------------
// Document encoding

struct EncodedDoc {
  DocId id = 0;
  std::vector<std::uint32_t> words;  // word-tree leaves
  std::vector<std::size_t> nodes;    // input rows of linked nodes
  std::int64_t label_row = -1;
};

struct EncodedDocs {
  std::vector<EncodedDoc> docs;
  std::vector<std::size_t> word_rows;  // word-tree leaf -> input row
};

EncodedDocs encode_documents(const EmbeddingModel& model, const HeteroNetwork& network) {
  for (const auto& [doc, label] : network.labels()) {
    if (!network.documents().contains(doc)) {
      throw UnknownTokenError("label on unknown document " + std::to_string(doc));
    }
  }
  static const HuffmanTree kNoWords;
  const auto& words = model.trees.empty() ? kNoWords : model.trees[kWordTree];
  EncodedDocs out;
  out.word_rows.resize(words.leaf_count());
  for (std::size_t leaf = 0; leaf < words.leaf_count(); ++leaf) out.word_rows[leaf] = model.input.at(words.token(leaf));

  for (const auto& [doc, text] : network.documents()) {
    EncodedDoc enc;
    enc.id = doc;
    for (const auto& w : text) {
      if (auto leaf = words.find(word_token(w))) enc.words.push_back(static_cast<std::uint32_t>(*leaf));
    }
    if (auto it = network.links().find(doc); it != network.links().end()) {
      for (const auto& node : it->second) {
        auto row = model.input.find(node.str());
        if (!row) throw UnknownTokenError("document " + std::to_string(doc) + " links unknown node " + node.str());
        enc.nodes.push_back(*row);
      }
    }
    if (auto it = network.labels().find(doc); it != network.labels().end()) {
      enc.label_row = static_cast<std::int64_t>(model.input.at(label_token(it->second)));
    }
    out.docs.push_back(std::move(enc));
  }
  return out;
}

// Word sequence of a document for one epoch, after optional subsampling.
std::span<const std::uint32_t> epoch_words(const EncodedDoc& doc, const HuffmanTree& tree, const TrainConfig& config,
                                           std::uint64_t stream, int epoch, std::vector<std::uint32_t>& buffer) {
  if (config.sample <= 0.0) return doc.words;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) total += tree.frequency(i);
  const double threshold = config.sample * static_cast<double>(total);
  Rng rng(mix_seed(config.seed, stream ^ static_cast<std::uint64_t>(epoch), doc.id));
  buffer.clear();
  for (auto leaf : doc.words) {
    const double f = static_cast<double>(tree.frequency(leaf));
    const double keep = (std::sqrt(f / threshold) + 1.0) * threshold / f;
    if (keep >= 1.0 || rng.uniform() < keep) buffer.push_back(leaf);
  }
  return buffer;
}

enum class DocPass : std::uint64_t { Content = 0xC0, Label = 0x1A, WordContext = 0x3C };

PassStats run_documents(EmbeddingModel& model, const EncodedDocs& docs, const TrainConfig& config, LearningRate& lr,
                        int epoch, DocPass pass) {
  const double weight = pass == DocPass::Content ? config.content_weight()
                        : pass == DocPass::Label ? config.label_weight()
                        : (config.train_word_context ? 1.0 - config.alpha : 0.0);
  if (weight <= 0.0 || model.trees.empty() || model.trees[kWordTree].empty()) return {};
  const auto& tree = model.trees[kWordTree];
  auto inner = std::span<double>(model.inner[kWordTree]);

  return run_workers(docs.docs.size(), config.workers(), lr, model.dim(), [&](Worker& w, std::size_t i) {
    const auto& doc = docs.docs[i];
    if (pass == DocPass::Content && doc.nodes.empty()) return;
    if (pass == DocPass::Label && doc.label_row < 0) return;
    thread_local std::vector<std::uint32_t> buffer;
    const auto words = epoch_words(doc, tree, config, static_cast<std::uint64_t>(pass), epoch, buffer);
    for_each_pair(words.size(), config.window, [&](std::size_t center, std::size_t target) {
      const auto leaf = words[target];
      switch (pass) {
        case DocPass::Content:
          for (auto row : doc.nodes) w.step(model.input.row(row), tree, inner, leaf, weight);
          break;
        case DocPass::Label:
          w.step(model.input.row(static_cast<std::size_t>(doc.label_row)), tree, inner, leaf, weight);
          break;
        case DocPass::WordContext:
          w.step(model.input.row(docs.word_rows[words[center]]), tree, inner, leaf, weight);
          break;
      }
    });
  });
}

std::uint64_t document_pairs(const EncodedDocs& docs, const TrainConfig& config) {
  std::uint64_t n = 0;
  for (const auto& d : docs.docs) {
    const auto pairs = window_pairs(d.words.size(), config.window);
    if (config.content_weight() > 0) n += pairs * d.nodes.size();
    if (config.label_weight() > 0 && d.label_row >= 0) n += pairs;
    if (config.train_word_context && config.alpha < 1.0) n += pairs;
  }
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public passes

PassStats structure_pass(EmbeddingModel& model, const WalkCorpus& corpus, const TrainConfig& config,
                         LearningRate& lr) {
  const auto walks = encode_walks(model, corpus);
  return run_structure(model, walks, config, lr);
}

PassStats content_pass(EmbeddingModel& model, const HeteroNetwork& network, const TrainConfig& config,
                       LearningRate& lr, int epoch) {
  return run_documents(model, encode_documents(model, network), config, lr, epoch, DocPass::Content);
}

PassStats label_pass(EmbeddingModel& model, const HeteroNetwork& network, const TrainConfig& config,
                     LearningRate& lr, int epoch) {
  if (network.labels().empty()) return {};
  return run_documents(model, encode_documents(model, network), config, lr, epoch, DocPass::Label);
}

PassStats word_context_pass(EmbeddingModel& model, const HeteroNetwork& network, const TrainConfig& config,
                            LearningRate& lr, int epoch) {
  return run_documents(model, encode_documents(model, network), config, lr, epoch, DocPass::WordContext);
}

ObjectiveTerms compute_objective(const EmbeddingModel& model, const HeteroNetwork& network,
                                 std::span<const WalkCorpus> corpora, const TrainConfig& config) {
  ObjectiveTerms terms;
  for (const auto& corpus : corpora) {
    const auto walks = encode_walks(model, corpus);
    const auto& tree = model.trees[static_cast<std::size_t>(walks.source_id)];
    const auto& inner = model.inner[static_cast<std::size_t>(walks.source_id)];
    for (const auto& walk : walks.walks) {
      for_each_pair(walk.size(), config.window, [&](std::size_t c, std::size_t t) {
        terms.structure += hs_log_prob(model.input.row(walk[c].first), tree, inner, walk[t].second);
      });
    }
  }
  if (model.trees.empty() || model.trees[kWordTree].empty()) return terms;
  const auto docs = encode_documents(model, network);
  const auto& tree = model.trees[kWordTree];
  const auto& inner = model.inner[kWordTree];
  for (const auto& doc : docs.docs) {
    for_each_pair(doc.words.size(), config.window, [&](std::size_t, std::size_t t) {
      for (auto row : doc.nodes) terms.content += hs_log_prob(model.input.row(row), tree, inner, doc.words[t]);
      if (doc.label_row >= 0) {
        terms.label += hs_log_prob(model.input.row(static_cast<std::size_t>(doc.label_row)), tree, inner, doc.words[t]);
      }
    });
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Orchestration

TrainResult train(const HeteroNetwork& network, const TrainConfig& config) {
  config.validate();
  TrainResult result;

  WalkOptions walk_options{config.walks_per_node, config.walk_length, config.seed, config.workers()};
  for (int k = 1; k <= network.num_sources(); ++k) result.corpora.push_back(generate_walks(network, k, walk_options));

  auto& vocabs = result.vocabularies;
  const bool needs_words =
      config.content_weight() > 0 || config.label_weight() > 0 || (config.train_word_context && config.alpha < 1.0);
  std::map<std::string, std::uint64_t> word_counts;
  for (const auto& [doc, words] : network.documents()) {
    for (const auto& w : words) ++word_counts[word_token(w)];
  }
  if (!word_counts.empty()) {
    try {
      vocabs.words = build_vocab_from_counts(word_counts, config.min_count_words, VocabKind::Words);
    } catch (const std::runtime_error&) {
      if (needs_words) {
        throw std::runtime_error("no word occurs at least min_count_words=" + std::to_string(config.min_count_words) +
                                 " times; nothing to train");
      }
    }
  }
  for (const auto& corpus : result.corpora) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& [node, n] : corpus_node_frequencies(corpus)) counts.emplace(node.str(), n);
    if (counts.empty()) {
      vocabs.nodes.emplace_back();
    } else {
      vocabs.nodes.push_back(build_vocab_from_counts(counts, config.min_count_nodes, VocabKind::Nodes, corpus.source_id));
    }
  }
  std::map<std::string, std::uint64_t> label_counts;
  for (const auto& [doc, label] : network.labels()) ++label_counts[label_token(label)];
  if (!label_counts.empty()) vocabs.labels = build_vocab_from_counts(label_counts, 1, VocabKind::Labels);

  result.model = init_model(network, vocabs, build_trees(vocabs), config.dim, config.seed);
  auto& model = result.model;

  std::vector<EncodedWalks> walks;
  std::uint64_t pairs_per_epoch = 0;
  for (const auto& corpus : result.corpora) {
    walks.push_back(encode_walks(model, corpus));
    if (config.structure_weight() > 0) {
      for (const auto& w : walks.back().walks) pairs_per_epoch += window_pairs(w.size(), config.window);
    }
  }
  const auto docs = encode_documents(model, network);
  pairs_per_epoch += document_pairs(docs, config);

  LearningRate lr(config.initial_learning_rate, config.min_learning_rate,
                  pairs_per_epoch * static_cast<std::uint64_t>(config.iterations));
  for (int epoch = 1; epoch <= config.iterations; ++epoch) {
    PassStats structure;
    for (const auto& w : walks) structure += run_structure(model, w, config, lr);
    const PassStats content = run_documents(model, docs, config, lr, epoch, DocPass::Content);
    const PassStats label = run_documents(model, docs, config, lr, epoch, DocPass::Label);
    if (config.train_word_context) run_documents(model, docs, config, lr, epoch, DocPass::WordContext);
    result.log.push_back({epoch, structure.mean(), content.mean(), label.mean()});
  }
  return result;
}

void write_objective_log(std::span<const EpochLog> log, std::ostream& out) {
  auto put = [&](double v) {
    if (std::isnan(v)) {
      out << "nan";
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", v);
      out << buf;
    }
  };
  for (const auto& e : log) {
    out << e.epoch << '\t';
    put(e.structure_ll);
    out << '\t';
    put(e.content_ll);
    out << '\t';
    put(e.label_ll);
    out << '\n';
  }
}

}  // namespace unra
