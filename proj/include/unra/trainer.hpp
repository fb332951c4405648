#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "unra/model.hpp"
#include "unra/network.hpp"
#include "unra/walker.hpp"

namespace unra {

struct TrainConfig {
  std::size_t dim = 100;
  int window = 5;
  int iterations = 10;
  // Weight of the structure term; content and label terms get 1 - alpha.
  double alpha = 0.8;
  double initial_learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  int walks_per_node = 10;
  int walk_length = 40;
  std::uint64_t seed = 1;
  // Serial, bit-reproducible execution. When false, `threads` workers
  // update shared vectors without locking.
  bool deterministic = true;
  int threads = 1;
  std::uint64_t min_count_nodes = 1;
  std::uint64_t min_count_words = 5;
  // Ablation switches: a disabled term contributes nothing.
  bool use_structure = true;
  bool use_content = true;
  bool use_labels = true;
  // Adds a word→word skip-gram pass over the documents.
  bool train_word_context = false;
  // Frequent-word subsampling threshold; 0 disables it.
  double sample = 0.0;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;

  double structure_weight() const { return use_structure ? alpha : 0.0; }
  double content_weight() const { return use_content ? 1.0 - alpha : 0.0; }
  double label_weight() const { return use_labels ? 1.0 - alpha : 0.0; }
  int workers() const { return deterministic ? 1 : (threads < 1 ? 1 : threads); }
};

// Learning rate decaying linearly from `initial` to `minimum` over
// `total_pairs` processed training pairs. Shared between workers.
class LearningRate {
 public:
  LearningRate(double initial, double minimum, std::uint64_t total_pairs);
  static LearningRate constant(double lr) { return LearningRate(lr, lr, 0); }

  double current() const;
  void advance(std::uint64_t pairs) { processed_.fetch_add(pairs, std::memory_order_relaxed); }
  std::uint64_t processed() const { return processed_.load(std::memory_order_relaxed); }

 private:
  double initial_;
  double minimum_;
  std::uint64_t total_;
  std::atomic<std::uint64_t> processed_{0};
};

// Sum of log probabilities of the predictions made during a pass, taken
// before each update.
struct PassStats {
  double log_likelihood = 0.0;
  std::uint64_t predictions = 0;

  double mean() const;
  PassStats& operator+=(const PassStats& o) {
    log_likelihood += o.log_likelihood;
    predictions += o.predictions;
    return *this;
  }
};

// Skip-gram over one source's walks: every center node predicts each node
// within `window` positions through that source's tree, weight alpha.
// Touches only node input vectors and that source's inner vectors.
PassStats structure_pass(EmbeddingModel& model, const WalkCorpus& corpus, const TrainConfig& config,
                         LearningRate& lr);

// Every node linked to a document predicts the document's words through the
// word tree, weight 1 - alpha. For each word position t and offset
// 0 < |j| <= window the target is word t+j. Out-of-vocabulary words are
// removed first.
PassStats content_pass(EmbeddingModel& model, const HeteroNetwork& network, const TrainConfig& config,
                       LearningRate& lr, int epoch = 0);

// Same targets as content_pass with the document's label vector as input.
// Node vectors are never read or written.
PassStats label_pass(EmbeddingModel& model, const HeteroNetwork& network, const TrainConfig& config,
                     LearningRate& lr, int epoch = 0);

// Optional word→word skip-gram over the documents, weight 1 - alpha.
PassStats word_context_pass(EmbeddingModel& model, const HeteroNetwork& network, const TrainConfig& config,
                            LearningRate& lr, int epoch = 0);

// Unweighted log-likelihood sums of the three objective terms.
struct ObjectiveTerms {
  double structure = 0.0;
  double content = 0.0;
  double label = 0.0;

  // alpha·structure + (1 - alpha)·(content + label), honouring ablations.
  double total(const TrainConfig& config) const;
};

// Exact evaluation of the objective over the given corpora and documents.
ObjectiveTerms compute_objective(const EmbeddingModel& model, const HeteroNetwork& network,
                                 std::span<const WalkCorpus> corpora, const TrainConfig& config);

struct EpochLog {
  int epoch = 0;
  double structure_ll = 0.0;  // mean log-likelihood per prediction; NaN if none
  double content_ll = 0.0;
  double label_ll = 0.0;
};

struct TrainResult {
  EmbeddingModel model;
  ModelVocabularies vocabularies;
  std::vector<WalkCorpus> corpora;  // index k-1 for source k
  std::vector<EpochLog> log;
};

// Walk corpora, vocabularies and trees, initialisation, then `iterations`
// epochs of: structure pass per source 1..K, content pass, label pass.
TrainResult train(const HeteroNetwork& network, const TrainConfig& config);

// "epoch<TAB>structure_ll<TAB>content_ll<TAB>label_ll" per epoch.
void write_objective_log(std::span<const EpochLog> log, std::ostream& out);

}  // namespace unra
