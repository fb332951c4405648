#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "unra/embedding_table.hpp"
#include "unra/network.hpp"

namespace unra {

using LabeledDoc = std::pair<DocId, std::string>;

struct LabelSplit {
  std::vector<LabeledDoc> train;  // sorted by document index
  std::vector<LabeledDoc> test;
};

// Uniform split without replacement with round(fraction·n) training
// documents, redrawn (at most 100 times) until every class has a training
// example. Throws std::runtime_error when that is impossible.
LabelSplit split_labels(const std::map<DocId, std::string>& labels, double fraction, std::uint64_t seed);

struct ClassifierOptions {
  int epochs = 100;
  double learning_rate = 0.1;  // divided by the 1-based epoch number
  double l2 = 1e-4;
  std::uint64_t seed = 1;
  // Z-score features with training-set statistics before fitting.
  bool standardize = true;
};

// One-vs-rest linear classifier; predicts the argmax score, ties to the
// lexicographically smaller class.
class LinearClassifier {
 public:
  const std::vector<std::string>& classes() const { return classes_; }
  std::vector<double> scores(std::span<const double> x) const;
  const std::string& predict(std::span<const double> x) const;

 private:
  friend LinearClassifier fit_linear_ovr(std::span<const std::vector<double>>, std::span<const std::string>,
                                         const ClassifierOptions&);

  std::vector<std::string> classes_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
  std::vector<double> mean_;
  std::vector<double> scale_;
};

// Hinge loss with L2 penalty, trained per class by SGD over shuffled
// samples. Throws std::invalid_argument with fewer than two classes.
LinearClassifier fit_linear_ovr(std::span<const std::vector<double>> vectors, std::span<const std::string> labels,
                                const ClassifierOptions& options = {});

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
};

// Macro F1 averages the per-class F1 of classes present in `gold`; micro F1
// pools tp/fp/fn over all classes. 0/0 counts as 0.
F1Scores f1_scores(std::span<const std::string> predicted, std::span<const std::string> gold);

enum class VectorSource { FirstLinkedNode, MeanOfLinkedNodes };

struct EvalConfig {
  std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5};
  int repeats = 20;
  std::uint64_t seed = 1;
  VectorSource vectors = VectorSource::FirstLinkedNode;
  ClassifierOptions classifier;
  int threads = 1;
};

struct EvalEntry {
  double fraction = 0.0;
  int repeat = 0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
};

struct EvalSummary {
  double fraction = 0.0;
  double macro_mean = 0.0;
  double macro_sd = 0.0;
  double micro_mean = 0.0;
  double micro_sd = 0.0;
};

struct EvalReport {
  EvalConfig config;
  std::vector<EvalEntry> entries;    // by fraction, then repeat
  std::vector<EvalSummary> summary;  // one per fraction; sample SD
};

// Classifies labeled documents by the embedding of their linked node(s).
EvalReport evaluate(const EmbeddingTable& embeddings, const HeteroNetwork& network, const EvalConfig& config);

// "fraction<TAB>repeat<TAB>macro_f1<TAB>micro_f1" rows, then a summary block.
void write_report(const EvalReport& report, std::ostream& out);

}  // namespace unra
