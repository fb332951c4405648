#include "unra/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include "unra/errors.hpp"
#include "unra/random.hpp"

namespace unra {

LabelSplit split_labels(const std::map<DocId, std::string>& labels, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("training fraction must lie in (0, 1)");
  if (labels.size() < 2) throw std::runtime_error("at least two labeled documents are required");
  const std::vector<LabeledDoc> all(labels.begin(), labels.end());
  std::set<std::string> classes;
  for (const auto& [doc, label] : all) classes.insert(label);

  const std::size_t n = all.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_train < classes.size()) {
    throw std::runtime_error("training fraction " + std::to_string(fraction) + " gives " + std::to_string(n_train) +
                             " training documents for " + std::to_string(classes.size()) + " classes");
  }
  if (n_train >= n) throw std::runtime_error("training fraction leaves no test documents");

  std::vector<std::size_t> order(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed, 0x5B117ull, static_cast<std::uint64_t>(attempt)));
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::set<std::string> seen;
    for (auto i : train) seen.insert(all[i].second);
    if (seen.size() != classes.size()) continue;

    std::sort(train.begin(), train.end());
    LabelSplit split;
    std::vector<bool> in_train(n, false);
    for (auto i : train) in_train[i] = true;
    for (std::size_t i = 0; i < n; ++i) (in_train[i] ? split.train : split.test).push_back(all[i]);
    return split;
  }
  throw std::runtime_error("no split with every class in the training set after 100 draws");
}

// ---------------------------------------------------------------------------

std::vector<double> LinearClassifier::scores(std::span<const double> x) const {
  if (x.size() != mean_.size()) throw std::invalid_argument("feature dimension mismatch");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean_[i]) / scale_[i];
  std::vector<double> out(classes_.size());
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    out[c] = std::inner_product(z.begin(), z.end(), weights_[c].begin(), bias_[c]);
  }
  return out;
}

const std::string& LinearClassifier::predict(std::span<const double> x) const {
  const auto s = scores(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c) {
    if (s[c] > s[best]) best = c;
  }
  return classes_[best];
}

LinearClassifier fit_linear_ovr(std::span<const std::vector<double>> vectors, std::span<const std::string> labels,
                                const ClassifierOptions& options) {
  if (vectors.size() != labels.size()) throw std::invalid_argument("vectors and labels differ in length");
  if (vectors.empty()) throw std::invalid_argument("no training data");
  const std::set<std::string> class_set(labels.begin(), labels.end());
  if (class_set.size() < 2) throw std::invalid_argument("training data must contain at least two classes");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw std::invalid_argument("inconsistent feature dimensions");
  }

  LinearClassifier clf;
  clf.classes_.assign(class_set.begin(), class_set.end());
  const std::size_t n = vectors.size();
  clf.mean_.assign(dim, 0.0);
  clf.scale_.assign(dim, 1.0);
  if (options.standardize) {
    for (const auto& v : vectors) {
      for (std::size_t i = 0; i < dim; ++i) clf.mean_[i] += v[i];
    }
    for (auto& m : clf.mean_) m /= static_cast<double>(n);
    std::vector<double> var(dim, 0.0);
    for (const auto& v : vectors) {
      for (std::size_t i = 0; i < dim; ++i) var[i] += (v[i] - clf.mean_[i]) * (v[i] - clf.mean_[i]);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      const double sd = std::sqrt(var[i] / static_cast<double>(n));
      clf.scale_[i] = sd > 1e-12 ? sd : 1.0;
    }
  }
  std::vector<std::vector<double>> z(n, std::vector<double>(dim));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < dim; ++i) z[s][i] = (vectors[s][i] - clf.mean_[i]) / clf.scale_[i];
  }
  std::vector<std::size_t> target(n);
  for (std::size_t s = 0; s < n; ++s) {
    target[s] = static_cast<std::size_t>(
        std::lower_bound(clf.classes_.begin(), clf.classes_.end(), labels[s]) - clf.classes_.begin());
  }

  const std::size_t n_classes = clf.classes_.size();
  clf.weights_.assign(n_classes, std::vector<double>(dim, 0.0));
  clf.bias_.assign(n_classes, 0.0);
  Rng rng(mix_seed(options.seed, 0x0C1Full));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    const double lr = options.learning_rate / epoch;
    rng.shuffle(std::span<std::size_t>(order));
    for (auto s : order) {
      const auto& x = z[s];
      for (std::size_t c = 0; c < n_classes; ++c) {
        auto& w = clf.weights_[c];
        const double y = target[s] == c ? 1.0 : -1.0;
        const double score = std::inner_product(x.begin(), x.end(), w.begin(), clf.bias_[c]);
        const bool violated = y * score < 1.0;
        for (std::size_t i = 0; i < dim; ++i) {
          w[i] -= lr * (options.l2 * w[i] - (violated ? y * x[i] : 0.0));
        }
        if (violated) clf.bias_[c] += lr * y;
      }
    }
  }
  return clf;
}

// ---------------------------------------------------------------------------

F1Scores f1_scores(std::span<const std::string> predicted, std::span<const std::string> gold) {
  if (predicted.size() != gold.size()) throw std::invalid_argument("predicted and gold differ in length");
  if (gold.empty()) throw std::invalid_argument("f1_scores needs at least one instance");
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<std::string, Counts> per_class;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i] == gold[i]) {
      ++per_class[gold[i]].tp;
    } else {
      ++per_class[predicted[i]].fp;
      ++per_class[gold[i]].fn;
    }
  }
  auto f1 = [](std::size_t tp, std::size_t fp, std::size_t fn) {
    const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  };
  const std::set<std::string> gold_classes(gold.begin(), gold.end());
  double macro = 0.0;
  Counts pooled;
  for (const auto& [label, c] : per_class) {
    if (gold_classes.contains(label)) macro += f1(c.tp, c.fp, c.fn);
    pooled.tp += c.tp;
    pooled.fp += c.fp;
    pooled.fn += c.fn;
  }
  return {macro / static_cast<double>(gold_classes.size()), f1(pooled.tp, pooled.fp, pooled.fn)};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> document_vector(const EmbeddingTable& table, const HeteroNetwork& network, DocId doc,
                                    VectorSource source) {
  auto it = network.links().find(doc);
  if (it == network.links().end()) {
    throw UnknownTokenError("labeled document " + std::to_string(doc) + " has no linked node");
  }
  const auto& nodes = it->second;
  const std::size_t use = source == VectorSource::FirstLinkedNode ? 1 : nodes.size();
  std::vector<double> v(table.dim(), 0.0);
  for (std::size_t i = 0; i < use; ++i) {
    const auto row = table.row(table.at(nodes[i].str()));
    for (std::size_t c = 0; c < v.size(); ++c) v[c] += row[c];
  }
  for (auto& x : v) x /= static_cast<double>(use);
  return v;
}

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace

EvalReport evaluate(const EmbeddingTable& embeddings, const HeteroNetwork& network, const EvalConfig& config) {
  if (network.labels().empty()) throw std::runtime_error("network has no labels to evaluate against");
  if (config.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (config.fractions.empty()) throw std::invalid_argument("no training fractions given");

  std::map<DocId, std::vector<double>> vectors;
  for (const auto& [doc, label] : network.labels()) {
    vectors.emplace(doc, document_vector(embeddings, network, doc, config.vectors));
  }

  EvalReport report;
  report.config = config;
  const std::size_t jobs = config.fractions.size() * static_cast<std::size_t>(config.repeats);
  report.entries.resize(jobs);

  auto run = [&](std::size_t job) {
    const std::size_t f = job / static_cast<std::size_t>(config.repeats);
    const int repeat = static_cast<int>(job % static_cast<std::size_t>(config.repeats));
    const std::uint64_t seed = mix_seed(config.seed, f, static_cast<std::uint64_t>(repeat));
    const auto split = split_labels(network.labels(), config.fractions[f], seed);

    std::vector<std::vector<double>> x;
    std::vector<std::string> y;
    for (const auto& [doc, label] : split.train) {
      x.push_back(vectors.at(doc));
      y.push_back(label);
    }
    ClassifierOptions opts = config.classifier;
    opts.seed = seed;
    const auto clf = fit_linear_ovr(x, y, opts);
    std::vector<std::string> predicted;
    std::vector<std::string> gold;
    for (const auto& [doc, label] : split.test) {
      predicted.push_back(clf.predict(vectors.at(doc)));
      gold.push_back(label);
    }
    const auto scores = f1_scores(predicted, gold);
    report.entries[job] = {config.fractions[f], repeat, scores.macro, scores.micro};
  };

  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, config.threads)), jobs);
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) run(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          for (std::size_t j = next++; j < jobs; j = next++) {
            try {
              run(j);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  for (std::size_t f = 0; f < config.fractions.size(); ++f) {
    std::vector<double> macro;
    std::vector<double> micro;
    for (const auto& e : report.entries) {
      if (e.fraction == config.fractions[f]) {
        macro.push_back(e.macro_f1);
        micro.push_back(e.micro_f1);
      }
    }
    const auto [mm, ms] = mean_sd(macro);
    const auto [im, is] = mean_sd(micro);
    report.summary.push_back({config.fractions[f], mm, ms, im, is});
  }
  return report;
}

void write_report(const EvalReport& report, std::ostream& out) {
  char buf[160];
  out << "fraction\trepeat\tmacro_f1\tmicro_f1\n";
  for (const auto& e : report.entries) {
    std::snprintf(buf, sizeof buf, "%g\t%d\t%.6f\t%.6f\n", e.fraction, e.repeat, e.macro_f1, e.micro_f1);
    out << buf;
  }
  out << "\nfraction\tmacro_mean\tmacro_sd\tmicro_mean\tmicro_sd\n";
  for (const auto& s : report.summary) {
    std::snprintf(buf, sizeof buf, "%g\t%.6f\t%.6f\t%.6f\t%.6f\n", s.fraction, s.macro_mean, s.macro_sd, s.micro_mean,
                  s.micro_sd);
    out << buf;
  }
}

}  // namespace unra
