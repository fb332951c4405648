#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "unra/eval.hpp"
#include "unra/random.hpp"

using namespace unra;

namespace {

std::map<DocId, std::string> labels_cycle(int n, int classes) {
  std::map<DocId, std::string> out;
  for (int i = 0; i < n; ++i) out[static_cast<DocId>(i)] = std::string(1, static_cast<char>('A' + i % classes));
  return out;
}

double accuracy(const LinearClassifier& clf, const std::vector<std::vector<double>>& x,
                const std::vector<std::string>& y) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < x.size(); ++i) hit += clf.predict(x[i]) == y[i];
  return static_cast<double>(hit) / static_cast<double>(x.size());
}

// Best training accuracy of an argmax-of-linear-scores rule whose weights
// and biases lie on a coarse grid. Class 0 is pinned to the zero score,
// which loses no generality for argmax rules.
double grid_search_accuracy(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
  std::vector<double> grid;
  for (double g = -2.0; g <= 2.0 + 1e-9; g += 0.5) grid.push_back(g);
  double best = 0.0;
  for (double a0 : grid)
    for (double a1 : grid)
      for (double ab : grid)
        for (double b0 : grid)
          for (double b1 : grid)
            for (double bb : grid) {
              std::size_t hit = 0;
              for (std::size_t i = 0; i < x.size(); ++i) {
                const double s[3] = {0.0, a0 * x[i][0] + a1 * x[i][1] + ab, b0 * x[i][0] + b1 * x[i][1] + bb};
                const int pred = static_cast<int>(std::max_element(s, s + 3) - s);
                hit += pred == y[i];
              }
              best = std::max(best, static_cast<double>(hit) / static_cast<double>(x.size()));
            }
  return best;
}

struct Clustered {
  HeteroNetwork network{1};
  EmbeddingTable table{3};
};

// Documents whose first linked node sits near its class centre.
Clustered clustered(int n, int classes, std::uint64_t seed) {
  Clustered c;
  Rng rng(seed);
  for (int d = 0; d < n; ++d) {
    const int k = d % classes;
    const auto node = "n" + std::to_string(d);
    c.network.add_document(static_cast<DocId>(d), {"w"});
    c.network.add_link(static_cast<DocId>(d), {NodeRef{1, node}});
    c.network.set_label(static_cast<DocId>(d), "class" + std::to_string(k));
    const double angle = 2.0 * std::numbers::pi * k / classes;
    c.table.add("1:" + node, std::vector<double>{3 * std::cos(angle) + 0.2 * rng.uniform(),
                                                  3 * std::sin(angle) + 0.2 * rng.uniform(), rng.uniform()});
  }
  return c;
}

}  // namespace

TEST_CASE("split sizes and determinism") {
  const auto labels = labels_cycle(10, 2);
  const auto s = split_labels(labels, 0.5, 3);
  CHECK(s.train.size() == 5);
  CHECK(s.test.size() == 5);
  CHECK(std::ranges::is_sorted(s.train));
  const auto again = split_labels(labels, 0.5, 3);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  std::set<DocId> all;
  for (const auto& [d, l] : s.train) all.insert(d);
  for (const auto& [d, l] : s.test) all.insert(d);
  CHECK(all.size() == 10);
}

TEST_CASE("every class reaches the training set") {
  const auto labels = labels_cycle(40, 4);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = split_labels(labels, 0.1, seed);
    std::set<std::string> classes;
    for (const auto& [d, l] : s.train) classes.insert(l);
    CHECK(classes.size() == 4);
  }
}

TEST_CASE("impossible splits are errors") {
  CHECK_THROWS_AS(split_labels(labels_cycle(10, 4), 0.1, 1), std::runtime_error);
  CHECK_THROWS_AS(split_labels(labels_cycle(10, 2), 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_labels(labels_cycle(10, 2), 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_labels(labels_cycle(1, 1), 0.5, 1), std::runtime_error);
  std::map<DocId, std::string> rare = labels_cycle(20, 1);
  rare[20] = "Z";
  // "Z" has one instance; most draws of 2 training documents miss it.
  CHECK_THROWS_AS(split_labels(rare, 0.05, 1), std::runtime_error);
}

TEST_CASE("separable clusters are learned exactly") {
  std::vector<std::vector<double>> x;
  std::vector<std::string> y;
  Rng rng(4);
  for (int i = 0; i < 40; ++i) {
    const double side = i % 2 ? 1.0 : -1.0;
    x.push_back({side + 0.3 * (rng.uniform() - 0.5), rng.uniform() - 0.5});
    y.push_back(i % 2 ? "pos" : "neg");
  }
  const auto clf = fit_linear_ovr(x, y);
  CHECK(accuracy(clf, x, y) == 1.0);
  CHECK(clf.classes() == std::vector<std::string>{"neg", "pos"});
  const std::vector<std::string> one(x.size(), "pos");
  CHECK_THROWS_AS(fit_linear_ovr(x, one), std::invalid_argument);
}

TEST_CASE("identical points fall back to the majority class") {
  const std::vector<std::vector<double>> x(5, std::vector<double>{0.5, -0.5});
  const std::vector<std::string> y{"b", "a", "b", "a", "b"};
  const auto clf = fit_linear_ovr(x, y);
  CHECK(accuracy(clf, x, y) == doctest::Approx(0.6));

  const std::vector<std::string> tie{"b", "a", "b", "a"};
  const std::vector<std::vector<double>> x4(4, std::vector<double>{1.0, 1.0});
  CHECK(fit_linear_ovr(x4, tie).predict(x4[0]) == "a");
}

TEST_CASE("classifier matches a grid-search optimum") {
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    Rng rng(50 + trial);
    std::vector<std::vector<double>> x;
    std::vector<int> yi;
    std::vector<std::string> y;
    for (int i = 0; i < 60; ++i) {
      const int k = i % 3;
      const double angle = 2.0 * std::numbers::pi * k / 3 + 0.3 * static_cast<double>(trial);
      x.push_back({1.5 * std::cos(angle) + (rng.uniform() - 0.5), 1.5 * std::sin(angle) + (rng.uniform() - 0.5)});
      yi.push_back(k);
      y.push_back("k" + std::to_string(k));
    }
    const double oracle = grid_search_accuracy(x, yi);
    const auto clf = fit_linear_ovr(x, y, {.seed = trial});
    CHECK(accuracy(clf, x, y) >= oracle - 0.02);
  }
}

TEST_CASE("f1 examples") {
  const std::vector<std::string> gold{"A", "A", "B"}, pred{"A", "B", "B"};
  const auto f = f1_scores(pred, gold);
  CHECK(f.macro == doctest::Approx(2.0 / 3.0));
  CHECK(f.micro == doctest::Approx(2.0 / 3.0));
  const auto perfect = f1_scores(gold, gold);
  CHECK(perfect.macro == 1.0);
  CHECK(perfect.micro == 1.0);
  const std::vector<std::string> shorter{"A"};
  CHECK_THROWS_AS(f1_scores(shorter, gold), std::invalid_argument);
  // A predicted class absent from gold lowers micro but not the macro average's class set.
  const std::vector<std::string> g2{"A", "A"}, p2{"A", "C"};
  const auto f2 = f1_scores(p2, g2);
  CHECK(f2.macro == doctest::Approx(2.0 / 3.0));
  CHECK(f2.micro == doctest::Approx(0.5));
}

TEST_CASE("micro F1 equals accuracy and macro F1 ignores class names") {
  Rng rng(9);
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const std::vector<std::string> renamed{"zeta", "eta", "alpha", "mu"};
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 1 + rng.index(30);
    std::vector<std::string> gold, pred, gold_r, pred_r;
    std::size_t hit = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto g = rng.index(4), p = rng.index(4);
      gold.push_back(names[g]);
      pred.push_back(names[p]);
      gold_r.push_back(renamed[g]);
      pred_r.push_back(renamed[p]);
      hit += g == p;
    }
    const auto f = f1_scores(pred, gold);
    CHECK(f.micro == doctest::Approx(static_cast<double>(hit) / static_cast<double>(n)).epsilon(1e-12));
    CHECK(f1_scores(pred_r, gold_r).macro == doctest::Approx(f.macro).epsilon(1e-12));
    CHECK(f.macro >= 0.0);
    CHECK(f.macro <= 1.0);
    CHECK((f.macro == 1.0) == (pred == gold));
  }
}

TEST_CASE("evaluation of clusterable embeddings") {
  const auto c = clustered(40, 3, 1);
  EvalConfig config;
  config.fractions = {0.5};
  config.repeats = 1;
  const auto report = evaluate(c.table, c.network, config);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].macro_f1 == 1.0);
  CHECK(report.entries[0].micro_f1 == 1.0);

  config.fractions = {0.3, 0.5};
  config.repeats = 20;
  const auto full = evaluate(c.table, c.network, config);
  CHECK(full.entries.size() == 40);
  CHECK(full.summary.size() == 2);
  CHECK(full.entries[20].fraction == 0.5);
  CHECK(full.entries[20].repeat == 0);
  for (const auto& s : full.summary) {
    CHECK(s.macro_mean >= 0.0);
    CHECK(s.macro_mean <= 1.0);
  }

  config.threads = 3;
  const auto threaded = evaluate(c.table, c.network, config);
  for (std::size_t i = 0; i < full.entries.size(); ++i) CHECK(threaded.entries[i].macro_f1 == full.entries[i].macro_f1);
}

TEST_CASE("mean of linked nodes as document vector") {
  auto c = clustered(20, 2, 2);
  // Second linked node carries the class signal, first is noise.
  Clustered mixed;
  Rng rng(3);
  for (const auto& [doc, label] : c.network.labels()) {
    const auto noise = "m" + std::to_string(doc);
    mixed.network.add_document(doc, {"w"});
    mixed.network.add_link(doc, {NodeRef{1, noise}, c.network.links().at(doc).front()});
    mixed.network.set_label(doc, label);
    mixed.table.add("1:" + noise, std::vector<double>{0.01 * rng.uniform(), 0.01 * rng.uniform(), 0.0});
    const auto token = c.network.links().at(doc).front().str();
    mixed.table.add(token, c.table.row(c.table.at(token)));
  }
  EvalConfig config;
  config.fractions = {0.5};
  config.repeats = 5;
  config.vectors = VectorSource::MeanOfLinkedNodes;
  for (const auto& e : evaluate(mixed.table, mixed.network, config).entries) CHECK(e.macro_f1 == 1.0);
}

TEST_CASE("report format") {
  EvalReport report;
  report.entries = {{0.1, 0, 0.5, 0.75}, {0.1, 1, 1.0, 1.0}};
  report.summary = {{0.1, 0.75, 0.353553, 0.875, 0.176777}};
  std::ostringstream out;
  write_report(report, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "fraction\trepeat\tmacro_f1\tmicro_f1");
  std::getline(in, line);
  CHECK(line.starts_with("0.1\t0\t0.5"));
  CHECK(out.str().find("fraction\tmacro_mean\tmacro_sd\tmicro_mean\tmicro_sd") != std::string::npos);
}

TEST_CASE("evaluation errors") {
  auto c = clustered(20, 2, 5);
  HeteroNetwork unlabeled(1);
  EvalConfig config;
  CHECK_THROWS(evaluate(c.table, unlabeled, config));
  EmbeddingTable empty(3);
  CHECK_THROWS(evaluate(empty, c.network, config));
}
