#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"
#include "unra/errors.hpp"
#include "unra/hsoftmax.hpp"
#include "unra/random.hpp"

using namespace unra;

namespace {

struct Fixture {
  EmbeddingModel model;
  std::vector<std::string> words;
};

// One input token "1:u" and a word tree over `freqs.size()` words.
Fixture make_fixture(std::size_t dim, const std::vector<std::uint64_t>& freqs, std::uint64_t seed, double scale) {
  std::map<std::string, std::uint64_t> counts;
  for (std::size_t i = 0; i < freqs.size(); ++i) counts[word_token("v" + std::to_string(i))] = freqs[i];
  const auto vocab = build_vocab_from_counts(counts, 1);
  Fixture f;
  for (const auto& e : vocab.entries()) f.words.push_back(e.token);
  std::vector<std::string> tokens{"1:u"};
  f.model = EmbeddingModel::zeros(dim, tokens, {build_huffman(vocab)});
  Rng rng(seed);
  for (auto& x : f.model.input.values()) x = scale * (2.0 * rng.uniform() - 1.0);
  for (auto& x : f.model.inner[kWordTree]) x = scale * (2.0 * rng.uniform() - 1.0);
  return f;
}

double total_probability(const Fixture& f) {
  double sum = 0.0;
  for (const auto& w : f.words) sum += std::exp(hs_log_prob(f.model, "1:u", kWordTree, w));
  return sum;
}

}  // namespace

TEST_CASE("sigmoid and log_sigmoid") {
  CHECK(sigmoid(0.0) == doctest::Approx(0.5));
  CHECK(log_sigmoid(0.0) == doctest::Approx(-std::numbers::ln2));
  CHECK(sigmoid(100.0) == sigmoid(kMaxScore));
  CHECK(std::isfinite(log_sigmoid(-1000.0)));
  for (double x : {-7.0, -0.3, 0.0, 2.5, 12.0}) CHECK(log_sigmoid(x) == doctest::Approx(std::log(sigmoid(x))).epsilon(1e-12));
}

TEST_CASE("zero inner vectors give -depth·ln2") {
  auto f = make_fixture(4, {4, 2, 1, 1}, 1, 0.3);
  std::fill(f.model.inner[kWordTree].begin(), f.model.inner[kWordTree].end(), 0.0);
  const auto& tree = f.model.trees[kWordTree];
  for (const auto& w : f.words) {
    const double depth = static_cast<double>(tree.code(tree.leaf(w)).size());
    CHECK(hs_log_prob(f.model, "1:u", kWordTree, w) == doctest::Approx(-depth * std::numbers::ln2).epsilon(1e-12));
  }
}

TEST_CASE("single-leaf tree has probability one") {
  auto f = make_fixture(3, {5}, 2, 0.5);
  CHECK(hs_log_prob(f.model, "1:u", kWordTree, f.words[0]) == 0.0);
  const auto before = f.model;
  hs_gradient_step(f.model, "1:u", kWordTree, f.words[0], 0.1, 1.0);
  CHECK(f.model == before);
}

TEST_CASE("probabilities over the leaves sum to one") {
  auto f = make_fixture(3, {1, 1, 1, 1}, 3, 0.5);
  CHECK(std::abs(total_probability(f) - 1.0) <= 1e-12);
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    Rng rng(100 + trial);
    std::vector<std::uint64_t> freqs(2 + rng.index(30));
    for (auto& x : freqs) x = 1 + rng.index(20);
    auto g = make_fixture(1 + rng.index(16), freqs, trial, 2.0);
    CHECK(std::abs(total_probability(g) - 1.0) <= 1e-9);
  }
}

TEST_CASE("argument checks and unknown tokens") {
  auto f = make_fixture(3, {2, 1}, 4, 0.1);
  CHECK_THROWS_AS(hs_gradient_step(f.model, "1:u", kWordTree, f.words[0], 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(hs_gradient_step(f.model, "1:u", kWordTree, f.words[0], 0.1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(hs_log_prob(f.model, "1:nobody", kWordTree, f.words[0]), UnknownTokenError);
  CHECK_THROWS_AS(hs_log_prob(f.model, "1:u", kWordTree, "w:nothing"), UnknownTokenError);
}

TEST_CASE("zero weight leaves the model untouched") {
  auto f = make_fixture(5, {3, 2, 2, 1}, 5, 0.4);
  const auto before = f.model;
  hs_gradient_step(f.model, "1:u", kWordTree, f.words[2], 0.5, 0.0);
  CHECK(f.model == before);
}

TEST_CASE("one small step raises the target probability") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    auto f = make_fixture(6, {5, 4, 3, 2, 1, 1}, 200 + trial, 0.5);
    const auto& w = f.words[trial % f.words.size()];
    const double before = hs_log_prob(f.model, "1:u", kWordTree, w);
    hs_gradient_step(f.model, "1:u", kWordTree, w, 0.01, 1.0);
    CHECK(hs_log_prob(f.model, "1:u", kWordTree, w) > before);
  }
}

TEST_CASE("update matches the finite-difference gradient") {
  // With accumulate-then-apply, a step of lr·weight moves every parameter by
  // exactly lr·weight·∂logP/∂θ evaluated before the step.
  const double lr = 1e-3;
  const double weight = 0.7;
  const double h = 1e-5;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    auto f = make_fixture(4, {6, 3, 2, 2, 1}, 300 + trial, 0.8);
    const auto& w = f.words[trial % f.words.size()];
    auto probe = f.model;
    auto logp = [&] { return weight * hs_log_prob(probe, "1:u", kWordTree, w); };
    std::vector<double> numeric_input, numeric_inner;
    for (auto& x : probe.input.values()) numeric_input.push_back(testing::central_difference(logp, x, h));
    for (auto& x : probe.inner[kWordTree]) numeric_inner.push_back(testing::central_difference(logp, x, h));

    auto stepped = f.model;
    hs_gradient_step(stepped, "1:u", kWordTree, w, lr, weight);
    auto check = [](double analytic, double numeric) {
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      CHECK(std::abs(analytic - numeric) / denom <= 1e-4);
    };
    for (std::size_t i = 0; i < numeric_input.size(); ++i)
      check((stepped.input.values()[i] - f.model.input.values()[i]) / lr, numeric_input[i]);
    for (std::size_t i = 0; i < numeric_inner.size(); ++i)
      check((stepped.inner[kWordTree][i] - f.model.inner[kWordTree][i]) / lr, numeric_inner[i]);
  }
}

TEST_CASE("span-level step reports the pre-update log probability") {
  auto f = make_fixture(4, {3, 2, 1}, 7, 0.6);
  const auto& tree = f.model.trees[kWordTree];
  const double expected = hs_log_prob(f.model, "1:u", kWordTree, f.words[1]);
  std::vector<double> scratch(4);
  double reported = 0.0;
  hs_gradient_step(f.model.input.row(0), tree, f.model.inner[kWordTree], tree.leaf(f.words[1]), 0.05, 1.0, scratch,
                   &reported);
  CHECK(reported == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("full softmax over path-sum scores") {
  auto f = make_fixture(3, {2, 1}, 8, 0.5);
  // Two leaves share one inner vertex v: scores are +<u,v> and -<u,v>.
  const auto u = f.model.input.row(0);
  const auto v = f.model.inner_row(kWordTree, 0);
  const double x = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  const auto& tree = f.model.trees[kWordTree];
  const auto& zero_leaf = tree.code(0)[0] == 0 ? f.words[0] : f.words[1];
  const double expected = x - std::log(std::exp(x) + std::exp(-x));
  CHECK(full_softmax_log_prob(f.model, "1:u", kWordTree, f.words, zero_leaf) == doctest::Approx(expected).epsilon(1e-12));

  std::fill(f.model.inner[kWordTree].begin(), f.model.inner[kWordTree].end(), 0.0);
  CHECK(full_softmax_log_prob(f.model, "1:u", kWordTree, f.words, f.words[0]) ==
        doctest::Approx(-std::numbers::ln2).epsilon(1e-12));
  const std::vector<std::string> one{f.words[0]};
  CHECK_THROWS(full_softmax_log_prob(f.model, "1:u", kWordTree, one, f.words[1]));
}

TEST_CASE("initialisation is bounded, deterministic and leaves inner vectors at zero") {
  const auto network = testing::tiny_network();
  ModelVocabularies vocabs;
  vocabs.words = build_vocab_from_counts({{"w:graph", 2}, {"w:text", 2}}, 1);
  vocabs.nodes.push_back(build_vocab_from_counts({{"1:p0", 3}, {"1:p1", 2}}, 1, VocabKind::Nodes, 1));
  vocabs.nodes.push_back(Vocabulary{});
  vocabs.labels = build_vocab_from_counts({{"c:x", 1}, {"c:y", 1}}, 1, VocabKind::Labels);
  const auto m1 = init_model(network, vocabs, build_trees(vocabs), 4, 9);
  const auto m2 = init_model(network, vocabs, build_trees(vocabs), 4, 9);
  const auto m3 = init_model(network, vocabs, build_trees(vocabs), 4, 10);
  CHECK(m1 == m2);
  CHECK_FALSE(m1 == m3);
  CHECK(m1.input.size() == network.node_count() + 2 + 2);
  CHECK(m1.input.token(0) == "1:p0");
  for (double x : m1.input.values()) CHECK(std::abs(x) <= 0.125);
  for (const auto& slot : m1.inner)
    for (double x : slot) CHECK(x == 0.0);
}
