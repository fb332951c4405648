#include "unra/hsoftmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "unra/errors.hpp"

namespace unra {

namespace {

double clamp_score(double x) { return std::clamp(x, -kMaxScore, kMaxScore); }

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

std::span<const double> tree_inner(const EmbeddingModel& model, std::size_t tree) {
  if (tree >= model.trees.size()) throw UnknownTokenError("unknown tree slot " + std::to_string(tree));
  return model.inner[tree];
}

}  // namespace

double sigmoid(double x) {
  x = clamp_score(x);
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  x = clamp_score(x);
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double hs_log_prob(std::span<const double> input, const HuffmanTree& tree, std::span<const double> inner,
                   std::size_t leaf) {
  const std::size_t dim = input.size();
  const auto path = tree.path(leaf);
  const auto code = tree.code(leaf);
  double total = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    const double x = dot(input.data(), inner.data() + path[t] * dim, dim);
    total += code[t] == 0 ? log_sigmoid(x) : log_sigmoid(-x);
  }
  return total;
}

void hs_gradient_step(std::span<double> input, const HuffmanTree& tree, std::span<double> inner, std::size_t leaf,
                      double lr, double weight, std::span<double> scratch, double* log_prob) {
  const std::size_t dim = input.size();
  const auto path = tree.path(leaf);
  const auto code = tree.code(leaf);
  double* acc = scratch.data();
  std::fill(acc, acc + dim, 0.0);
  double ll = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    double* out = inner.data() + path[t] * dim;
    const double x = clamp_score(dot(input.data(), out, dim));
    const double e = std::exp(-std::abs(x));
    const double f = x >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    if (log_prob) {
      // log σ(x) - log σ(-x) = x
      const double log_smaller = -std::log1p(e);
      const double log_pos = x >= 0 ? log_smaller : x + log_smaller;
      ll += code[t] == 0 ? log_pos : log_pos - x;
    }
    const double g = weight * lr * ((1.0 - code[t]) - f);
    for (std::size_t c = 0; c < dim; ++c) acc[c] += g * out[c];
    for (std::size_t c = 0; c < dim; ++c) out[c] += g * input[c];
  }
  for (std::size_t c = 0; c < dim; ++c) input[c] += acc[c];
  if (log_prob) *log_prob = ll;
}

double hs_log_prob(const EmbeddingModel& model, std::string_view input_token, std::size_t tree,
                   std::string_view target_token) {
  const auto inner = tree_inner(model, tree);
  const auto row = model.input.at(input_token);
  const auto leaf = model.trees[tree].leaf(target_token);
  return hs_log_prob(model.input.row(row), model.trees[tree], inner, leaf);
}

void hs_gradient_step(EmbeddingModel& model, std::string_view input_token, std::size_t tree,
                      std::string_view target_token, double lr, double weight) {
  tree_inner(model, tree);
  if (!(lr > 0)) throw std::invalid_argument("learning rate must be positive");
  if (!(weight >= 0)) throw std::invalid_argument("weight must be non-negative");
  const auto row = model.input.at(input_token);
  const auto leaf = model.trees[tree].leaf(target_token);
  if (weight == 0.0) return;
  std::vector<double> scratch(model.dim());
  hs_gradient_step(model.input.row(row), model.trees[tree], model.inner[tree], leaf, lr, weight, scratch);
}

double full_softmax_log_prob(const EmbeddingModel& model, std::string_view input_token, std::size_t tree,
                             std::span<const std::string> candidates, std::string_view target_token) {
  if (candidates.size() > 10000) throw std::invalid_argument("candidate set too large for the exact oracle");
  const auto inner = tree_inner(model, tree);
  const auto& t = model.trees[tree];
  const auto input = model.input.row(model.input.at(input_token));
  const std::size_t dim = model.dim();

  std::vector<double> scores;
  std::optional<std::size_t> target;
  std::vector<double> out(dim);
  for (const auto& cand : candidates) {
    const std::size_t leaf = t.leaf(cand);
    std::fill(out.begin(), out.end(), 0.0);
    const auto path = t.path(leaf);
    const auto code = t.code(leaf);
    for (std::size_t s = 0; s < path.size(); ++s) {
      const double sign = code[s] == 0 ? 1.0 : -1.0;
      for (std::size_t c = 0; c < dim; ++c) out[c] += sign * inner[path[s] * dim + c];
    }
    if (cand == target_token) target = scores.size();
    scores.push_back(dot(input.data(), out.data(), dim));
  }
  if (!target) throw UnknownTokenError("target '" + std::string(target_token) + "' is not in the candidate set");
  const double top = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - top);
  return scores[*target] - top - std::log(z);
}

}  // namespace unra
