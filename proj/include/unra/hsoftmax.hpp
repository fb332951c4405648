#pragma once

#include <span>
#include <string>
#include <string_view>

#include "unra/model.hpp"
#include "unra/vocab.hpp"

namespace unra {

// Scores are clamped to this range before exponentiation.
inline constexpr double kMaxScore = 30.0;

double sigmoid(double x);
double log_sigmoid(double x);

// Hierarchical-softmax log probability of `leaf` given `input`. A vertex with
// bit 0 contributes log σ(x), bit 1 contributes log σ(-x), x = <input, inner>.
double hs_log_prob(std::span<const double> input, const HuffmanTree& tree, std::span<const double> inner,
                   std::size_t leaf);

// One ascent step on weight·log P(leaf | input). For each path vertex the
// error g = weight·lr·((1 - bit) - σ(x)) moves the inner vector by g·input;
// the input vector receives Σ g·inner (pre-update) after the path is done.
// `scratch` needs input.size() elements. Returns the log probability before
// the update when `log_prob` is requested.
void hs_gradient_step(std::span<double> input, const HuffmanTree& tree, std::span<double> inner, std::size_t leaf,
                      double lr, double weight, std::span<double> scratch, double* log_prob = nullptr);

// Token-level forms over a model. `tree` is a tree slot (kWordTree or a node
// source id). Throw UnknownTokenError for tokens outside the model or tree.
double hs_log_prob(const EmbeddingModel& model, std::string_view input_token, std::size_t tree,
                   std::string_view target_token);
void hs_gradient_step(EmbeddingModel& model, std::string_view input_token, std::size_t tree,
                      std::string_view target_token, double lr, double weight);

// Exact softmax over `candidates`, each scored by <input, Σ_t s_t inner_t>
// with s_t = +1 for bit 0 and -1 for bit 1 along the candidate's path.
// Test oracle only; training never calls it.
double full_softmax_log_prob(const EmbeddingModel& model, std::string_view input_token, std::size_t tree,
                             std::span<const std::string> candidates, std::string_view target_token);

}  // namespace unra
