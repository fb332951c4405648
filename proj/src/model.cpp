#include "unra/model.hpp"

#include <stdexcept>

#include "unra/random.hpp"

namespace unra {

ModelTrees build_trees(const ModelVocabularies& vocabs) {
  ModelTrees trees(vocabs.nodes.size() + 1);
  if (!vocabs.words.empty()) trees[kWordTree] = build_huffman(vocabs.words);
  for (std::size_t k = 0; k < vocabs.nodes.size(); ++k) {
    if (!vocabs.nodes[k].empty()) trees[k + 1] = build_huffman(vocabs.nodes[k]);
  }
  return trees;
}

EmbeddingModel EmbeddingModel::zeros(std::size_t dim, std::span<const std::string> tokens, ModelTrees trees) {
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  EmbeddingModel model;
  model.input = EmbeddingTable(dim);
  for (const auto& t : tokens) model.input.add(t);
  model.inner.resize(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) model.inner[i].assign(trees[i].inner_count() * dim, 0.0);
  model.trees = std::move(trees);
  return model;
}

EmbeddingModel init_model(const HeteroNetwork& network, const ModelVocabularies& vocabs, ModelTrees trees,
                          std::size_t dim, std::uint64_t seed) {
  std::vector<std::string> tokens;
  for (int k = 1; k <= network.num_sources(); ++k) {
    for (const auto& name : network.source(k).names()) tokens.push_back(NodeRef{k, name}.str());
  }
  for (const auto& e : vocabs.words.entries()) tokens.push_back(e.token);
  for (const auto& e : vocabs.labels.entries()) tokens.push_back(e.token);

  EmbeddingModel model = EmbeddingModel::zeros(dim, tokens, std::move(trees));
  Rng rng(mix_seed(seed, 0x1417ull));
  const double scale = 1.0 / static_cast<double>(dim);
  for (double& v : model.input.values()) v = (rng.uniform() - 0.5) * scale;
  return model;
}

}  // namespace unra
