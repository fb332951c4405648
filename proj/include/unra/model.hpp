#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "unra/embedding_table.hpp"
#include "unra/network.hpp"
#include "unra/vocab.hpp"

namespace unra {

// Tree slot of the word tree; node source k uses slot k.
inline constexpr std::size_t kWordTree = 0;

// Frequency tables of one training run. A node source without nodes, or a
// network without documents or labels, leaves the matching entry empty.
struct ModelVocabularies {
  Vocabulary words;               // tokens "w:<word>"
  std::vector<Vocabulary> nodes;  // index k-1 for source k, tokens "k:<id>"
  Vocabulary labels;              // tokens "c:<label>"
};

// Huffman trees indexed by tree slot: [0] words, [k] node source k.
using ModelTrees = std::vector<HuffmanTree>;

ModelTrees build_trees(const ModelVocabularies& vocabs);

// Input vectors for every node, word and label token plus one inner-vertex
// table per tree.
struct EmbeddingModel {
  EmbeddingTable input;
  ModelTrees trees;
  std::vector<std::vector<double>> inner;  // per tree slot, inner_count × dim

  std::size_t dim() const { return input.dim(); }
  std::span<double> inner_row(std::size_t tree, std::size_t vertex) {
    return {inner[tree].data() + vertex * dim(), dim()};
  }
  std::span<const double> inner_row(std::size_t tree, std::size_t vertex) const {
    return {inner[tree].data() + vertex * dim(), dim()};
  }

  // Zero-initialised model over the given tokens and trees.
  static EmbeddingModel zeros(std::size_t dim, std::span<const std::string> tokens, ModelTrees trees);

  bool operator==(const EmbeddingModel& other) const {
    return input == other.input && inner == other.inner;
  }
};

// Input rows for every node of `network` (all sources, declaration order),
// then every vocabulary word, then every label, drawn uniformly from
// [-0.5/dim, 0.5/dim]. Inner vectors start at zero.
EmbeddingModel init_model(const HeteroNetwork& network, const ModelVocabularies& vocabs, ModelTrees trees,
                          std::size_t dim, std::uint64_t seed);

}  // namespace unra
