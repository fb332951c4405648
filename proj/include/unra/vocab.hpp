#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace unra {

enum class VocabKind { Words, Nodes, Labels };

// Token frequency table. Entries are ordered by descending frequency with
// ties broken lexicographically; an entry's index is its position.
class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t frequency = 0;
    bool operator==(const Entry&) const = default;
  };

  Vocabulary() = default;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::uint64_t total_count() const { return total_; }
  VocabKind kind() const { return kind_; }
  // Node source for VocabKind::Nodes, otherwise 0.
  int source_id() const { return source_id_; }

  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  std::optional<std::size_t> find(std::string_view token) const;
  std::uint64_t frequency(std::string_view token) const;

  bool operator==(const Vocabulary& other) const {
    return entries_ == other.entries_ && kind_ == other.kind_ && source_id_ == other.source_id_;
  }

 private:
  friend Vocabulary build_vocab_from_counts(const std::map<std::string, std::uint64_t>&, std::uint64_t, VocabKind, int);

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t total_ = 0;
  VocabKind kind_ = VocabKind::Words;
  int source_id_ = 0;
};

// Drops tokens with frequency < min_count. Throws std::invalid_argument for
// min_count < 1 and std::runtime_error when nothing survives.
Vocabulary build_vocab_from_counts(const std::map<std::string, std::uint64_t>& counts, std::uint64_t min_count,
                                   VocabKind kind = VocabKind::Words, int source_id = 0);
Vocabulary build_vocab(std::span<const std::string> tokens, std::uint64_t min_count,
                       VocabKind kind = VocabKind::Words, int source_id = 0);

// Huffman coding tree over a vocabulary, leaves indexed like the vocabulary.
// Inner vertices are numbered 0..leaf_count-2 in creation order, so the
// root is the highest index. Bit 0 marks the first (lighter) child taken
// from the merge queue and bit 1 the second.
class HuffmanTree {
 public:
  HuffmanTree() = default;

  std::size_t leaf_count() const { return tokens_.size(); }
  std::size_t inner_count() const { return tokens_.empty() ? 0 : tokens_.size() - 1; }
  bool empty() const { return tokens_.empty(); }

  const std::string& token(std::size_t leaf) const { return tokens_[leaf]; }
  std::optional<std::size_t> find(std::string_view token) const;
  // Throws UnknownTokenError.
  std::size_t leaf(std::string_view token) const;

  std::span<const std::uint32_t> path(std::size_t leaf) const { return paths_[leaf]; }
  std::span<const std::uint8_t> code(std::size_t leaf) const { return codes_[leaf]; }
  std::uint64_t frequency(std::size_t leaf) const { return frequencies_[leaf]; }

  // Σ frequency · code length, using the frequencies the tree was built from.
  std::uint64_t weighted_length() const;

 private:
  friend HuffmanTree build_huffman(const Vocabulary& vocab);

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> frequencies_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::uint32_t>> paths_;
  std::vector<std::vector<std::uint8_t>> codes_;
};

// Merges lowest combined frequency first, ties to the earlier-created vertex
// (leaves are created in vocabulary order). Throws on an empty vocabulary.
HuffmanTree build_huffman(const Vocabulary& vocab);

struct LeafPath {
  std::vector<std::uint32_t> vertices;  // inner-vertex indices, root first
  std::vector<std::uint8_t> bits;
};

LeafPath leaf_path(const HuffmanTree& tree, std::string_view token);

// "token<TAB>frequency<TAB>code" per line, code as a 0/1 string.
void write_vocab(const Vocabulary& vocab, const HuffmanTree& tree, std::ostream& out);

}  // namespace unra
