#include "unra/vocab.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "unra/errors.hpp"

namespace unra {

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::frequency(std::string_view token) const {
  auto i = find(token);
  return i ? entries_[*i].frequency : 0;
}

Vocabulary build_vocab_from_counts(const std::map<std::string, std::uint64_t>& counts, std::uint64_t min_count,
                                   VocabKind kind, int source_id) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  Vocabulary vocab;
  vocab.kind_ = kind;
  vocab.source_id_ = source_id;
  for (const auto& [token, freq] : counts) {
    if (freq >= min_count) vocab.entries_.push_back({token, freq});
  }
  if (vocab.entries_.empty()) throw std::runtime_error("vocabulary is empty after applying min_count");
  std::stable_sort(vocab.entries_.begin(), vocab.entries_.end(), [](const auto& a, const auto& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.token < b.token;
  });
  for (std::size_t i = 0; i < vocab.entries_.size(); ++i) {
    vocab.index_.emplace(vocab.entries_[i].token, i);
    vocab.total_ += vocab.entries_[i].frequency;
  }
  return vocab;
}

Vocabulary build_vocab(std::span<const std::string> tokens, std::uint64_t min_count, VocabKind kind,
                       int source_id) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& t : tokens) ++counts[t];
  return build_vocab_from_counts(counts, min_count, kind, source_id);
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> HuffmanTree::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t HuffmanTree::leaf(std::string_view token) const {
  if (auto i = find(token)) return *i;
  throw UnknownTokenError("token '" + std::string(token) + "' is not a leaf of this tree");
}

std::uint64_t HuffmanTree::weighted_length() const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) total += frequencies_[i] * codes_[i].size();
  return total;
}

HuffmanTree build_huffman(const Vocabulary& vocab) {
  if (vocab.empty()) throw std::invalid_argument("cannot build a Huffman tree over an empty vocabulary");
  const std::size_t n = vocab.size();
  HuffmanTree tree;
  tree.tokens_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    tree.tokens_.push_back(vocab.entry(i).token);
    tree.frequencies_.push_back(vocab.entry(i).frequency);
    tree.index_.emplace(vocab.entry(i).token, i);
  }
  tree.paths_.assign(n, {});
  tree.codes_.assign(n, {});
  if (n == 1) return tree;

  // Vertex ids: leaves 0..n-1, inner vertex j has id n+j. Ids double as
  // creation order for tie-breaking.
  using Item = std::pair<std::uint64_t, std::size_t>;  // (weight, id)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (std::size_t i = 0; i < n; ++i) queue.emplace(vocab.entry(i).frequency, i);

  std::vector<std::size_t> parent(2 * n - 1, 0);
  std::vector<std::uint8_t> bit(2 * n - 1, 0);
  for (std::size_t next = n; next < 2 * n - 1; ++next) {
    auto [w0, a] = queue.top();
    queue.pop();
    auto [w1, b] = queue.top();
    queue.pop();
    parent[a] = next;
    bit[a] = 0;
    parent[b] = next;
    bit[b] = 1;
    queue.emplace(w0 + w1, next);
  }

  const std::size_t root = 2 * n - 2;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    auto& path = tree.paths_[leaf];
    auto& code = tree.codes_[leaf];
    for (std::size_t v = leaf; v != root; v = parent[v]) {
      path.push_back(static_cast<std::uint32_t>(parent[v] - n));
      code.push_back(bit[v]);
    }
    std::reverse(path.begin(), path.end());
    std::reverse(code.begin(), code.end());
  }
  return tree;
}

LeafPath leaf_path(const HuffmanTree& tree, std::string_view token) {
  const std::size_t leaf = tree.leaf(token);
  auto p = tree.path(leaf);
  auto c = tree.code(leaf);
  return {{p.begin(), p.end()}, {c.begin(), c.end()}};
}

void write_vocab(const Vocabulary& vocab, const HuffmanTree& tree, std::ostream& out) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto& e = vocab.entry(i);
    out << e.token << '\t' << e.frequency << '\t';
    if (auto leaf = tree.find(e.token)) {
      for (auto b : tree.code(*leaf)) out << static_cast<int>(b);
    }
    out << '\n';
  }
}

}  // namespace unra
