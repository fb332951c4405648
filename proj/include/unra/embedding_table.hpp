#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace unra {

// Namespaced token spellings shared by every module.
//   nodes  "<source>:<id>"
//   words  "w:<word>"
//   labels "c:<label>"
enum class TokenKind { Node, Word, Label };

std::string word_token(std::string_view word);
std::string label_token(std::string_view label);
TokenKind token_kind(std::string_view token);
// Source id of a node token, 0 for words and labels.
int token_source(std::string_view token);

// Dense table of r-dimensional vectors keyed by token. Row order is the
// insertion order and is preserved by both file formats.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  // Appends a zero row. Throws std::invalid_argument on a duplicate token.
  std::size_t add(std::string token);
  std::size_t add(std::string token, std::span<const double> values);

  std::optional<std::size_t> find(std::string_view token) const;
  // Throws UnknownTokenError.
  std::size_t at(std::string_view token) const;

  const std::string& token(std::size_t row) const { return tokens_[row]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  bool operator==(const EmbeddingTable& other) const = default;

 private:
  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> values_;
};

// Lossless binary format:
//   "UNRA1", u32 token count, u32 dimension (little-endian), then per token
//   u32 byte length, the token bytes and `dimension` IEEE-754 doubles (LE).
void save_binary(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_binary(const std::filesystem::path& path);

// Text export: "<count> <dim>" then "<token> v1 ... vr" with `precision`
// fixed decimals. Lossy.
void save_text(const EmbeddingTable& table, const std::filesystem::path& path, int precision = 6);
EmbeddingTable load_text(const std::filesystem::path& path);

// Detects the format from the magic bytes.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

}  // namespace unra
