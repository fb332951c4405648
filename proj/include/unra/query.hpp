#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "unra/embedding_table.hpp"

namespace unra {

double cosine(std::span<const double> a, std::span<const double> b);

// Namespaces a query may return. An unset filter admits every token.
struct TokenFilter {
  std::set<int> sources;
  bool words = false;
  bool labels = false;

  bool admits(std::string_view token) const;
};

struct QueryOptions {
  std::size_t top_k = 10;
  std::optional<TokenFilter> filter;
  bool include_inputs = false;
};

struct QueryResult {
  std::vector<std::string> query;
  std::vector<std::pair<std::string, double>> ranked;
  // Candidates with a zero vector, left out of the ranking.
  std::vector<std::string> skipped;
};

// Ranks candidates by cosine similarity to the mean of the input vectors.
// Ties go to the lexicographically smaller token. Throws UnknownTokenError
// for unknown inputs and std::runtime_error when no candidate remains.
QueryResult most_similar(const EmbeddingTable& table, std::span<const std::string> inputs,
                         const QueryOptions& options = {});

}  // namespace unra
