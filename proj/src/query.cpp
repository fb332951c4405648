#include "unra/query.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace unra {

namespace {

bool is_zero(std::span<const double> v) {
  return std::ranges::all_of(v, [](double x) { return x == 0.0; });
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  auto max_abs = [](std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  const double sa = max_abs(a);
  const double sb = max_abs(b);
  if (sa == 0.0 || sb == 0.0) throw std::invalid_argument("cosine: zero vector");
  // Rescaled so tiny or huge components neither underflow nor overflow.
  double d = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] / sa;
    const double y = b[i] / sb;
    d += x * y;
    na += x * x;
    nb += y * y;
  }
  return std::clamp(d / std::sqrt(na * nb), -1.0, 1.0);
}

bool TokenFilter::admits(std::string_view token) const {
  switch (token_kind(token)) {
    case TokenKind::Word:
      return words;
    case TokenKind::Label:
      return labels;
    case TokenKind::Node:
      return sources.contains(token_source(token));
  }
  return false;
}

QueryResult most_similar(const EmbeddingTable& table, std::span<const std::string> inputs,
                         const QueryOptions& options) {
  if (inputs.empty()) throw std::invalid_argument("query needs at least one input token");
  if (options.top_k < 1) throw std::invalid_argument("top_k must be >= 1");

  QueryResult result;
  result.query.assign(inputs.begin(), inputs.end());
  std::vector<double> query(table.dim(), 0.0);
  std::unordered_set<std::size_t> input_rows;
  for (const auto& token : inputs) {
    const std::size_t row = table.at(token);
    input_rows.insert(row);
    const auto v = table.row(row);
    for (std::size_t c = 0; c < query.size(); ++c) query[c] += v[c];
  }
  for (double& q : query) q /= static_cast<double>(inputs.size());
  if (is_zero(query)) throw std::runtime_error("query vector is zero");

  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t row = 0; row < table.size(); ++row) {
    const auto& token = table.token(row);
    if (!options.include_inputs && input_rows.contains(row)) continue;
    if (options.filter && !options.filter->admits(token)) continue;
    const auto v = table.row(row);
    if (is_zero(v)) {
      result.skipped.push_back(token);
      continue;
    }
    scored.emplace_back(token, cosine(query, v));
  }
  if (scored.empty()) throw std::runtime_error("query has no candidates");

  const std::size_t k = std::min(options.top_k, scored.size());
  auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
  scored.resize(k);
  result.ranked = std::move(scored);
  return result;
}

}  // namespace unra
