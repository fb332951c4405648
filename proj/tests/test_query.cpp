#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "unra/errors.hpp"
#include "unra/query.hpp"
#include "unra/random.hpp"

using namespace unra;

namespace {

EmbeddingTable table_of(std::initializer_list<std::pair<const char*, std::vector<double>>> rows) {
  EmbeddingTable t(rows.begin()->second.size());
  for (const auto& [token, v] : rows) t.add(token, v);
  return t;
}

}  // namespace

TEST_CASE("cosine examples") {
  const std::vector<double> a{1, 1}, b{1, 0}, c{0, 1}, z{0, 0};
  CHECK(cosine(a, a) == doctest::Approx(1.0));
  CHECK(cosine(b, c) == 0.0);
  CHECK(cosine(a, b) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK_THROWS_AS(cosine(a, z), std::invalid_argument);
  const std::vector<double> big{1e-300, 1e-300};
  CHECK(cosine(big, big) <= 1.0);
}

TEST_CASE("duplicated vector is the nearest neighbour") {
  const auto t = table_of({{"1:x", {0.3, -0.2, 0.9}}, {"2:y", {0.3, -0.2, 0.9}}, {"1:z", {-1, 0.5, 0.1}}});
  const std::vector<std::string> q{"1:x"};
  const auto r = most_similar(t, q, {.top_k = 1});
  REQUIRE(r.ranked.size() == 1);
  CHECK(r.ranked[0].first == "2:y");
  CHECK(r.ranked[0].second == doctest::Approx(1.0));
  CHECK(r.query == q);

  QueryOptions only_source_1{.top_k = 5, .filter = TokenFilter{.sources = {1}}};
  const auto filtered = most_similar(t, q, only_source_1);
  REQUIRE(filtered.ranked.size() == 1);
  CHECK(filtered.ranked[0].first == "1:z");
}

TEST_CASE("inputs are excluded unless requested") {
  const auto t = table_of({{"1:a", {1, 0}}, {"1:b", {0.9, 0.1}}, {"1:c", {0, 1}}});
  const std::vector<std::string> q{"1:a"};
  for (const auto& [token, score] : most_similar(t, q).ranked) CHECK(token != "1:a");
  const auto with = most_similar(t, q, {.include_inputs = true});
  CHECK(with.ranked[0].first == "1:a");
  CHECK(with.ranked.size() == 3);
}

TEST_CASE("multiple inputs query their mean vector") {
  const auto t = table_of({{"1:a", {1, 0}}, {"2:b", {0, 1}}, {"1:mid", {1, 1}}, {"1:far", {-1, -0.2}}});
  const std::vector<std::string> q{"1:a", "2:b"};
  const auto r = most_similar(t, q, {.top_k = 1});
  CHECK(r.ranked[0].first == "1:mid");
  CHECK(r.ranked[0].second == doctest::Approx(1.0));
}

TEST_CASE("ties break lexicographically and zero vectors are skipped") {
  const auto t = table_of({{"1:q", {1, 0}}, {"1:b", {2, 0}}, {"1:a", {3, 0}}, {"w:zero", {0, 0}}});
  const std::vector<std::string> q{"1:q"};
  const auto r = most_similar(t, q);
  REQUIRE(r.ranked.size() == 2);
  CHECK(r.ranked[0].first == "1:a");
  CHECK(r.ranked[1].first == "1:b");
  CHECK(r.skipped == std::vector<std::string>{"w:zero"});
}

TEST_CASE("filters select namespaces") {
  const auto t = table_of({{"1:a", {1, 0}}, {"2:b", {1, 0.1}}, {"w:x", {1, 0.2}}, {"c:l", {1, 0.3}}});
  const std::vector<std::string> q{"1:a"};
  auto tokens = [&](TokenFilter f) {
    std::vector<std::string> out;
    for (const auto& [token, score] : most_similar(t, q, {.filter = f}).ranked) out.push_back(token);
    std::ranges::sort(out);
    return out;
  };
  CHECK(tokens({.words = true}) == std::vector<std::string>{"w:x"});
  CHECK(tokens({.labels = true}) == std::vector<std::string>{"c:l"});
  CHECK(tokens({.sources = {2}, .labels = true}) == std::vector<std::string>{"2:b", "c:l"});
  CHECK_THROWS_AS(most_similar(t, q, {.filter = TokenFilter{.sources = {7}}}), std::runtime_error);
}

TEST_CASE("errors") {
  const auto t = table_of({{"1:a", {1, 0}}, {"1:b", {0, 1}}});
  const std::vector<std::string> unknown{"1:nope"};
  CHECK_THROWS_AS(most_similar(t, unknown), UnknownTokenError);
  const std::vector<std::string> q{"1:a"};
  CHECK_THROWS_AS(most_similar(t, q, {.top_k = 0}), std::invalid_argument);
}

TEST_CASE("ranking equals a brute-force scan") {
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    Rng rng(trial);
    EmbeddingTable t(4);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> v(4);
      for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
      t.add((i % 2 ? "1:n" : "2:n") + std::to_string(i), v);
    }
    const std::vector<std::string> q{t.token(rng.index(20))};
    const auto qv = t.row(t.at(q[0]));

    std::vector<std::pair<double, std::string>> oracle;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.token(i) == q[0]) continue;
      const auto v = t.row(i);
      double dot = 0, na = 0, nb = 0;
      for (int j = 0; j < 4; ++j) {
        dot += qv[j] * v[j];
        na += qv[j] * qv[j];
        nb += v[j] * v[j];
      }
      oracle.emplace_back(dot / std::sqrt(na * nb), t.token(i));
    }
    std::ranges::sort(oracle, [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });

    const auto r = most_similar(t, q, {.top_k = 7});
    REQUIRE(r.ranked.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(r.ranked[i].first == oracle[i].second);
      CHECK(r.ranked[i].second == doctest::Approx(oracle[i].first).epsilon(1e-12));
      if (i > 0) CHECK(r.ranked[i - 1].second >= r.ranked[i].second);
    }
    CHECK(most_similar(t, q, {.top_k = 100}).ranked.size() == 19);
  }
}
