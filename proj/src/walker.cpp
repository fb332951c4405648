#include "unra/walker.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "unra/errors.hpp"
#include "unra/random.hpp"

namespace unra {

std::size_t WalkCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& w : walks) n += w.size();
  return n;
}

namespace {

void walk_from(const SourceGraph& graph, std::uint32_t start, int length, Rng& rng, std::vector<std::uint32_t>& out) {
  out.clear();
  out.reserve(static_cast<std::size_t>(length));
  out.push_back(start);
  std::uint32_t current = start;
  while (out.size() < static_cast<std::size_t>(length)) {
    const auto& nbrs = graph.neighbors(current);
    if (nbrs.empty()) break;
    current = nbrs[rng.index(nbrs.size())];
    out.push_back(current);
  }
}

}  // namespace

WalkCorpus generate_walks(const HeteroNetwork& network, int source_id, const WalkOptions& options) {
  if (source_id < 1 || source_id > network.num_sources()) {
    throw UnknownTokenError("unknown source id " + std::to_string(source_id));
  }
  if (options.walks_per_node < 1) throw std::invalid_argument("walks_per_node must be >= 1");
  if (options.walk_length < 1) throw std::invalid_argument("walk_length must be >= 1");

  const auto& graph = network.source(source_id);
  const std::size_t n = graph.node_count();
  WalkCorpus corpus;
  corpus.source_id = source_id;
  corpus.names = graph.names();
  corpus.walks_per_node = options.walks_per_node;
  corpus.walk_length = options.walk_length;
  corpus.walks.resize(n * static_cast<std::size_t>(options.walks_per_node));

  const std::uint64_t source_seed = mix_seed(options.seed, 0x57A1Cull, static_cast<std::uint64_t>(source_id));
  std::vector<std::uint32_t> order(n);
  for (int pass = 0; pass < options.walks_per_node; ++pass) {
    std::iota(order.begin(), order.end(), 0u);
    Rng shuffler(mix_seed(source_seed, static_cast<std::uint64_t>(pass), ~0ull));
    shuffler.shuffle(std::span<std::uint32_t>(order));

    auto* slots = corpus.walks.data() + static_cast<std::size_t>(pass) * n;
    auto work = [&, pass](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t start = order[i];
        Rng rng(mix_seed(source_seed, static_cast<std::uint64_t>(pass), start));
        walk_from(graph, start, options.walk_length, rng, slots[i]);
      }
    };

    const std::size_t threads = std::max(1, options.threads);
    if (threads == 1 || n < 2 * threads) {
      work(0, n);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n + threads - 1) / threads;
      for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b < e) pool.emplace_back(work, b, e);
      }
    }
  }
  return corpus;
}

std::map<NodeRef, std::uint64_t> corpus_node_frequencies(const WalkCorpus& corpus) {
  std::vector<std::uint64_t> counts(corpus.names.size(), 0);
  for (const auto& walk : corpus.walks) {
    for (auto v : walk) ++counts[v];
  }
  std::map<NodeRef, std::uint64_t> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) out.emplace(corpus.node(static_cast<std::uint32_t>(i)), counts[i]);
  }
  return out;
}

void write_corpus(const WalkCorpus& corpus, std::ostream& out) {
  const std::string prefix = std::to_string(corpus.source_id) + ":";
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      out << (i ? " " : "") << prefix << corpus.names[walk[i]];
    }
    out << '\n';
  }
}

}  // namespace unra
