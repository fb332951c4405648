#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "unra/network.hpp"

namespace unra {

// Random-walk corpus of one node source. Walks hold node indices local to
// the source; `names` maps them back to local ids.
struct WalkCorpus {
  int source_id = 0;
  std::vector<std::vector<std::uint32_t>> walks;
  std::vector<std::string> names;
  int walks_per_node = 0;
  int walk_length = 0;

  NodeRef node(std::uint32_t index) const { return NodeRef{source_id, names[index]}; }
  std::size_t token_count() const;
};

struct WalkOptions {
  int walks_per_node = 10;
  int walk_length = 40;
  std::uint64_t seed = 1;
  int threads = 1;
};

// Uniform random walks over source `source_id`. For each of the
// walks_per_node passes the node order is shuffled with a pass-specific
// generator, and each walk draws from its own generator derived from
// (seed, pass, start node), so the corpus does not depend on `threads`.
// A walk stops early only at a node without neighbors.
WalkCorpus generate_walks(const HeteroNetwork& network, int source_id, const WalkOptions& options);

// Occurrences of every node in the corpus.
std::map<NodeRef, std::uint64_t> corpus_node_frequencies(const WalkCorpus& corpus);

// One walk per line, space-separated "k:id" tokens.
void write_corpus(const WalkCorpus& corpus, std::ostream& out);

}  // namespace unra
