#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "unra/network.hpp"

namespace unra {

// Planted-partition publication network: source 1 holds papers, source 2
// authors. Paper and author counts are totals, dealt round-robin to the
// communities.
struct SynthConfig {
  int communities = 2;
  int papers = 100;
  int authors = 60;
  // Fraction of each community's word pool drawn from a pool shared by all
  // communities. 0 gives disjoint vocabularies, 1 a single common pool.
  double overlap = 0.1;
  int pool_size = 50;
  int words_per_doc = 60;
  double paper_intra_prob = 0.15;
  double paper_inter_prob = 0.03;
  double author_intra_prob = 0.15;
  double author_inter_prob = 0.03;
  // Each paper links 1..max_authors_per_paper authors of its community.
  int max_authors_per_paper = 3;
  double label_fraction = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthNetwork {
  HeteroNetwork network;
  // Ground-truth community of every node token ("k:id").
  std::map<std::string, int> community;
};

SynthNetwork synthesize(const SynthConfig& config);

// Writes edges_1.tsv, edges_2.tsv, docs.tsv, links.tsv, labels.tsv and
// communities.tsv ("token<TAB>community") into `dir` and returns the paths.
NetworkPaths write_synth(const SynthNetwork& synth, const std::filesystem::path& dir);

}  // namespace unra
