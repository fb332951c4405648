#include "unra/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "unra/random.hpp"

namespace unra {

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  auto prob = [&](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
  };
  if (communities < 1) fail("communities must be >= 1");
  if (papers < communities) fail("need at least one paper per community");
  if (authors < communities) fail("need at least one author per community");
  if (pool_size < 1) fail("pool size must be >= 1");
  if (words_per_doc < 1) fail("words per document must be >= 1");
  if (max_authors_per_paper < 1) fail("max authors per paper must be >= 1");
  prob(overlap, "overlap");
  prob(paper_intra_prob, "paper intra probability");
  prob(paper_inter_prob, "paper inter probability");
  prob(author_intra_prob, "author intra probability");
  prob(author_inter_prob, "author inter probability");
  prob(label_fraction, "label fraction");
}

namespace {

void wire(HeteroNetwork& net, int source, const std::vector<std::string>& names, const std::vector<int>& community,
          double intra, double inter, Rng& rng) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      const double p = community[i] == community[j] ? intra : inter;
      if (rng.uniform() < p) net.add_edge(source, names[i], names[j]);
    }
  }
}

}  // namespace

SynthNetwork synthesize(const SynthConfig& config) {
  config.validate();
  const int C = config.communities;
  SynthNetwork out{HeteroNetwork(2), {}};
  auto& net = out.network;
  Rng rng(mix_seed(config.seed, 0x5E7Dull));

  std::vector<std::string> papers;
  std::vector<int> paper_comm;
  for (int i = 0; i < config.papers; ++i) {
    papers.push_back("p" + std::to_string(i));
    paper_comm.push_back(i % C);
  }
  std::vector<std::string> authors;
  std::vector<int> author_comm;
  std::vector<std::vector<std::size_t>> authors_of(static_cast<std::size_t>(C));
  for (int i = 0; i < config.authors; ++i) {
    authors.push_back("a" + std::to_string(i));
    author_comm.push_back(i % C);
    authors_of[static_cast<std::size_t>(i % C)].push_back(static_cast<std::size_t>(i));
  }

  for (std::size_t i = 0; i < papers.size(); ++i) net.add_node(NodeRef{1, papers[i]});
  for (std::size_t i = 0; i < authors.size(); ++i) net.add_node(NodeRef{2, authors[i]});
  wire(net, 1, papers, paper_comm, config.paper_intra_prob, config.paper_inter_prob, rng);
  wire(net, 2, authors, author_comm, config.author_intra_prob, config.author_inter_prob, rng);

  // Word pools: round(overlap·pool) shared words, the rest community-specific.
  const int shared = static_cast<int>(std::lround(config.overlap * config.pool_size));
  std::vector<std::vector<std::string>> pools(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) {
    auto& pool = pools[static_cast<std::size_t>(c)];
    for (int j = 0; j < shared; ++j) pool.push_back("s" + std::to_string(j));
    for (int j = shared; j < config.pool_size; ++j) pool.push_back("c" + std::to_string(c) + "w" + std::to_string(j));
  }

  for (std::size_t i = 0; i < papers.size(); ++i) {
    const auto c = static_cast<std::size_t>(paper_comm[i]);
    const auto doc = static_cast<DocId>(i);
    std::vector<std::string> words;
    for (int w = 0; w < config.words_per_doc; ++w) words.push_back(pools[c][rng.index(pools[c].size())]);
    net.add_document(doc, std::move(words));

    auto candidates = authors_of[c];
    rng.shuffle(std::span<std::size_t>(candidates));
    const auto max_k = std::min<std::size_t>(static_cast<std::size_t>(config.max_authors_per_paper), candidates.size());
    const std::size_t k = 1 + static_cast<std::size_t>(rng.index(max_k));
    std::vector<NodeRef> linked{NodeRef{1, papers[i]}};
    for (std::size_t a = 0; a < k; ++a) linked.push_back(NodeRef{2, authors[candidates[a]]});
    net.add_link(doc, std::move(linked));

    if (rng.uniform() < config.label_fraction) net.set_label(doc, "g" + std::to_string(c));
  }

  for (std::size_t i = 0; i < papers.size(); ++i) out.community.emplace(NodeRef{1, papers[i]}.str(), paper_comm[i]);
  for (std::size_t i = 0; i < authors.size(); ++i) out.community.emplace(NodeRef{2, authors[i]}.str(), author_comm[i]);
  return out;
}

NetworkPaths write_synth(const SynthNetwork& synth, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  NetworkPaths paths{{dir / "edges_1.tsv", dir / "edges_2.tsv"}, dir / "docs.tsv", dir / "links.tsv",
                     dir / "labels.tsv"};
  save_network(synth.network, paths);
  std::ofstream out(dir / "communities.tsv");
  if (!out) throw std::runtime_error("cannot write " + (dir / "communities.tsv").string());
  for (const auto& [token, c] : synth.community) out << token << '\t' << c << '\n';
  return paths;
}

}  // namespace unra
