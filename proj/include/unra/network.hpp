#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace unra {

using DocId = std::uint64_t;

// A node of one source, rendered as "<source>:<local_id>".
struct NodeRef {
  int source = 0;
  std::string local;

  std::string str() const;
  static NodeRef parse(std::string_view text);

  auto operator<=>(const NodeRef&) const = default;
};

// True when `local` is usable as a node id: non-empty, no whitespace, no ':'.
bool valid_local_id(std::string_view local);

// The homogeneous graph of one node source. Nodes are numbered densely in
// declaration order; edges are undirected and stored once.
class SourceGraph {
 public:
  std::uint32_t add_node(std::string_view local);
  // Returns false when the edge already existed.
  bool add_edge(std::uint32_t a, std::uint32_t b);

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::string& name(std::uint32_t node) const { return names_[node]; }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::uint32_t> find(std::string_view local) const;
  const std::vector<std::uint32_t>& neighbors(std::uint32_t node) const { return adjacency_[node]; }
  std::size_t degree(std::uint32_t node) const { return adjacency_[node].size(); }
  bool has_edge(std::uint32_t a, std::uint32_t b) const;
  // Each undirected edge once, endpoints in insertion order.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }

 private:
  static std::uint64_t edge_key(std::uint32_t a, std::uint32_t b);

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::unordered_set<std::uint64_t> edge_keys_;
};

// K node sources with their edges, the documents, the document-to-node
// links (the correlation index) and the partial document labels.
class HeteroNetwork {
 public:
  explicit HeteroNetwork(int num_sources = 0);

  int num_sources() const { return static_cast<int>(sources_.size()); }

  // Declares a node; returns its index within the source. Idempotent.
  std::uint32_t add_node(const NodeRef& node);
  // Declares both endpoints and adds the undirected edge (deduplicated).
  void add_edge(int source, std::string_view a, std::string_view b);
  void add_document(DocId doc, std::vector<std::string> words);
  // Declares every linked node. A document may be linked only once.
  void add_link(DocId doc, std::vector<NodeRef> nodes);
  // Labels are not checked against documents here; validate() reports them.
  void set_label(DocId doc, std::string label);

  const SourceGraph& source(int k) const;
  bool has_node(const NodeRef& node) const;

  const std::map<DocId, std::vector<std::string>>& documents() const { return documents_; }
  const std::map<DocId, std::vector<NodeRef>>& links() const { return links_; }
  const std::map<DocId, std::string>& labels() const { return labels_; }

  std::size_t node_count() const;
  std::size_t edge_count() const;

  // Semantic equality: same node sets, edge sets, documents, links, labels.
  // Node declaration order is not compared.
  bool operator==(const HeteroNetwork& other) const;

 private:
  void check_source(int k) const;

  std::vector<SourceGraph> sources_;
  std::map<DocId, std::vector<std::string>> documents_;
  std::map<DocId, std::vector<NodeRef>> links_;
  std::map<DocId, std::string> labels_;
};

struct SourceCounts {
  int source = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool operator==(const SourceCounts&) const = default;
};

struct ValidationReport {
  std::vector<SourceCounts> sources;
  std::size_t documents = 0;
  std::size_t links = 0;
  std::size_t labels = 0;
  std::vector<NodeRef> isolated_nodes;
  std::vector<DocId> unlinked_documents;
  std::vector<DocId> labels_on_missing_documents;

  // Hard violations; isolated nodes and unlinked documents are informational.
  std::vector<std::string> errors() const;
  bool ok() const { return errors().empty(); }

  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate(const HeteroNetwork& network);

struct NetworkPaths {
  std::vector<std::filesystem::path> edges;  // one per source, ordered by source id
  std::filesystem::path docs;
  std::filesystem::path links;
  std::optional<std::filesystem::path> labels;
};

// Parses the tab-separated corpus files. Throws ParseError for malformed
// lines and ValidationError for invariant violations.
HeteroNetwork load_network(const NetworkPaths& paths);

// Writes `network` so that load_network(paths) yields an equal network.
// Nodes that have neither edges nor links cannot be represented and are lost.
void save_network(const HeteroNetwork& network, const NetworkPaths& paths);

}  // namespace unra
