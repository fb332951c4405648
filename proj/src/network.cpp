#include "unra/network.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "unra/errors.hpp"

namespace unra {

std::string NodeRef::str() const { return std::to_string(source) + ":" + local; }

NodeRef NodeRef::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ValidationError("node reference '" + std::string(text) + "' is not of the form <source>:<id>");
  }
  int source = 0;
  const auto* first = text.data();
  const auto* last = text.data() + colon;
  auto [ptr, ec] = std::from_chars(first, last, source);
  if (ec != std::errc() || ptr != last || source < 1) {
    throw ValidationError("node reference '" + std::string(text) + "' has an invalid source id");
  }
  NodeRef ref{source, std::string(text.substr(colon + 1))};
  if (!valid_local_id(ref.local)) {
    throw ValidationError("node reference '" + std::string(text) + "' has an invalid local id");
  }
  return ref;
}

bool valid_local_id(std::string_view local) {
  if (local.empty()) return false;
  return std::none_of(local.begin(), local.end(), [](char c) {
    return c == ':' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

// ---------------------------------------------------------------------------
// SourceGraph

std::uint32_t SourceGraph::add_node(std::string_view local) {
  if (auto found = find(local)) return *found;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(local);
  index_.emplace(names_.back(), id);
  adjacency_.emplace_back();
  return id;
}

std::optional<std::uint32_t> SourceGraph::find(std::string_view local) const {
  auto it = index_.find(std::string(local));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t SourceGraph::edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

bool SourceGraph::add_edge(std::uint32_t a, std::uint32_t b) {
  if (!edge_keys_.insert(edge_key(a, b)).second) return false;
  edges_.emplace_back(a, b);
  adjacency_[a].push_back(b);
  if (a != b) adjacency_[b].push_back(a);
  return true;
}

bool SourceGraph::has_edge(std::uint32_t a, std::uint32_t b) const {
  return edge_keys_.contains(edge_key(a, b));
}

// ---------------------------------------------------------------------------
// HeteroNetwork

HeteroNetwork::HeteroNetwork(int num_sources) {
  if (num_sources < 0) throw std::invalid_argument("number of sources must be non-negative");
  sources_.resize(static_cast<std::size_t>(num_sources));
}

void HeteroNetwork::check_source(int k) const {
  if (k < 1 || k > num_sources()) {
    throw ValidationError("source id " + std::to_string(k) + " outside [1, " +
                          std::to_string(num_sources()) + "]");
  }
}

std::uint32_t HeteroNetwork::add_node(const NodeRef& node) {
  check_source(node.source);
  if (!valid_local_id(node.local)) {
    throw ValidationError("invalid node id '" + node.local + "'");
  }
  return sources_[static_cast<std::size_t>(node.source - 1)].add_node(node.local);
}

void HeteroNetwork::add_edge(int source, std::string_view a, std::string_view b) {
  const auto ia = add_node(NodeRef{source, std::string(a)});
  const auto ib = add_node(NodeRef{source, std::string(b)});
  sources_[static_cast<std::size_t>(source - 1)].add_edge(ia, ib);
}

void HeteroNetwork::add_document(DocId doc, std::vector<std::string> words) {
  if (!documents_.emplace(doc, std::move(words)).second) {
    throw ValidationError("duplicate document index " + std::to_string(doc));
  }
}

void HeteroNetwork::add_link(DocId doc, std::vector<NodeRef> nodes) {
  if (nodes.empty()) throw ValidationError("document " + std::to_string(doc) + " has an empty link list");
  if (links_.contains(doc)) throw ValidationError("duplicate link entry for document " + std::to_string(doc));
  for (const auto& node : nodes) add_node(node);
  links_.emplace(doc, std::move(nodes));
}

void HeteroNetwork::set_label(DocId doc, std::string label) { labels_[doc] = std::move(label); }

const SourceGraph& HeteroNetwork::source(int k) const {
  check_source(k);
  return sources_[static_cast<std::size_t>(k - 1)];
}

bool HeteroNetwork::has_node(const NodeRef& node) const {
  if (node.source < 1 || node.source > num_sources()) return false;
  return source(node.source).find(node.local).has_value();
}

std::size_t HeteroNetwork::node_count() const {
  std::size_t n = 0;
  for (const auto& s : sources_) n += s.node_count();
  return n;
}

std::size_t HeteroNetwork::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : sources_) n += s.edge_count();
  return n;
}

namespace {

std::set<std::string> node_set(const SourceGraph& g) { return {g.names().begin(), g.names().end()}; }

std::set<std::pair<std::string, std::string>> edge_set(const SourceGraph& g) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto [a, b] : g.edges()) {
    auto na = g.name(a);
    auto nb = g.name(b);
    if (nb < na) std::swap(na, nb);
    out.emplace(na, nb);
  }
  return out;
}

}  // namespace

bool HeteroNetwork::operator==(const HeteroNetwork& other) const {
  if (num_sources() != other.num_sources()) return false;
  for (std::size_t k = 0; k < sources_.size(); ++k) {
    if (node_set(sources_[k]) != node_set(other.sources_[k])) return false;
    if (edge_set(sources_[k]) != edge_set(other.sources_[k])) return false;
  }
  return documents_ == other.documents_ && links_ == other.links_ && labels_ == other.labels_;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> ValidationReport::errors() const {
  std::vector<std::string> out;
  for (auto doc : labels_on_missing_documents) {
    out.push_back("label on missing document " + std::to_string(doc));
  }
  return out;
}

ValidationReport validate(const HeteroNetwork& network) {
  ValidationReport report;
  std::vector<std::vector<bool>> linked(static_cast<std::size_t>(network.num_sources()));
  for (int k = 1; k <= network.num_sources(); ++k) {
    const auto& g = network.source(k);
    report.sources.push_back({k, g.node_count(), g.edge_count()});
    linked[static_cast<std::size_t>(k - 1)].assign(g.node_count(), false);
  }
  for (int k = 1; k <= network.num_sources(); ++k) {
    const auto& g = network.source(k);
    for (std::uint32_t v = 0; v < g.node_count(); ++v) {
      if (g.degree(v) == 0) report.isolated_nodes.push_back(NodeRef{k, g.name(v)});
    }
  }
  report.documents = network.documents().size();
  report.links = network.links().size();
  report.labels = network.labels().size();
  for (const auto& [doc, words] : network.documents()) {
    if (!network.links().contains(doc)) report.unlinked_documents.push_back(doc);
  }
  for (const auto& [doc, label] : network.labels()) {
    if (!network.documents().contains(doc)) report.labels_on_missing_documents.push_back(doc);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw std::runtime_error("cannot open " + path.string());
  }

  // Next non-blank line split on tabs. Returns false at end of file.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      if (line_.find_first_not_of(" \t") == std::string::npos) continue;
      fields.clear();
      std::string_view rest(line_);
      for (;;) {
        const auto tab = rest.find('\t');
        fields.push_back(rest.substr(0, tab));
        if (tab == std::string_view::npos) break;
        rest.remove_prefix(tab + 1);
      }
      return true;
    }
    return false;
  }

  std::string where() const { return path_.string() + ":" + std::to_string(line_no_); }

  [[noreturn]] void parse_error(const std::string& what) const { throw ParseError(where() + ": " + what); }
  [[noreturn]] void validation_error(const std::string& what) const {
    throw ValidationError(where() + ": " + what);
  }

  DocId doc_index(std::string_view text) const {
    DocId doc = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), doc);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
      parse_error("invalid document index '" + std::string(text) + "'");
    }
    return doc;
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(std::move(w));
  return words;
}

}  // namespace

HeteroNetwork load_network(const NetworkPaths& paths) {
  HeteroNetwork network(static_cast<int>(paths.edges.size()));
  std::vector<std::string_view> fields;

  for (std::size_t k = 0; k < paths.edges.size(); ++k) {
    LineReader reader(paths.edges[k]);
    while (reader.next(fields)) {
      if (fields.size() != 2) reader.parse_error("expected 2 fields, got " + std::to_string(fields.size()));
      if (!valid_local_id(fields[0]) || !valid_local_id(fields[1])) reader.validation_error("invalid node id");
      network.add_edge(static_cast<int>(k + 1), fields[0], fields[1]);
    }
  }

  {
    LineReader reader(paths.docs);
    while (reader.next(fields)) {
      if (fields.size() != 2) reader.parse_error("expected 2 fields, got " + std::to_string(fields.size()));
      const DocId doc = reader.doc_index(fields[0]);
      if (network.documents().contains(doc)) reader.validation_error("duplicate document index " + std::to_string(doc));
      network.add_document(doc, split_words(fields[1]));
    }
  }

  {
    LineReader reader(paths.links);
    while (reader.next(fields)) {
      if (fields.size() < 2) reader.parse_error("expected at least 2 fields, got " + std::to_string(fields.size()));
      const DocId doc = reader.doc_index(fields[0]);
      std::vector<NodeRef> nodes;
      try {
        for (std::size_t i = 1; i < fields.size(); ++i) {
          nodes.push_back(NodeRef::parse(fields[i]));
          if (nodes.back().source > network.num_sources()) {
            throw ValidationError("node " + nodes.back().str() + " references source " +
                                  std::to_string(nodes.back().source) + " but only " +
                                  std::to_string(network.num_sources()) + " sources are declared");
          }
        }
        network.add_link(doc, std::move(nodes));
      } catch (const ValidationError& e) {
        reader.validation_error(e.what());
      }
    }
  }

  if (paths.labels) {
    LineReader reader(*paths.labels);
    while (reader.next(fields)) {
      if (fields.size() != 2) reader.parse_error("expected 2 fields, got " + std::to_string(fields.size()));
      const DocId doc = reader.doc_index(fields[0]);
      if (fields[1].empty() || !valid_local_id(fields[1])) reader.validation_error("invalid label token");
      if (!network.documents().contains(doc)) {
        reader.validation_error("label on missing document " + std::to_string(doc));
      }
      if (network.labels().contains(doc)) reader.validation_error("duplicate label for document " + std::to_string(doc));
      network.set_label(doc, std::string(fields[1]));
    }
  }
  return network;
}

void save_network(const HeteroNetwork& network, const NetworkPaths& paths) {
  if (paths.edges.size() != static_cast<std::size_t>(network.num_sources())) {
    throw std::invalid_argument("save_network: one edge path per source required");
  }
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };
  for (int k = 1; k <= network.num_sources(); ++k) {
    auto out = open(paths.edges[static_cast<std::size_t>(k - 1)]);
    const auto& g = network.source(k);
    for (auto [a, b] : g.edges()) out << g.name(a) << '\t' << g.name(b) << '\n';
  }
  {
    auto out = open(paths.docs);
    for (const auto& [doc, words] : network.documents()) {
      out << doc << '\t';
      for (std::size_t i = 0; i < words.size(); ++i) out << (i ? " " : "") << words[i];
      out << '\n';
    }
  }
  {
    auto out = open(paths.links);
    for (const auto& [doc, nodes] : network.links()) {
      out << doc;
      for (const auto& n : nodes) out << '\t' << n.str();
      out << '\n';
    }
  }
  if (paths.labels) {
    auto out = open(*paths.labels);
    for (const auto& [doc, label] : network.labels()) out << doc << '\t' << label << '\n';
  } else if (!network.labels().empty()) {
    throw std::invalid_argument("save_network: network has labels but no labels path was given");
  }
}

}  // namespace unra
