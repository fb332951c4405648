#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "unra/network.hpp"
#include "unra/trainer.hpp"

namespace unra::testing {

// Fresh, empty scratch directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  std::filesystem::path base;
  if (const char* env = std::getenv("UNRA_TEST_TMP")) {
    base = env;
  } else {
    base = std::filesystem::temp_directory_path() / "unra_tests";
  }
  auto dir = base / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Two sources of four nodes, two documents over a six-word vocabulary, both
// documents labeled.
inline HeteroNetwork tiny_network() {
  HeteroNetwork net(2);
  net.add_edge(1, "p0", "p1");
  net.add_edge(1, "p1", "p2");
  net.add_edge(1, "p2", "p3");
  net.add_edge(1, "p3", "p0");
  net.add_edge(2, "a0", "a1");
  net.add_edge(2, "a1", "a2");
  net.add_edge(2, "a2", "a3");
  net.add_document(0, {"graph", "node", "walk", "graph", "node", "walk"});
  net.add_document(1, {"text", "word", "token", "text", "word", "token"});
  net.add_link(0, {NodeRef{1, "p0"}, NodeRef{2, "a0"}, NodeRef{2, "a1"}});
  net.add_link(1, {NodeRef{1, "p2"}, NodeRef{2, "a2"}, NodeRef{2, "a3"}});
  net.set_label(0, "x");
  net.set_label(1, "y");
  return net;
}

inline TrainConfig tiny_config() {
  TrainConfig c;
  c.dim = 8;
  c.window = 2;
  c.iterations = 20;
  c.walks_per_node = 2;
  c.walk_length = 6;
  c.min_count_words = 1;
  c.seed = 42;
  return c;
}

}  // namespace unra::testing
