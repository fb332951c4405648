#include "unra/embedding_table.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "unra/errors.hpp"

namespace unra {

std::string word_token(std::string_view word) { return "w:" + std::string(word); }
std::string label_token(std::string_view label) { return "c:" + std::string(label); }

TokenKind token_kind(std::string_view token) {
  if (token.starts_with("w:")) return TokenKind::Word;
  if (token.starts_with("c:")) return TokenKind::Label;
  return TokenKind::Node;
}

int token_source(std::string_view token) {
  if (token_kind(token) != TokenKind::Node) return 0;
  int k = 0;
  for (char c : token) {
    if (c == ':') break;
    if (c < '0' || c > '9') return 0;
    k = k * 10 + (c - '0');
  }
  return k;
}

std::size_t EmbeddingTable::add(std::string token) {
  const std::size_t row = tokens_.size();
  if (!index_.emplace(token, row).second) throw std::invalid_argument("duplicate token '" + token + "'");
  tokens_.push_back(std::move(token));
  values_.resize(values_.size() + dim_, 0.0);
  return row;
}

std::size_t EmbeddingTable::add(std::string token, std::span<const double> values) {
  if (values.size() != dim_) throw std::invalid_argument("vector dimension mismatch for '" + token + "'");
  const std::size_t r = add(std::move(token));
  std::copy(values.begin(), values.end(), row(r).begin());
  return r;
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingTable::at(std::string_view token) const {
  if (auto r = find(token)) return *r;
  throw UnknownTokenError("unknown token '" + std::string(token) + "'");
}

bool EmbeddingTable::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Binary format

namespace {

constexpr std::array<char, 5> kMagic{'U', 'N', 'R', 'A', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                              static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open " + path.string());
  }

  void read(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("truncated file");
  }

  std::uint32_t u32() {
    std::array<unsigned char, 4> b{};
    read(reinterpret_cast<char*>(b.data()), b.size());
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  double f64() {
    std::array<unsigned char, 8> b{};
    read(reinterpret_cast<char*>(b.data()), b.size());
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return std::bit_cast<double>(v);
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  [[noreturn]] void fail(const std::string& what) const { throw std::runtime_error(path_.string() + ": " + what); }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace

void save_binary(const EmbeddingTable& table, const std::filesystem::path& path) {
  if (!table.all_finite()) throw std::invalid_argument("refusing to save a model with non-finite components");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(table.size()));
  put_u32(out, static_cast<std::uint32_t>(table.dim()));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& tok = table.token(i);
    put_u32(out, static_cast<std::uint32_t>(tok.size()));
    out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
    for (double v : table.row(i)) put_f64(out, v);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

EmbeddingTable load_binary(const std::filesystem::path& path) {
  BinaryReader in(path);
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  if (magic != kMagic) in.fail("bad magic, not a binary model file");
  const std::uint32_t count = in.u32();
  const std::uint32_t dim = in.u32();
  EmbeddingTable table(dim);
  std::vector<double> values(dim);
  std::string token;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = in.u32();
    if (len == 0 || len > (1u << 20)) in.fail("implausible token length at entry " + std::to_string(i));
    token.resize(len);
    in.read(token.data(), len);
    for (auto& v : values) v = in.f64();
    try {
      table.add(token, values);
    } catch (const std::invalid_argument& e) {
      in.fail(e.what());
    }
  }
  if (!in.at_end()) in.fail("trailing bytes after " + std::to_string(count) + " tokens");
  return table;
}

// ---------------------------------------------------------------------------
// Text format

void save_text(const EmbeddingTable& table, const std::filesystem::path& path, int precision) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  std::array<char, 64> buf{};
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.token(i);
    for (double v : table.row(i)) {
      std::snprintf(buf.data(), buf.size(), " %.*f", precision, v);
      out << buf.data();
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

EmbeddingTable load_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  auto fail = [&](const std::string& what) { throw std::runtime_error(path.string() + ": " + what); };
  std::string line;
  if (!std::getline(in, line)) fail("missing header");
  std::size_t count = 0;
  std::size_t dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> count >> dim)) fail("malformed header");
  }
  EmbeddingTable table(dim);
  std::vector<double> values(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (table.size() == count) fail("more rows than the declared " + std::to_string(count));
    std::istringstream row(line);
    std::string token;
    row >> token;
    for (auto& v : values) {
      if (!(row >> v)) fail("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " components");
    }
    std::string extra;
    if (row >> extra) fail("line " + std::to_string(line_no) + ": too many components");
    try {
      table.add(token, values);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (table.size() != count) {
    fail("header declares " + std::to_string(count) + " tokens but body has " + std::to_string(table.size()));
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() == 5 && magic == kMagic) return load_binary(path);
  return load_text(path);
}

}  // namespace unra
