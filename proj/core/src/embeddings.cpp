#include "hatestack/embeddings.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "hatestack/error.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack {

EmbeddingTable::EmbeddingTable(int dim, EmbeddingSource source) : dim_(dim), source_(source) {
  if (dim <= 0) throw DataError("embedding dim must be positive");
}

void EmbeddingTable::insert(std::string id, std::vector<double> vec) {
  if (static_cast<int>(vec.size()) != dim_) {
    throw DataError("embedding '" + id + "': expected " + std::to_string(dim_) + " values, found " +
                    std::to_string(vec.size()));
  }
  for (double v : vec) {
    if (!std::isfinite(v)) throw DataError("embedding '" + id + "': non-finite component");
  }
  auto [it, inserted] = vectors_.emplace(std::move(id), std::move(vec));
  if (!inserted) throw DataError("embedding: duplicate id '" + it->first + "'");
}

const std::vector<double>* EmbeddingTable::find(std::string_view id) const {
  auto it = vectors_.find(id);
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable parse_embeddings(std::string_view text, std::string_view source) {
  const std::string src(source);
  std::size_t pos = text.find('\n');
  std::string_view header = text.substr(0, pos);
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (!header.starts_with("#dim=")) throw DataError(src + ": missing '#dim=<d>' header");
  const std::string dim_text(header.substr(5));
  char* end = nullptr;
  const long dim = std::strtol(dim_text.c_str(), &end, 10);
  if (end == dim_text.c_str() || *end != '\0' || dim <= 0) {
    throw DataError(src + ": bad dim in header '" + std::string(header) + "'");
  }
  EmbeddingTable table(static_cast<int>(dim));

  std::size_t line_no = 1;
  while (pos != std::string_view::npos && pos + 1 <= text.size()) {
    const std::size_t start = pos + 1;
    pos = text.find('\n', start);
    std::string_view line = text.substr(start, pos == std::string_view::npos ? text.size() - start : pos - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw DataError(src + ":" + std::to_string(line_no) + ": expected '<id>\\t<values>'");
    }
    std::string id(line.substr(0, tab));
    const std::string values(line.substr(tab + 1));
    std::vector<double> vec;
    vec.reserve(static_cast<std::size_t>(dim));
    const char* p = values.c_str();
    while (true) {
      while (*p == ' ') ++p;
      if (*p == '\0') break;
      char* stop = nullptr;
      errno = 0;
      const double v = std::strtod(p, &stop);
      if (stop == p) {
        throw DataError(src + ":" + std::to_string(line_no) + ": embedding '" + id + "': bad number");
      }
      vec.push_back(v);
      p = stop;
    }
    table.insert(std::move(id), std::move(vec));
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("embedding file not found: " + path.string());
  return parse_embeddings(read_file(path), path.string());
}

std::string format_embeddings(const EmbeddingTable& table) {
  std::string out = "#dim=" + std::to_string(table.dim()) + "\n";
  char buf[32];
  for (const auto& [id, vec] : table.vectors()) {
    out += id;
    out.push_back('\t');
    for (std::size_t i = 0; i < vec.size(); ++i) {
      if (i) out.push_back(' ');
      std::snprintf(buf, sizeof buf, "%.17g", vec[i]);
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, format_embeddings(table));
}

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x100000001b3ULL);
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // final avalanche so low bits depend on every input byte
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

std::vector<double> hashed_embedding(std::span<const std::string> tokens, int dim,
                                     std::uint64_t seed) {
  if (dim < 8) throw UsageError("hashed embedding dim must be >= 8");
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  auto add = [&](std::string_view feature) {
    const std::uint64_t h = fnv1a(feature, seed);
    v[h % static_cast<std::uint64_t>(dim)] += (h >> 63) ? -1.0 : 1.0;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    add(tokens[i]);
    if (i + 1 < tokens.size()) add(tokens[i] + '\x1f' + tokens[i + 1]);
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

HashedEmbeddingProvider::HashedEmbeddingProvider(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 8) throw UsageError("hashed embedding dim must be >= 8");
}

std::vector<double> HashedEmbeddingProvider::embed(std::string_view,
                                                   std::span<const std::string> tokens) const {
  return hashed_embedding(tokens, dim_, seed_);
}

std::string HashedEmbeddingProvider::describe() const { return "hashed:" + std::to_string(dim_); }

ExternalEmbeddingProvider::ExternalEmbeddingProvider(std::shared_ptr<const EmbeddingTable> table)
    : table_(std::move(table)) {}

std::vector<double> ExternalEmbeddingProvider::embed(std::string_view id,
                                                     std::span<const std::string>) const {
  const auto* v = table_->find(id);
  if (!v) throw DataError("no embedding for message '" + std::string(id) + "'");
  return *v;
}

}  // namespace hatestack
