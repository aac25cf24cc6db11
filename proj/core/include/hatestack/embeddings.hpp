#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hatestack {

enum class EmbeddingSource { ExternalFile, HashedFallback };

/// id -> fixed-length vector. All vectors have length dim() and finite
/// components.
class EmbeddingTable {
 public:
  using Map = std::map<std::string, std::vector<double>, std::less<>>;

  explicit EmbeddingTable(int dim, EmbeddingSource source = EmbeddingSource::ExternalFile);

  int dim() const noexcept { return dim_; }
  EmbeddingSource source() const noexcept { return source_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const Map& vectors() const noexcept { return vectors_; }

  /// Throws DataError on a length mismatch, non-finite value or duplicate id.
  void insert(std::string id, std::vector<double> vec);
  const std::vector<double>* find(std::string_view id) const;

 private:
  int dim_;
  EmbeddingSource source_;
  Map vectors_;
};

/// Line 1 `#dim=<d>`, then `<id>\t<v1> <v2> ... <vd>` per record.
EmbeddingTable parse_embeddings(std::string_view text, std::string_view source = "<embeddings>");
EmbeddingTable load_embeddings(const std::filesystem::path& path);
std::string format_embeddings(const EmbeddingTable& table);
void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

/// Signed feature hashing of unigrams and bigrams into `dim` buckets,
/// L2-normalized; the zero vector for no tokens. dim must be >= 8.
std::vector<double> hashed_embedding(std::span<const std::string> tokens, int dim,
                                     std::uint64_t seed);

/// Source of message vectors for the pipeline.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dim() const = 0;
  virtual std::vector<double> embed(std::string_view id,
                                    std::span<const std::string> tokens) const = 0;
  /// "hashed:<dim>" or "external"; recorded in archive manifests.
  virtual std::string describe() const = 0;
};

class HashedEmbeddingProvider final : public EmbeddingProvider {
 public:
  HashedEmbeddingProvider(int dim, std::uint64_t seed = 0);
  int dim() const override { return dim_; }
  std::vector<double> embed(std::string_view id, std::span<const std::string> tokens) const override;
  std::string describe() const override;

 private:
  int dim_;
  std::uint64_t seed_;
};

/// Looks vectors up by message id; a missing id is a DataError.
class ExternalEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ExternalEmbeddingProvider(std::shared_ptr<const EmbeddingTable> table);
  int dim() const override { return table_->dim(); }
  std::vector<double> embed(std::string_view id, std::span<const std::string> tokens) const override;
  std::string describe() const override { return "external"; }

 private:
  std::shared_ptr<const EmbeddingTable> table_;
};

}  // namespace hatestack
