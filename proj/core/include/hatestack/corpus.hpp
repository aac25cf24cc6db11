#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hatestack {

/// Ordinal severity. The enumerator values are the ordinal codes, so the
/// built-in comparisons give Clean < Offensive < Hate.
enum class Severity : int { Clean = 0, Offensive = 1, Hate = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr std::array<Severity, kNumClasses> kAllSeverities = {
    Severity::Clean, Severity::Offensive, Severity::Hate};

constexpr int code(Severity s) noexcept { return static_cast<int>(s); }
Severity severity_from_code(int code);

/// "clean" | "offensive" | "hate".
std::string_view to_string(Severity s) noexcept;

/// Case-insensitive parse of the three label tokens; nullopt otherwise.
std::optional<Severity> parse_severity(std::string_view token) noexcept;

struct LabeledMessage {
  std::string id;
  std::string platform;
  std::string text;
  std::optional<Severity> label;
};

/// Immutable, validated collection of messages. Ids are non-empty and unique,
/// texts are non-empty, and the tallies always match the messages.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<LabeledMessage> messages);

  const std::vector<LabeledMessage>& messages() const noexcept { return messages_; }
  const LabeledMessage& operator[](std::size_t i) const { return messages_[i]; }
  std::size_t size() const noexcept { return messages_.size(); }
  bool empty() const noexcept { return messages_.empty(); }

  /// Counts indexed by severity code; unlabeled messages are not counted.
  const std::array<std::size_t, kNumClasses>& class_counts() const noexcept {
    return class_counts_;
  }
  const std::map<std::string, std::size_t>& platform_counts() const noexcept {
    return platform_counts_;
  }

  bool fully_labeled() const noexcept;

  /// Labels in message order; throws DataError if any message is unlabeled.
  std::vector<Severity> labels() const;

  /// Messages at the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  Dataset filter_platform(std::string_view platform) const;

  /// Concatenation; throws DataError on id collision.
  static Dataset concat(std::span<const Dataset> parts);

 private:
  std::vector<LabeledMessage> messages_;
  std::array<std::size_t, kNumClasses> class_counts_{};
  std::map<std::string, std::size_t> platform_counts_;
};

enum class DatasetFormat { Jsonl, Csv };

/// `.csv` selects CSV, anything else JSONL.
DatasetFormat format_for_path(const std::filesystem::path& path);

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
inline Dataset load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, format_for_path(path));
}

/// Parsers over in-memory text; `source` prefixes error messages.
Dataset parse_jsonl(std::string_view text, std::string_view source = "<jsonl>");
Dataset parse_csv(std::string_view text, std::string_view source = "<csv>");

std::string to_jsonl(const Dataset& d);
std::string to_csv(const Dataset& d);
void write_dataset(const Dataset& d, const std::filesystem::path& path);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::string> warnings;
};

/// Per-class split keeping round-half-up(train_frac * class size) in train.
/// Both halves keep the input's relative message order.
SplitResult stratified_split(const Dataset& d, double train_frac, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// k stratified folds whose validation sets partition [0, labels.size()).
std::vector<Fold> stratified_kfold(std::span<const Severity> labels, int k,
                                   std::uint64_t seed);
std::vector<Fold> stratified_kfold(const Dataset& d, int k, std::uint64_t seed);

/// Indices (ascending) kept after capping every class at
/// ceil(ratio * smallest non-empty class).
std::vector<std::size_t> downsample_indices(std::span<const Severity> labels,
                                            double ratio, std::uint64_t seed);
Dataset downsample_majority(const Dataset& d, double ratio, std::uint64_t seed);

}  // namespace hatestack
