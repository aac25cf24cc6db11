#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hatestack {

using Json = nlohmann::json;

/// Versioned model envelope:
///   {"kind": str, "version": int, "params": {...}, "arrays": {name: base64}}
/// Arrays are little-endian IEEE-754 doubles, base64-encoded, so a
/// round-trip is bit-exact.
struct Envelope {
  std::string kind;
  int version = 1;
  Json params = Json::object();
  std::map<std::string, std::vector<double>> arrays;

  Json to_json() const;
  static Envelope from_json(const Json& j);

  /// Fetch an array, throwing DataError naming the envelope kind if absent.
  const std::vector<double>& array(const std::string& name) const;

  /// Throws DataError unless kind and version match.
  void expect(std::string_view expected_kind, int max_version) const;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string encode_f64(std::span<const double> values);
std::vector<double> decode_f64(std::string_view text);

/// Canonical text form used for files and digests (sorted keys, 1-space
/// indent, trailing newline).
std::string dump_canonical(const Json& j);

/// Write via a sibling temp file and rename, so readers never observe a
/// partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

std::string read_file(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

}  // namespace hatestack
