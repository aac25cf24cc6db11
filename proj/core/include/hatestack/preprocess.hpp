#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hatestack/corpus.hpp"

namespace hatestack {

/// A message after the cleaning pipeline. Tokens contain only [a-z0-9'].
struct CleanMessage {
  std::string id;
  std::vector<std::string> tokens;
  int sentence_count = 1;
  int punct_count = 0;
  int hashtag_count = 0;
  int char_count_original = 0;
};

struct PreprocessOptions {
  /// Optional English heuristic; off by default (language filtering is
  /// expected upstream).
  bool english_filter = false;
  double min_ascii_letter_ratio = 0.6;
};

/// Number of UTF-8 code points (invalid bytes count as one each).
std::size_t utf8_length(std::string_view text);

/// At least 2 whitespace-separated words, at least 5 characters after
/// trimming, and at least one letter once URLs are removed.
bool is_viable(std::string_view raw_text);

/// Share of letters that are ASCII; 0 when the text has no letters.
double ascii_letter_ratio(std::string_view text);

/// Replace each http(s) URL with the words of its path slug: the part
/// between the first '/' after the host and the final '/', lowercased, with
/// every non-alphanumeric run turned into one space. URLs without a slug
/// disappear together with one adjacent space.
std::string extract_url_titles(std::string_view raw_text);

/// Text with every http(s) URL removed.
std::string strip_urls(std::string_view raw_text);

/// Why a message would be dropped before feature extraction, or nullopt if
/// it passes (viability, then the optional English heuristic).
std::optional<std::string> rejection_reason(std::string_view raw_text,
                                            const PreprocessOptions& options = {});

/// URL titles -> lowercase -> drop non-ASCII -> count sentences -> unwrap
/// hashtags -> count and drop punctuation -> whitespace tokenize.
/// Throws DataError when no token survives.
CleanMessage clean_text(const LabeledMessage& msg);
CleanMessage clean_text(std::string_view id, std::string_view raw_text);

/// Space-joined tokens.
std::string clean_string(const CleanMessage& cm);

}  // namespace hatestack
