#include "hatestack/preprocess.hpp"

#include <algorithm>
#include <cctype>

#include "hatestack/error.hpp"

namespace hatestack {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_ascii_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool starts_with_scheme(std::string_view s) {
  auto ieq = [&](std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
  };
  return ieq("http://") || ieq("https://");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

/// Decode one code point starting at i; advances i. Invalid bytes yield
/// U+FFFD and advance by one.
char32_t next_codepoint(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  int len = 1;
  char32_t cp = b0;
  if (b0 >= 0xF0 && b0 < 0xF8) {
    len = 4;
    cp = b0 & 0x07;
  } else if (b0 >= 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if (b0 >= 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if (b0 >= 0x80) {
    ++i;
    return 0xFFFD;
  }
  if (len > 1) {
    if (i + static_cast<std::size_t>(len) > s.size()) {
      ++i;
      return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ++i;
        return 0xFFFD;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

bool is_letter_codepoint(char32_t cp) {
  if (cp < 0x80) return is_ascii_alpha(static_cast<char>(cp));
  return (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7) ||
         (cp >= 0x370 && cp <= 0x52F);
}

/// Slug words for one URL token, already normalized to [a-z0-9 ].
std::string url_title(std::string_view url) {
  std::size_t scheme_end = url.find("://");
  std::string_view rest = url.substr(scheme_end + 3);
  rest = rest.substr(0, rest.find_first_of("?#"));
  const std::size_t first = rest.find('/');
  const std::size_t last = rest.rfind('/');
  if (first == std::string_view::npos || first == last) return {};
  std::string_view slug = rest.substr(first + 1, last - first - 1);

  std::string out;
  bool pending_space = false;
  for (char c : slug) {
    if (is_alnum(c) && static_cast<unsigned char>(c) < 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      pending_space = true;
    }
  }
  return out;
}

template <typename Replace>
std::string rewrite_urls(std::string_view text, Replace replace) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const bool at_word_start = (i == 0 || is_space(text[i - 1]));
    if (at_word_start && starts_with_scheme(text.substr(i))) {
      std::size_t end = i;
      while (end < text.size() && !is_space(text[end])) ++end;
      std::string replacement = replace(text.substr(i, end - i));
      if (replacement.empty()) {
        if (!out.empty() && is_space(out.back())) {
          out.pop_back();
        } else if (end < text.size()) {
          ++end;  // URL leads the text: swallow the following space instead
        }
      }
      out += replacement;
      i = end;
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size();) {
    next_codepoint(text, i);
    ++n;
  }
  return n;
}

std::string extract_url_titles(std::string_view raw_text) {
  return rewrite_urls(raw_text, url_title);
}

std::string strip_urls(std::string_view raw_text) {
  return rewrite_urls(raw_text, [](std::string_view) { return std::string(); });
}

bool is_viable(std::string_view raw_text) {
  const std::string_view t = trim(raw_text);
  if (utf8_length(t) < 5) return false;

  int words = 0;
  bool in_word = false;
  for (char c : t) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  if (words < 2) return false;

  const std::string without_urls = strip_urls(t);
  for (std::size_t i = 0; i < without_urls.size();) {
    if (is_letter_codepoint(next_codepoint(without_urls, i))) return true;
  }
  return false;
}

double ascii_letter_ratio(std::string_view text) {
  std::size_t ascii = 0, total = 0;
  for (std::size_t i = 0; i < text.size();) {
    const char32_t cp = next_codepoint(text, i);
    if (cp < 0x80) {
      if (is_ascii_alpha(static_cast<char>(cp))) {
        ++ascii;
        ++total;
      }
    } else if (cp != 0xFFFD) {
      ++total;  // any non-ASCII code point counts against the ratio
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(ascii) / static_cast<double>(total);
}

std::optional<std::string> rejection_reason(std::string_view raw_text,
                                            const PreprocessOptions& options) {
  if (!is_viable(raw_text)) return "not viable: fewer than 2 words, 5 characters, or no letters";
  if (options.english_filter && ascii_letter_ratio(raw_text) < options.min_ascii_letter_ratio) {
    return "non-English heuristic: ASCII letter ratio below threshold";
  }
  return std::nullopt;
}

CleanMessage clean_text(std::string_view id, std::string_view raw_text) {
  CleanMessage cm;
  cm.id = std::string(id);
  cm.char_count_original = static_cast<int>(utf8_length(raw_text));

  std::string t = extract_url_titles(raw_text);

  std::string ascii;
  ascii.reserve(t.size());
  for (char c : t) {
    if (static_cast<unsigned char>(c) < 0x80) {
      ascii.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }

  // Runs of terminators, plus one for trailing unterminated content.
  int runs = 0;
  bool content_after_last_run = false;
  for (std::size_t i = 0; i < ascii.size(); ++i) {
    const char c = ascii[i];
    const bool term = (c == '.' || c == '!' || c == '?');
    if (term) {
      if (i == 0 || !(ascii[i - 1] == '.' || ascii[i - 1] == '!' || ascii[i - 1] == '?')) ++runs;
      content_after_last_run = false;
    } else if (is_alnum(c)) {
      content_after_last_run = true;
    }
  }
  cm.sentence_count = std::max(1, runs + (content_after_last_run && runs > 0 ? 1 : 0));

  std::string unwrapped;
  unwrapped.reserve(ascii.size());
  for (std::size_t i = 0; i < ascii.size(); ++i) {
    if (ascii[i] == '#' && i + 1 < ascii.size() && (is_alnum(ascii[i + 1]) || ascii[i + 1] == '_')) {
      ++cm.hashtag_count;
      continue;
    }
    unwrapped.push_back(ascii[i]);
  }

  std::string bare;
  bare.reserve(unwrapped.size());
  for (std::size_t i = 0; i < unwrapped.size(); ++i) {
    const char c = unwrapped[i];
    if (std::ispunct(static_cast<unsigned char>(c))) {
      const bool inner_apostrophe = c == '\'' && i > 0 && i + 1 < unwrapped.size() &&
                                    is_alnum(unwrapped[i - 1]) && is_alnum(unwrapped[i + 1]);
      if (inner_apostrophe) {
        bare.push_back(c);
      } else {
        ++cm.punct_count;
        bare.push_back(' ');
      }
    } else if (is_alnum(c)) {
      bare.push_back(c);
    } else {
      bare.push_back(' ');  // whitespace and control characters
    }
  }

  std::size_t i = 0;
  while (i < bare.size()) {
    while (i < bare.size() && bare[i] == ' ') ++i;
    std::size_t j = i;
    while (j < bare.size() && bare[j] != ' ') ++j;
    if (j > i) cm.tokens.emplace_back(bare.substr(i, j - i));
    i = j;
  }
  if (cm.tokens.empty()) throw DataError("message '" + cm.id + "' has no tokens after cleaning");
  return cm;
}

CleanMessage clean_text(const LabeledMessage& msg) { return clean_text(msg.id, msg.text); }

std::string clean_string(const CleanMessage& cm) {
  std::string out;
  for (const auto& t : cm.tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace hatestack
