#include <doctest.h>

#include "hatestack/error.hpp"
#include "hatestack/preprocess.hpp"
#include "hatestack/rng.hpp"

using namespace hatestack;

TEST_CASE("viability") {
  CHECK_FALSE(is_viable("ok"));
  CHECK(is_viable("this is fine"));
  CHECK_FALSE(is_viable("a b"));
  CHECK_FALSE(is_viable("https://example.com/a-b https://example.com/c"));
  CHECK(is_viable("read https://example.com/a-b"));
}

TEST_CASE("url titles") {
  CHECK(extract_url_titles("https://dailystormer.ws/britain-to-give-houses-and-jobs-to-returning-isis-fighters/") ==
        "britain to give houses and jobs to returning isis fighters");
  CHECK(extract_url_titles("see https://bit.ly/x4 now") == "see now");
  CHECK(extract_url_titles("no links here") == "no links here");
  CHECK(extract_url_titles("http://example.com") == "");
  CHECK(extract_url_titles("a http://news.example.org/world/Big_Story_Today/ b") == "a world big story today b");
}

TEST_CASE("url replacement spans stay within [a-z0-9 ]") {
  Rng rng(3);
  const std::string alphabet = "abcXYZ019-_./%?=&~";
  for (int trial = 0; trial < 200; ++trial) {
    std::string url = "https://host.example/";
    const auto len = rng.index(30);
    for (std::size_t i = 0; i < len; ++i) url += alphabet[rng.index(alphabet.size())];
    url += "/";
    for (char c : extract_url_titles(url)) {
      CHECK(((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' '));
    }
  }
}

TEST_CASE("clean_text examples") {
  const auto a = clean_text("1", "Hello, World!");
  CHECK(a.tokens == std::vector<std::string>{"hello", "world"});
  CHECK(a.punct_count == 2);
  CHECK(a.sentence_count == 1);

  const auto b = clean_text("2", "#Brexit means Brexit");
  CHECK(b.tokens == std::vector<std::string>{"brexit", "means", "brexit"});
  CHECK(b.hashtag_count == 1);

  const auto c = clean_text("3", "\xc3\x87\xc3\xa0 va bien");
  CHECK(c.tokens == std::vector<std::string>{"va", "bien"});

  const auto d = clean_text("4", "I don't know. Do you? Yes!");
  CHECK(d.tokens.at(1) == "don't");
  CHECK(d.sentence_count == 3);

  CHECK_THROWS_AS(clean_text("5", "!!! ???"), DataError);
}

TEST_CASE("clean_text is idempotent on its own output") {
  for (const char* text : {"Hello, World!", "They said: 'go away' ... fine?", "#Tag and http://x.com/a-b-c/ done.",
                           "Mixed CASE words, with; lots - of: punctuation!!"}) {
    const auto once = clean_text("x", text);
    const auto twice = clean_text("x", clean_string(once));
    CHECK(twice.tokens == once.tokens);
  }
}

TEST_CASE("punctuation accounting") {
  const std::string text = "Wait, what?! No... (really)";
  const auto cm = clean_text("x", text);
  std::size_t letters = 0, spaces = 0;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) ++letters;
    if (ch == ' ') ++spaces;
  }
  std::size_t kept = 0;
  for (const auto& t : cm.tokens) kept += t.size();
  CHECK(kept == letters);
  CHECK(static_cast<std::size_t>(cm.punct_count) == text.size() - letters - spaces);
}

TEST_CASE("optional english heuristic is off by default") {
  CHECK_FALSE(rejection_reason("\xd0\xbf\xd1\x80\xd0\xb8\xd0\xb2\xd0\xb5\xd1\x82 \xd0\xbc\xd0\xb8\xd1\x80").has_value());
  PreprocessOptions opt;
  opt.english_filter = true;
  CHECK(rejection_reason("\xd0\xbf\xd1\x80\xd0\xb8\xd0\xb2\xd0\xb5\xd1\x82 \xd0\xbc\xd0\xb8\xd1\x80", opt).has_value());
  CHECK(rejection_reason("ok").has_value());
}
