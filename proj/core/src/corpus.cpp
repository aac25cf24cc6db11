#include "hatestack/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "hatestack/error.hpp"
#include "hatestack/rng.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack {

Severity severity_from_code(int c) {
  if (c < 0 || c >= kNumClasses) throw DataError("invalid severity code " + std::to_string(c));
  return static_cast<Severity>(c);
}

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Clean:
      return "clean";
    case Severity::Offensive:
      return "offensive";
    case Severity::Hate:
      return "hate";
  }
  return "clean";
}

std::optional<Severity> parse_severity(std::string_view token) noexcept {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Severity s : kAllSeverities) {
    if (lower == to_string(s)) return s;
  }
  return std::nullopt;
}

Dataset::Dataset(std::vector<LabeledMessage> messages) : messages_(std::move(messages)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(messages_.size());
  for (const auto& m : messages_) {
    if (m.id.empty()) throw DataError("message with empty id");
    if (m.text.empty()) throw DataError("message '" + m.id + "' has empty text");
    if (!seen.insert(m.id).second) throw DataError("duplicate id '" + m.id + "'");
    if (m.label) ++class_counts_[code(*m.label)];
    ++platform_counts_[m.platform];
  }
}

bool Dataset::fully_labeled() const noexcept {
  return std::all_of(messages_.begin(), messages_.end(),
                     [](const LabeledMessage& m) { return m.label.has_value(); });
}

std::vector<Severity> Dataset::labels() const {
  std::vector<Severity> out;
  out.reserve(messages_.size());
  for (const auto& m : messages_) {
    if (!m.label) throw DataError("message '" + m.id + "' is unlabeled");
    out.push_back(*m.label);
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<LabeledMessage> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(messages_.at(i));
  return Dataset(std::move(out));
}

Dataset Dataset::filter_platform(std::string_view platform) const {
  std::vector<LabeledMessage> out;
  for (const auto& m : messages_) {
    if (m.platform == platform) out.push_back(m);
  }
  return Dataset(std::move(out));
}

Dataset Dataset::concat(std::span<const Dataset> parts) {
  std::vector<LabeledMessage> out;
  for (const auto& p : parts) out.insert(out.end(), p.messages().begin(), p.messages().end());
  return Dataset(std::move(out));
}

DatasetFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? DatasetFormat::Csv : DatasetFormat::Jsonl;
}

namespace {

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

Severity label_or_throw(std::string_view token, std::string_view source, std::size_t line) {
  auto s = parse_severity(token);
  if (!s) throw DataError(where(source, line) + "unknown label '" + std::string(token) + "'");
  return *s;
}

Dataset build(std::vector<LabeledMessage> msgs, std::vector<std::size_t> lines,
              std::string_view source) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (msgs[i].id.empty()) throw DataError(where(source, lines[i]) + "empty id");
    if (msgs[i].text.empty()) throw DataError(where(source, lines[i]) + "empty text");
    if (!seen.insert(msgs[i].id).second) {
      throw DataError(where(source, lines[i]) + "duplicate id '" + msgs[i].id + "'");
    }
  }
  return Dataset(std::move(msgs));
}

}  // namespace

Dataset parse_jsonl(std::string_view text, std::string_view source) {
  std::vector<LabeledMessage> msgs;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      throw DataError(where(source, line_no) + "malformed JSON record");
    }
    if (!j.is_object()) throw DataError(where(source, line_no) + "record is not an object");
    LabeledMessage m;
    for (const char* field : {"id", "platform", "text"}) {
      if (!j.contains(field) || !j[field].is_string()) {
        throw DataError(where(source, line_no) + "missing or non-string field '" + field + "'");
      }
    }
    m.id = j["id"].get<std::string>();
    m.platform = j["platform"].get<std::string>();
    m.text = j["text"].get<std::string>();
    if (j.contains("label") && !j["label"].is_null()) {
      if (!j["label"].is_string()) {
        throw DataError(where(source, line_no) + "field 'label' must be a string");
      }
      m.label = label_or_throw(j["label"].get<std::string>(), source, line_no);
    }
    msgs.push_back(std::move(m));
    lines.push_back(line_no);
  }
  if (msgs.empty()) throw DataError(std::string(source) + ": empty dataset");
  return build(std::move(msgs), std::move(lines), source);
}

namespace {

/// RFC-4180 record reader. Returns false at end of input.
bool next_csv_record(std::string_view text, std::size_t& pos, std::size_t& line,
                     std::vector<std::string>& fields, std::string_view source) {
  fields.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool in_quotes = false;
  bool quoted_field = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        in_quotes = false;
        ++pos;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"') {
      if (!field.empty() || quoted_field) {
        throw DataError(where(source, line) + "unexpected quote inside unquoted field");
      }
      in_quotes = quoted_field = true;
      ++pos;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      quoted_field = false;
      ++pos;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      fields.push_back(std::move(field));
      ++line;
      return true;
    } else {
      if (quoted_field) throw DataError(where(source, line) + "text after closing quote");
      field.push_back(c);
      ++pos;
    }
  }
  if (in_quotes) throw DataError(where(source, line) + "unterminated quoted field");
  fields.push_back(std::move(field));
  ++line;
  return true;
}

}  // namespace

Dataset parse_csv(std::string_view text, std::string_view source) {
  std::size_t pos = 0;
  std::size_t line = 1;
  std::vector<std::string> fields;
  if (!next_csv_record(text, pos, line, fields, source)) {
    throw DataError(std::string(source) + ": empty dataset");
  }
  int col_id = -1, col_platform = -1, col_text = -1, col_label = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& h = fields[i];
    if (h == "id") col_id = static_cast<int>(i);
    else if (h == "platform") col_platform = static_cast<int>(i);
    else if (h == "text") col_text = static_cast<int>(i);
    else if (h == "label") col_label = static_cast<int>(i);
  }
  if (col_id < 0 || col_platform < 0 || col_text < 0) {
    throw DataError(where(source, 1) + "header must name id,platform,text[,label]");
  }
  const std::size_t width = fields.size();

  std::vector<LabeledMessage> msgs;
  std::vector<std::size_t> lines;
  while (true) {
    const std::size_t record_line = line;
    if (!next_csv_record(text, pos, line, fields, source)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != width) {
      throw DataError(where(source, record_line) + "expected " + std::to_string(width) +
                      " fields, found " + std::to_string(fields.size()));
    }
    LabeledMessage m{fields[col_id], fields[col_platform], fields[col_text], std::nullopt};
    if (col_label >= 0 && !fields[col_label].empty()) {
      m.label = label_or_throw(fields[col_label], source, record_line);
    }
    msgs.push_back(std::move(m));
    lines.push_back(record_line);
  }
  if (msgs.empty()) throw DataError(std::string(source) + ": empty dataset");
  return build(std::move(msgs), std::move(lines), source);
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  if (!std::filesystem::exists(path)) throw DataError("dataset not found: " + path.string());
  const std::string text = read_file(path);
  return format == DatasetFormat::Csv ? parse_csv(text, path.string())
                                      : parse_jsonl(text, path.string());
}

std::string to_jsonl(const Dataset& d) {
  std::string out;
  for (const auto& m : d.messages()) {
    Json j{{"id", m.id}, {"platform", m.platform}, {"text", m.text}};
    if (m.label) j["label"] = std::string(to_string(*m.label));
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string to_csv(const Dataset& d) {
  std::string out = "id,platform,text,label\r\n";
  for (const auto& m : d.messages()) {
    out += csv_field(m.id) + "," + csv_field(m.platform) + "," + csv_field(m.text) + "," +
           (m.label ? std::string(to_string(*m.label)) : std::string()) + "\r\n";
  }
  return out;
}

void write_dataset(const Dataset& d, const std::filesystem::path& path) {
  write_file_atomic(path, format_for_path(path) == DatasetFormat::Csv ? to_csv(d) : to_jsonl(d));
}

namespace {

std::array<std::vector<std::size_t>, kNumClasses> indices_by_class(
    std::span<const Severity> labels) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[code(labels[i])].push_back(i);
  return by_class;
}

}  // namespace

SplitResult stratified_split(const Dataset& d, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac <= 1.0)) {
    throw UsageError("train_frac must lie in (0, 1]");
  }
  const auto labels = d.labels();
  auto by_class = indices_by_class(labels);
  Rng rng(seed);
  SplitResult result;
  std::vector<std::size_t> train, test;
  for (Severity s : kAllSeverities) {
    auto& idx = by_class[code(s)];
    if (idx.empty()) {
      result.warnings.push_back("class '" + std::string(to_string(s)) + "' has no members");
      continue;
    }
    rng.shuffle(std::span(idx));
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_frac * static_cast<double>(idx.size()) + 0.5));
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  result.train = d.subset(train);
  result.test = d.subset(test);
  return result;
}

std::vector<Fold> stratified_kfold(std::span<const Severity> labels, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("k-fold requires k >= 2");
  auto by_class = indices_by_class(labels);
  for (Severity s : kAllSeverities) {
    const auto n = by_class[code(s)].size();
    if (n > 0 && n < static_cast<std::size_t>(k)) {
      throw DataError("class '" + std::string(to_string(s)) + "' has " + std::to_string(n) +
                      " members, fewer than k=" + std::to_string(k));
    }
  }
  Rng rng(seed);
  std::vector<int> fold_of(labels.size(), -1);
  std::size_t offset = 0;
  for (auto& idx : by_class) {
    rng.shuffle(std::span(idx));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      fold_of[idx[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
    }
    offset = (offset + idx.size()) % static_cast<std::size_t>(k);
  }
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      (f == fold_of[i] ? folds[f].validation : folds[f].train).push_back(i);
    }
  }
  return folds;
}

std::vector<Fold> stratified_kfold(const Dataset& d, int k, std::uint64_t seed) {
  const auto labels = d.labels();
  return stratified_kfold(labels, k, seed);
}

std::vector<std::size_t> downsample_indices(std::span<const Severity> labels, double ratio,
                                            std::uint64_t seed) {
  if (!(ratio >= 1.0)) throw UsageError("downsample ratio must be >= 1");
  auto by_class = indices_by_class(labels);
  std::size_t smallest = 0;
  for (const auto& idx : by_class) {
    if (!idx.empty() && (smallest == 0 || idx.size() < smallest)) smallest = idx.size();
  }
  const auto cap = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(smallest) - 1e-9));
  Rng rng(seed);
  std::vector<std::size_t> kept;
  for (auto& idx : by_class) {
    if (idx.size() > cap) {
      rng.shuffle(std::span(idx));
      idx.resize(cap);
    }
    kept.insert(kept.end(), idx.begin(), idx.end());
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

Dataset downsample_majority(const Dataset& d, double ratio, std::uint64_t seed) {
  const auto labels = d.labels();
  return d.subset(downsample_indices(labels, ratio, seed));
}

}  // namespace hatestack
