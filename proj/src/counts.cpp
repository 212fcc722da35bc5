#include "qconcept/counts.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <iterator>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "qconcept/error.hpp"

namespace qconcept::counts {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_count_field(std::string_view field, std::size_t row) {
  field = trim(field);
  if (field.empty()) throw DataError(fmt::format("row {}: empty count", row));
  if (field.front() == '-') throw DataError(fmt::format("row {}: negative count '{}'", row, field));
  std::uint64_t value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(fmt::format("row {}: count '{}' is not a nonnegative integer", row, field));
  }
  return value;
}

std::uint64_t cell(const nlohmann::json& experiment, const char* experiment_name, const char* key) {
  if (!experiment.contains(key)) {
    throw DataError(fmt::format("coincidence set: {} is missing cell \"{}\"", experiment_name, key));
  }
  const auto& v = experiment.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw DataError(fmt::format("coincidence set: {}[\"{}\"] must be a nonnegative integer", experiment_name, key));
  }
  return v.get<std::uint64_t>();
}

CoincidenceCounts experiment(const nlohmann::json& root, const char* name) {
  if (!root.contains(name) || !root.at(name).is_object()) {
    throw DataError(fmt::format("coincidence set: missing experiment \"{}\"", name));
  }
  const auto& e = root.at(name);
  CoincidenceCounts c{cell(e, name, "11"), cell(e, name, "12"), cell(e, name, "21"), cell(e, name, "22")};
  if (c.total() == 0) {
    throw DegenerateInputError(fmt::format("coincidence set: experiment \"{}\" has no counts", name));
  }
  return c;
}

bool is_ws(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string read_file(const std::filesystem::path& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return {};
  }
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  ok = !in.bad();
  return text;
}

}  // namespace

CountTable::CountTable(std::vector<CountEntry> entries) : entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!seen.insert(entries_[i].label).second) {
      throw DataError(fmt::format("duplicate label '{}' at entry {}", entries_[i].label, i + 1));
    }
  }
}

std::uint64_t CountTable::total() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) sum += e.count;
  return sum;
}

CountTable parse_count_table(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  std::vector<CountEntry> entries;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1) {
      std::string_view header = trim(line);
      if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
      if (header != "label,count") {
        throw DataError(fmt::format("row 1: expected header 'label,count', got '{}'", header));
      }
      continue;
    }
    if (trim(line).empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw DataError(fmt::format("row {}: expected 'label,count'", row));
    std::string label{trim(std::string_view(line).substr(0, comma))};
    if (label.empty()) throw DataError(fmt::format("row {}: empty label", row));
    const auto count = parse_count_field(std::string_view(line).substr(comma + 1), row);
    if (!seen.insert(label).second) throw DataError(fmt::format("row {}: duplicate label '{}'", row, label));
    entries.push_back({std::move(label), count});
  }
  if (row == 0) throw DataError("row 1: missing header 'label,count'");
  return CountTable(std::move(entries));
}

CountTable load_count_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open count table '{}'", path.string()));
  try {
    return parse_count_table(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ProbabilityVector normalize(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw DegenerateInputError("cannot normalize: total count is zero");
  ProbabilityVector p;
  p.reserve(counts.size());
  const auto denom = static_cast<double>(total);
  for (auto c : counts) p.push_back(static_cast<double>(c) / denom);
  return p;
}

ProbabilityVector normalize(const CountTable& table) {
  std::vector<std::uint64_t> counts;
  counts.reserve(table.size());
  for (const auto& e : table.entries()) counts.push_back(e.count);
  return normalize(counts);
}

CoincidenceSet parse_coincidence_set(std::string_view json_text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("coincidence set is not valid JSON: {}", e.what()));
  }
  if (!root.is_object()) throw DataError("coincidence set must be a JSON object");
  return {experiment(root, "AB"), experiment(root, "ApB"), experiment(root, "ABp"), experiment(root, "ApBp")};
}

CoincidenceSet load_coincidence_set(const std::filesystem::path& path) {
  bool ok = true;
  auto text = read_file(path, ok);
  if (!ok) throw IoError(fmt::format("cannot open coincidence set '{}'", path.string()));
  return parse_coincidence_set(text);
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_ws(c)) {
      if (!in_space) out.push_back(' ');
      in_space = true;
      continue;
    }
    in_space = false;
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return out;
}

CorpusCount corpus_phrase_count(const std::filesystem::path& root, std::string_view phrase,
                                const PhraseMatchConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IoError(fmt::format("corpus root '{}' is not a readable directory", root.string()));
  }
  const std::string needle{trim(normalize_text(phrase))};
  if (needle.empty()) throw DataError("phrase is empty after normalization");

  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw IoError(fmt::format("cannot read corpus root '{}': {}", root.string(), ec.message()));
  for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) break;
    std::error_code type_ec;
    if (it->is_directory(type_ec)) continue;
    files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());

  unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(files.size(), 1)));

  std::vector<char> hit(files.size(), 0);
  std::vector<char> failed(files.size(), 0);
  const std::boyer_moore_horspool_searcher searcher(needle.begin(), needle.end());
  auto scan = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < files.size(); i += stride) {
      bool ok = true;
      const auto text = normalize_text(read_file(files[i], ok));
      if (!ok) {
        failed[i] = 1;
        continue;
      }
      hit[i] = std::search(text.begin(), text.end(), searcher) != text.end() ? 1 : 0;
    }
  };
  if (workers <= 1) {
    scan(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w, workers);
  }

  CorpusCount result;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (failed[i]) {
      result.warnings.push_back(fmt::format("skipped unreadable file '{}'", files[i].string()));
      continue;
    }
    ++result.scanned;
    result.documents += static_cast<std::uint64_t>(hit[i]);
  }
  return result;
}

}  // namespace qconcept::counts
