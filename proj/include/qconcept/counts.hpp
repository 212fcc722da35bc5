#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qconcept::counts {

struct CountEntry {
  std::string label;
  std::uint64_t count = 0;
};

/// Ordered (label, count) rows. Labels are unique; construction throws
/// DataError on a duplicate.
class CountTable {
 public:
  CountTable() = default;
  explicit CountTable(std::vector<CountEntry> entries);

  const std::vector<CountEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint64_t total() const noexcept;

 private:
  std::vector<CountEntry> entries_;
};

using ProbabilityVector = std::vector<double>;

/// Reads the `label,count` CSV. Errors name the 1-based file row (the
/// header is row 1).
CountTable load_count_table(const std::filesystem::path& path);
CountTable parse_count_table(std::istream& in);

/// count / total per entry, in table order. Throws DegenerateInputError
/// when the total is zero.
ProbabilityVector normalize(const CountTable& table);
ProbabilityVector normalize(const std::vector<std::uint64_t>& counts);

/// One two-by-two coincidence experiment; cell ij is left outcome i with
/// right outcome j.
struct CoincidenceCounts {
  std::uint64_t n11 = 0;
  std::uint64_t n12 = 0;
  std::uint64_t n21 = 0;
  std::uint64_t n22 = 0;

  std::uint64_t total() const noexcept { return n11 + n12 + n21 + n22; }
};

/// The four experiments AB, A'B, AB', A'B'.
struct CoincidenceSet {
  CoincidenceCounts ab;
  CoincidenceCounts apb;
  CoincidenceCounts abp;
  CoincidenceCounts apbp;
};

// JSON layout: {"AB":{"11":n,"12":n,"21":n,"22":n},"ApB":{...},"ABp":{...},"ApBp":{...}}
CoincidenceSet parse_coincidence_set(std::string_view json_text);
CoincidenceSet load_coincidence_set(const std::filesystem::path& path);

struct PhraseMatchConfig {
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct CorpusCount {
  std::uint64_t documents = 0;  // files containing the phrase at least once
  std::uint64_t scanned = 0;
  std::vector<std::string> warnings;  // sorted by path
};

/// Lower-cases ASCII letters and collapses whitespace runs to one space.
std::string normalize_text(std::string_view text);

/// Number of files under `root` (recursive) whose normalized text contains
/// the normalized phrase. Unreadable files are skipped and reported in
/// `warnings`; the result does not depend on scan order.
CorpusCount corpus_phrase_count(const std::filesystem::path& root, std::string_view phrase,
                                const PhraseMatchConfig& config = {});

struct ProviderConfig {
  std::string endpoint;  // http://host[:port][/path]
  std::string query_param = "q";
  double timeout_seconds = 10.0;
  unsigned retries = 2;
};

/// Environment variable consulted by the CLI for a default endpoint.
inline constexpr const char* kProviderEnvVar = "QCONCEPT_PROVIDER_URL";

std::string url_encode(std::string_view text);

/// GET <endpoint>?<param>=<phrase>; reads the integer field "count" of the
/// JSON body. Connection failures and 5xx/429 responses are retried up to
/// `retries` more times; anything else is a ProviderError.
std::uint64_t provider_count(const ProviderConfig& config, std::string_view phrase);

}  // namespace qconcept::counts
