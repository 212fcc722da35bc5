#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qconcept {

// Malformed or out-of-contract input. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that is well formed but carries no information to work with
// (all-zero counts, zero denominators).
class DegenerateInputError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

// Data that cannot be represented by the requested construction. Maps to
// CLI exit code 3. `offenders` lists one human-readable line per culprit.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::string> offenders)
      : std::runtime_error(what), offenders_(std::move(offenders)) {}

  const std::vector<std::string>& offenders() const noexcept { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

class ProviderError : public std::runtime_error {
 public:
  ProviderError(const std::string& what, std::string phrase, std::string endpoint)
      : std::runtime_error(what), phrase_(std::move(phrase)), endpoint_(std::move(endpoint)) {}

  const std::string& phrase() const noexcept { return phrase_; }
  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string phrase_;
  std::string endpoint_;
};

}  // namespace qconcept
