#include "qconcept/bell.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qconcept/error.hpp"

namespace qconcept::bell {

namespace {

constexpr double kSumTolerance = 1e-9;
// Slack for expectations that overshoot +-1 by rounding only.
constexpr double kRangeSlack = 1e-12;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

std::string_view to_string(ChshClass c) noexcept {
  switch (c) {
    case ChshClass::satisfies:
      return "satisfies";
    case ChshClass::quantum_violation:
      return "quantum_violation";
    case ChshClass::superquantum:
      return "superquantum";
  }
  return "unknown";
}

MarginalPair MarginalPair::from_counts(std::uint64_t first, std::uint64_t second) {
  const std::uint64_t total = first + second;
  if (total == 0) throw DegenerateInputError("marginal counts are both zero");
  const auto t = static_cast<double>(total);
  return {static_cast<double>(first) / t, static_cast<double>(second) / t};
}

void validate(const JointDistribution& j) {
  for (double p : {j.p11, j.p12, j.p21, j.p22}) {
    if (!is_probability(p)) throw DataError(fmt::format("joint probability {} outside [0,1]", p));
  }
  const double sum = j.p11 + j.p12 + j.p21 + j.p22;
  if (std::abs(sum - 1.0) > kSumTolerance) throw DataError(fmt::format("joint probabilities sum to {}", sum));
}

void validate(const MarginalPair& m) {
  if (!is_probability(m.p1) || !is_probability(m.p2)) {
    throw DataError(fmt::format("marginal ({}, {}) outside [0,1]", m.p1, m.p2));
  }
  if (std::abs(m.p1 + m.p2 - 1.0) > kSumTolerance) {
    throw DataError(fmt::format("marginal ({}, {}) does not sum to 1", m.p1, m.p2));
  }
}

JointDistribution joint_from_counts(const counts::CoincidenceCounts& c) {
  const auto total = c.total();
  if (total == 0) throw DegenerateInputError("coincidence counts are all zero");
  const auto t = static_cast<double>(total);
  return {static_cast<double>(c.n11) / t, static_cast<double>(c.n12) / t, static_cast<double>(c.n21) / t,
          static_cast<double>(c.n22) / t};
}

double expectation(const JointDistribution& j) { return j.p11 + j.p22 - j.p21 - j.p12; }

ChshClass classify(double s) noexcept {
  const double magnitude = std::abs(s);
  if (magnitude <= 2.0) return ChshClass::satisfies;
  if (magnitude <= 2.0 * std::sqrt(2.0)) return ChshClass::quantum_violation;
  return ChshClass::superquantum;
}

ChshResult chsh(double e_ab, double e_apb, double e_abp, double e_apbp) {
  for (double e : {e_ab, e_apb, e_abp, e_apbp}) {
    if (!std::isfinite(e) || std::abs(e) > 1.0 + kRangeSlack) {
      throw DataError(fmt::format("expectation value {} outside [-1,1]", e));
    }
  }
  ChshResult r{e_ab, e_apb, e_abp, e_apbp, e_apbp + e_apb + e_abp - e_ab, ChshClass::satisfies};
  r.classification = classify(r.s);
  return r;
}

JointDistribution product_joint(const MarginalPair& a, const MarginalPair& b) {
  return {a.p1 * b.p1, a.p1 * b.p2, a.p2 * b.p1, a.p2 * b.p2};
}

ChshResult chsh_from_set(const counts::CoincidenceSet& set) {
  return chsh(expectation(joint_from_counts(set.ab)), expectation(joint_from_counts(set.apb)),
              expectation(joint_from_counts(set.abp)), expectation(joint_from_counts(set.apbp)));
}

ChshResult chsh_from_marginals(const MarginalPair& a, const MarginalPair& a_prime, const MarginalPair& b,
                               const MarginalPair& b_prime) {
  for (const auto* m : {&a, &a_prime, &b, &b_prime}) validate(*m);
  return chsh(expectation(product_joint(a, b)), expectation(product_joint(a_prime, b)),
              expectation(product_joint(a, b_prime)), expectation(product_joint(a_prime, b_prime)));
}

}  // namespace qconcept::bell
