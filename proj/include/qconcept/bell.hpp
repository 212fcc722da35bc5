#pragma once

#include <cstdint>
#include <string_view>

#include "qconcept/counts.hpp"

namespace qconcept::bell {

/// P(left_i, right_j). Cells are in [0,1] and sum to 1 within 1e-9.
struct JointDistribution {
  double p11 = 0.0;
  double p12 = 0.0;
  double p21 = 0.0;
  double p22 = 0.0;
};

/// Outcome probabilities of one single-sided experiment.
struct MarginalPair {
  double p1 = 0.0;
  double p2 = 0.0;

  static MarginalPair from_counts(std::uint64_t first, std::uint64_t second);
};

enum class ChshClass { satisfies, quantum_violation, superquantum };

std::string_view to_string(ChshClass c) noexcept;

struct ChshResult {
  double e_ab = 0.0;
  double e_apb = 0.0;
  double e_abp = 0.0;
  double e_apbp = 0.0;
  double s = 0.0;
  ChshClass classification = ChshClass::satisfies;
};

/// Throws DataError when a distribution breaks the JointDistribution invariants.
void validate(const JointDistribution& j);
void validate(const MarginalPair& m);

JointDistribution joint_from_counts(const counts::CoincidenceCounts& c);

/// E = p11 + p22 - p21 - p12.
double expectation(const JointDistribution& j);

/// S = E(A'B') + E(A'B) + E(AB') - E(AB). Bands are closed below: |S| = 2
/// satisfies, |S| = 2*sqrt(2) is still a quantum violation.
ChshResult chsh(double e_ab, double e_apb, double e_abp, double e_apbp);

ChshClass classify(double s) noexcept;

/// Separated-sources model: p_ij = a_i * b_j.
JointDistribution product_joint(const MarginalPair& a, const MarginalPair& b);

ChshResult chsh_from_set(const counts::CoincidenceSet& set);

/// CHSH over the four product joints built from single-sided marginals.
ChshResult chsh_from_marginals(const MarginalPair& a, const MarginalPair& a_prime,
                               const MarginalPair& b, const MarginalPair& b_prime);

}  // namespace qconcept::bell
