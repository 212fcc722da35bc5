#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qconcept/counts.hpp"

namespace qconcept::stats {

enum class OccupancyModel { bose_einstein, maxwell_boltzmann, observed };

std::string_view to_string(OccupancyModel m) noexcept;

/// probs[n] is the probability that n of the N identical entities are in
/// state 1, n = 0..N.
struct OccupancyDistribution {
  unsigned n_total = 0;
  std::vector<double> probs;
  OccupancyModel model = OccupancyModel::observed;
};

inline constexpr unsigned kMaxBoltzmannN = 170;

/// C(N, n) as doubles via the multiplicative recurrence, N <= 170.
std::vector<double> binomial_row(unsigned n_total);

/// Exact C(N, n) for N <= 62.
std::uint64_t binomial_exact(unsigned n_total, unsigned n);

/// C(N, n) / 2^N.
OccupancyDistribution maxwell_boltzmann(unsigned n_total);

/// 1 / (N + 1) for every n.
OccupancyDistribution bose_einstein(unsigned n_total);

/// Normalized counts. The table must have N+1 rows; N defaults to size-1.
OccupancyDistribution observed_distribution(const counts::CountTable& table,
                                            std::optional<unsigned> n_total = std::nullopt);

double total_variation(std::span<const double> p, std::span<const double> q);
double total_variation(const OccupancyDistribution& p, const OccupancyDistribution& q);

/// KL(p || q); zero cells on either side get `smoothing` added before both
/// are renormalized.
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double smoothing = 1e-9);

enum class Verdict { bose_einstein, maxwell_boltzmann, indistinguishable };

std::string_view to_string(Verdict v) noexcept;

struct ComparisonReport {
  unsigned n_total = 0;
  double tv_bose_einstein = 0.0;
  double tv_maxwell_boltzmann = 0.0;
  double kl_bose_einstein = 0.0;
  double kl_maxwell_boltzmann = 0.0;
  Verdict verdict = Verdict::indistinguishable;
};

// TV values closer than this are reported as indistinguishable.
inline constexpr double kVerdictTieTolerance = 1e-12;

ComparisonReport closest_model(const OccupancyDistribution& observed);

}  // namespace qconcept::stats
