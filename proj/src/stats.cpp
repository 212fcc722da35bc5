#include "qconcept/stats.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qconcept/error.hpp"

namespace qconcept::stats {

namespace {

void check_n(unsigned n_total, unsigned limit) {
  if (n_total < 1 || n_total > limit) {
    throw DataError(fmt::format("N = {} outside the supported range 1..{}", n_total, limit));
  }
}

void check_same_shape(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw DataError(fmt::format("distributions have different lengths ({} vs {})", p.size(), q.size()));
  }
}

std::vector<double> smoothed(std::span<const double> p, double smoothing) {
  std::vector<double> out(p.begin(), p.end());
  for (auto& v : out) {
    if (v == 0.0) v = smoothing;
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace

std::string_view to_string(OccupancyModel m) noexcept {
  switch (m) {
    case OccupancyModel::bose_einstein:
      return "bose_einstein";
    case OccupancyModel::maxwell_boltzmann:
      return "maxwell_boltzmann";
    case OccupancyModel::observed:
      return "observed";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::bose_einstein:
      return "bose_einstein";
    case Verdict::maxwell_boltzmann:
      return "maxwell_boltzmann";
    case Verdict::indistinguishable:
      return "indistinguishable";
  }
  return "unknown";
}

std::vector<double> binomial_row(unsigned n_total) {
  check_n(n_total, kMaxBoltzmannN);
  std::vector<double> row(n_total + 1);
  row[0] = 1.0;
  for (unsigned n = 0; n < n_total / 2 + 1 && n < n_total; ++n) {
    row[n + 1] = row[n] * static_cast<double>(n_total - n) / static_cast<double>(n + 1);
  }
  for (unsigned n = 0; n <= n_total / 2; ++n) row[n_total - n] = row[n];
  return row;
}

std::uint64_t binomial_exact(unsigned n_total, unsigned n) {
  if (n_total > 62) throw DataError(fmt::format("exact binomial supports N <= 62, got {}", n_total));
  if (n > n_total) return 0;
  n = std::min(n, n_total - n);
  std::uint64_t c = 1;
  for (unsigned i = 1; i <= n; ++i) {
    // c * (N - n + i) is divisible by i at every step.
    c = c * (n_total - n + i) / i;
  }
  return c;
}

OccupancyDistribution maxwell_boltzmann(unsigned n_total) {
  auto row = binomial_row(n_total);
  for (auto& c : row) c = std::ldexp(c, -static_cast<int>(n_total));
  return {n_total, std::move(row), OccupancyModel::maxwell_boltzmann};
}

OccupancyDistribution bose_einstein(unsigned n_total) {
  if (n_total < 1) throw DataError("N must be at least 1");
  return {n_total, std::vector<double>(n_total + 1, 1.0 / static_cast<double>(n_total + 1)),
          OccupancyModel::bose_einstein};
}

OccupancyDistribution observed_distribution(const counts::CountTable& table, std::optional<unsigned> n_total) {
  if (table.size() < 2) throw DataError(fmt::format("observed table needs at least 2 rows, got {}", table.size()));
  const auto expected_rows = n_total ? static_cast<std::size_t>(*n_total) + 1 : table.size();
  if (table.size() != expected_rows) {
    throw DataError(fmt::format("N = {} needs {} rows, table has {}", expected_rows - 1, expected_rows, table.size()));
  }
  return {static_cast<unsigned>(table.size() - 1), counts::normalize(table), OccupancyModel::observed};
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  check_same_shape(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

double total_variation(const OccupancyDistribution& p, const OccupancyDistribution& q) {
  if (p.n_total != q.n_total) {
    throw DataError(fmt::format("cannot compare distributions with N = {} and N = {}", p.n_total, q.n_total));
  }
  return total_variation(p.probs, q.probs);
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double smoothing) {
  check_same_shape(p, q);
  const auto ps = smoothed(p, smoothing);
  const auto qs = smoothed(q, smoothing);
  double sum = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) sum += ps[i] * std::log(ps[i] / qs[i]);
  return sum;
}

ComparisonReport closest_model(const OccupancyDistribution& observed) {
  if (observed.model != OccupancyModel::observed) throw DataError("closest_model expects an observed distribution");
  const auto be = bose_einstein(observed.n_total);
  const auto mb = maxwell_boltzmann(observed.n_total);
  ComparisonReport r;
  r.n_total = observed.n_total;
  r.tv_bose_einstein = total_variation(observed, be);
  r.tv_maxwell_boltzmann = total_variation(observed, mb);
  r.kl_bose_einstein = kl_divergence(observed.probs, be.probs);
  r.kl_maxwell_boltzmann = kl_divergence(observed.probs, mb.probs);
  if (std::abs(r.tv_bose_einstein - r.tv_maxwell_boltzmann) <= kVerdictTieTolerance) {
    r.verdict = Verdict::indistinguishable;
  } else {
    r.verdict = r.tv_bose_einstein < r.tv_maxwell_boltzmann ? Verdict::bose_einstein : Verdict::maxwell_boltzmann;
  }
  return r;
}

}  // namespace qconcept::stats
