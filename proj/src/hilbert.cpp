#include "qconcept/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "angles.hpp"
#include "qconcept/error.hpp"

namespace qconcept::hilbert {

namespace {

// Radicands this close below zero are rounding noise on boundary data.
constexpr double kRadicandSlack = 1e-14;
constexpr double kCosSlack = 1e-9;
constexpr double kZeroDeviation = 1e-12;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_probability(std::string_view field, std::size_t row, const char* column) {
  const std::string text{trim(field)};
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || !std::isfinite(v)) {
    throw DataError(fmt::format("row {}: {} '{}' is not a number", row, column, text));
  }
  return v;
}

void check_index(std::size_t k, std::size_t n, const char* what) {
  if (k >= n) throw DataError(fmt::format("{} index {} out of range (n = {})", what, k + 1, n));
}

}  // namespace

DisjunctionData prepare(DisjunctionData raw, std::vector<std::string>* warnings) {
  const std::size_t n = raw.labels.size();
  if (raw.mu_a.size() != n || raw.mu_b.size() != n || raw.mu_ab.size() != n) {
    throw DataError("disjunction data: label and probability columns differ in length");
  }
  if (n < 2) throw DataError(fmt::format("disjunction data needs at least 2 exemplars, got {}", n));
  std::unordered_set<std::string> seen;
  for (const auto& label : raw.labels) {
    if (!seen.insert(label).second) throw DataError(fmt::format("duplicate exemplar label '{}'", label));
  }

  const auto fix_column = [&](std::vector<double>& column, const char* name) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(column[k]) || column[k] < 0.0 || column[k] > 1.0) {
        throw DataError(fmt::format("{} of '{}' is {}, outside [0,1]", name, raw.labels[k], column[k]));
      }
    }
    const double sum = std::accumulate(column.begin(), column.end(), 0.0);
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw DataError(fmt::format("{} sums to {:.6f}; more than {} away from 1", name, sum, kSumTolerance));
    }
    if (sum != 1.0) {
      for (auto& v : column) v /= sum;
      if (warnings != nullptr) warnings->push_back(fmt::format("{} summed to {:.6f}; renormalized", name, sum));
    }
  };
  fix_column(raw.mu_a, "muA");
  fix_column(raw.mu_b, "muB");
  fix_column(raw.mu_ab, "muAB");
  return raw;
}

DisjunctionData parse_disjunction_csv(std::istream& in) {
  DisjunctionData d;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1) {
      std::string_view header = trim(line);
      if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
      if (header != "label,muA,muB,muAB") {
        throw DataError(fmt::format("row 1: expected header 'label,muA,muB,muAB', got '{}'", header));
      }
      continue;
    }
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (auto comma = rest.find(','); comma != std::string_view::npos; comma = rest.find(',')) {
      fields.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 4) throw DataError(fmt::format("row {}: expected 4 fields, got {}", row, fields.size()));
    const std::string label{trim(fields[0])};
    if (label.empty()) throw DataError(fmt::format("row {}: empty label", row));
    d.labels.push_back(label);
    d.mu_a.push_back(parse_probability(fields[1], row, "muA"));
    d.mu_b.push_back(parse_probability(fields[2], row, "muB"));
    d.mu_ab.push_back(parse_probability(fields[3], row, "muAB"));
  }
  if (row == 0) throw DataError("row 1: missing header 'label,muA,muB,muAB'");
  return d;
}

DisjunctionData load_disjunction_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open disjunction data '{}'", path.string()));
  try {
    return parse_disjunction_csv(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

double interference_deviation(const DisjunctionData& d, std::size_t k) {
  const double dev = d.mu_ab[k] - 0.5 * (d.mu_a[k] + d.mu_b[k]);
  // rounding noise from the average, e.g. 0.35 - (0.3 + 0.4) / 2
  return std::abs(dev) <= kZeroDeviation ? 0.0 : dev;
}

std::vector<double> lambda_magnitudes(const DisjunctionData& d) {
  std::vector<double> magnitudes(d.size());
  std::vector<std::string> offenders;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double dev = interference_deviation(d, k);
    const double radicand = d.mu_a[k] * d.mu_b[k] - dev * dev;
    if (radicand < -kRadicandSlack) {
      offenders.push_back(fmt::format("{} (k={}): radicand {:.6g}", d.labels[k], k + 1, radicand));
      continue;
    }
    magnitudes[k] = std::sqrt(std::max(0.0, radicand));
  }
  if (!offenders.empty()) {
    const auto what =
        fmt::format("{} exemplar(s) deviate from the classical average by more than sqrt(muA muB)", offenders.size());
    throw InfeasibleError(what, std::move(offenders));
  }
  return magnitudes;
}

std::size_t dominant_index(std::span<const double> magnitudes) {
  if (magnitudes.empty()) throw DataError("dominant_index of an empty vector");
  return static_cast<std::size_t>(std::max_element(magnitudes.begin(), magnitudes.end()) - magnitudes.begin());
}

std::vector<int> assign_signs(std::span<const double> magnitudes, std::size_t m) {
  const std::size_t n = magnitudes.size();
  if (n == 0) return {};
  check_index(m, n, "dominant");
  std::vector<std::size_t> order;
  order.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (k != m) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t lhs, std::size_t rhs) { return magnitudes[lhs] > magnitudes[rhs]; });

  std::vector<int> signs(n, 1);
  double running = magnitudes[m];
  for (std::size_t k : order) {
    if (running - magnitudes[k] >= 0.0) {
      signs[k] = -1;
      running -= magnitudes[k];
    } else {
      signs[k] = 1;
      running += magnitudes[k];
    }
  }
  return signs;
}

double compute_cm(const DisjunctionData& d, std::span<const double> signed_lambda, std::size_t m) {
  check_index(m, d.size(), "dominant");
  if (signed_lambda.size() != d.size()) throw DataError("lambda vector length differs from the data");
  const double denom = d.mu_a[m] * d.mu_b[m];
  if (!(denom > 0.0)) {
    throw DegenerateInputError(
        fmt::format("c_m undefined: muA * muB of dominant exemplar '{}' is zero", d.labels[m]));
  }
  double rest = 0.0;
  for (std::size_t k = 0; k < signed_lambda.size(); ++k) {
    if (k != m) rest += signed_lambda[k];
  }
  const double dev = interference_deviation(d, m);
  const double cm = std::sqrt((rest * rest + dev * dev) / denom);
  if (cm > 1.0 + kVerifyTolerance) {
    throw InfeasibleError(fmt::format("c_m = {:.6f} exceeds 1", cm),
                          {fmt::format("{} (k={}): c_m {:.6f}", d.labels[m], m + 1, cm)});
  }
  return std::min(cm, 1.0);
}

std::vector<double> compute_phases(const DisjunctionData& d, std::span<const int> signs, double cm,
                                   std::size_t m) {
  const std::size_t n = d.size();
  check_index(m, n, "dominant");
  if (signs.size() != n) throw DataError("sign vector length differs from the data");
  std::vector<double> beta(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ck = k == m ? cm : 1.0;
    const double product = d.mu_a[k] * d.mu_b[k];
    const double dev = interference_deviation(d, k);
    if (product == 0.0) {
      if (std::abs(dev) > kZeroDeviation) {
        throw DegenerateInputError(
            fmt::format("'{}' (k={}) has muA * muB = 0 but a nonzero interference deviation", d.labels[k], k + 1));
      }
      beta[k] = 90.0;
      continue;
    }
    const double denom = 2.0 * ck * std::sqrt(product);
    double arg = 0.0;
    if (denom > 0.0) {
      arg = 2.0 * dev / denom;
    } else if (std::abs(dev) > kZeroDeviation) {
      throw InfeasibleError("zero overlap factor with nonzero deviation",
                            {fmt::format("{} (k={})", d.labels[k], k + 1)});
    }
    if (std::abs(arg) > 1.0 + kCosSlack) {
      throw InfeasibleError(fmt::format("phase of '{}' needs cos = {:.6f}", d.labels[k], arg),
                            {fmt::format("{} (k={}): cos argument {:.6f}", d.labels[k], k + 1, arg)});
    }
    arg = std::clamp(arg, -1.0, 1.0);
    beta[k] = (signs[k] < 0 ? -1.0 : 1.0) * detail::acos_deg(arg);
  }
  return beta;
}

DisjunctionModel build_model(const DisjunctionData& d) {
  const std::size_t n = d.size();
  if (n == 0) throw DataError("cannot build a model from empty data");

  DisjunctionModel model;
  model.labels = d.labels;
  const auto magnitudes = lambda_magnitudes(d);
  model.m = dominant_index(magnitudes);
  model.signs = assign_signs(magnitudes, model.m);
  model.lambda.resize(n);
  for (std::size_t k = 0; k < n; ++k) model.lambda[k] = model.signs[k] * magnitudes[k];
  model.c_m = compute_cm(d, model.lambda, model.m);
  model.beta_deg = compute_phases(d, model.signs, model.c_m, model.m);

  model.vec_a.assign(n + 1, {0.0, 0.0});
  model.vec_b.assign(n + 1, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    model.vec_a[k] = std::sqrt(d.mu_a[k]);
    const auto [c, s] = detail::cos_sin_deg(model.beta_deg[k]);
    const double ck = k == model.m ? model.c_m : 1.0;
    const double amplitude = ck * std::sqrt(d.mu_b[k]);
    model.vec_b[k] = {amplitude * c, amplitude * s};
  }
  model.vec_b[n] = std::sqrt(d.mu_b[model.m] * (1.0 - model.c_m * model.c_m));
  return model;
}

std::complex<double> inner_product(const Vector& lhs, const Vector& rhs) {
  if (lhs.size() != rhs.size()) throw DataError("inner product of vectors with different dimensions");
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t i = 0; i < lhs.size(); ++i) sum += std::conj(lhs[i]) * rhs[i];
  return sum;
}

double norm(const Vector& v) {
  double sum = 0.0;
  for (const auto& z : v) sum += std::norm(z);
  return std::sqrt(sum);
}

double reconstruct_disjunction(const DisjunctionModel& model, std::size_t k) {
  const std::size_t n = model.size();
  check_index(k, n, "exemplar");
  double value = std::norm(model.vec_a[k] + model.vec_b[k]);
  if (k == model.m) value += std::norm(model.vec_a[n] + model.vec_b[n]);
  return 0.5 * value;
}

VerificationReport verify_model(const DisjunctionModel& model, const DisjunctionData& d) {
  const std::size_t n = model.size();
  if (d.size() != n || model.vec_a.size() != n + 1 || model.vec_b.size() != n + 1 || model.m >= n) {
    throw DataError(fmt::format("model dimension does not match data with {} exemplars", d.size()));
  }
  VerificationReport r;
  r.inner_product_modulus = std::abs(inner_product(model.vec_a, model.vec_b));
  r.norm_a_deviation = std::abs(norm(model.vec_a) - 1.0);
  r.norm_b_deviation = std::abs(norm(model.vec_b) - 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double residual = std::abs(reconstruct_disjunction(model, k) - d.mu_ab[k]);
    if (residual > r.max_residual) {
      r.max_residual = residual;
      r.worst_index = k;
    }
  }
  r.pass = r.inner_product_modulus <= kVerifyTolerance && r.norm_a_deviation <= kVerifyTolerance &&
           r.norm_b_deviation <= kVerifyTolerance && r.max_residual <= kVerifyTolerance;
  return r;
}

FockWeights::FockWeights(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw DataError("Fock weights need at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!std::isfinite(c.amplitude) || c.amplitude < 0.0 || !std::isfinite(c.phase_deg)) {
      throw DataError(fmt::format("invalid Fock component ({}, {})", c.amplitude, c.phase_deg));
    }
    total += c.amplitude * c.amplitude;
  }
  if (std::abs(total - 1.0) > kVerifyTolerance) {
    throw DataError(fmt::format("Fock weights sum to {}, not 1", total));
  }
}

double fock_component_weight(const FockWeights& f, std::size_t n) {
  if (n < 1 || n > f.size()) {
    throw DataError(fmt::format("Fock sector {} out of range 1..{}", n, f.size()));
  }
  const double a = f.components()[n - 1].amplitude;
  return a * a;
}

}  // namespace qconcept::hilbert
