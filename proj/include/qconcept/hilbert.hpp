#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qconcept::hilbert {

/// Membership weights of n exemplars for concept A, concept B and "A or B".
struct DisjunctionData {
  std::vector<std::string> labels;
  std::vector<double> mu_a;
  std::vector<double> mu_b;
  std::vector<double> mu_ab;

  std::size_t size() const noexcept { return labels.size(); }
};

// Column sums may deviate from 1 by at most this much before the data are
// rejected; smaller deviations are renormalized away.
inline constexpr double kSumTolerance = 1e-3;

/// Checks shape and ranges and rescales each column to sum to exactly one.
/// A note is appended to `warnings` for every column that was rescaled.
DisjunctionData prepare(DisjunctionData raw, std::vector<std::string>* warnings = nullptr);

/// Reads the `label,muA,muB,muAB` CSV (no renormalization).
DisjunctionData parse_disjunction_csv(std::istream& in);
DisjunctionData load_disjunction_csv(const std::filesystem::path& path);

/// mu(A or B)_k - (mu(A)_k + mu(B)_k) / 2, snapped to 0 below 1e-12
double interference_deviation(const DisjunctionData& d, std::size_t k);

/// |lambda_k| = sqrt(mu_A mu_B - deviation^2). Throws InfeasibleError listing
/// every exemplar with a negative radicand.
std::vector<double> lambda_magnitudes(const DisjunctionData& d);

/// argmax, lowest index on ties.
std::size_t dominant_index(std::span<const double> magnitudes);

/// Greedy sign choice: walk magnitudes from largest to smallest (ties by
/// index), start with +1 at m, then take -1 whenever the running signed sum
/// stays non-negative and +1 otherwise.
std::vector<int> assign_signs(std::span<const double> magnitudes, std::size_t m);

/// Overlap factor c_m of the dominant exemplar, chosen so that the
/// imaginary parts of <A|B> cancel.
double compute_cm(const DisjunctionData& d, std::span<const double> signed_lambda, std::size_t m);

/// Phase angles beta_k in degrees.
std::vector<double> compute_phases(const DisjunctionData& d, std::span<const int> signs, double cm,
                                   std::size_t m);

using Vector = std::vector<std::complex<double>>;

/// Unit vectors |A>, |B> in C^(n+1) with <A|B> = 0. The projector for
/// exemplar k is coordinate k, except for m which also owns coordinate n.
struct DisjunctionModel {
  std::vector<std::string> labels;
  std::size_t m = 0;  // 0-based
  std::vector<double> lambda;
  std::vector<int> signs;
  double c_m = 1.0;
  std::vector<double> beta_deg;
  Vector vec_a;
  Vector vec_b;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Expects prepared data (see prepare()).
DisjunctionModel build_model(const DisjunctionData& d);

/// 1/2 <A+B|M_k|A+B>, evaluated from the stored vectors.
double reconstruct_disjunction(const DisjunctionModel& model, std::size_t k);

inline constexpr double kVerifyTolerance = 1e-9;

struct VerificationReport {
  double inner_product_modulus = 0.0;
  double norm_a_deviation = 0.0;
  double norm_b_deviation = 0.0;
  double max_residual = 0.0;
  std::size_t worst_index = 0;
  bool pass = false;
};

VerificationReport verify_model(const DisjunctionModel& model, const DisjunctionData& d);

std::complex<double> inner_product(const Vector& lhs, const Vector& rhs);
double norm(const Vector& v);

/// Model JSON with 12 significant digits; m is written 1-based.
std::string model_to_json(const DisjunctionModel& model);
DisjunctionModel model_from_json(std::string_view json_text);
void write_model(const DisjunctionModel& model, const std::filesystem::path& path);
DisjunctionModel read_model(const std::filesystem::path& path);

/// Amplitudes a_n e^{i alpha_n} over the number sectors n = 1..N of a Fock
/// space. The weights a_n^2 sum to one.
class FockWeights {
 public:
  struct Component {
    double amplitude = 0.0;
    double phase_deg = 0.0;
  };

  explicit FockWeights(std::vector<Component> components);

  const std::vector<Component>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }

 private:
  std::vector<Component> components_;
};

/// a_n^2 for the 1-based sector n.
double fock_component_weight(const FockWeights& f, std::size_t n);

}  // namespace qconcept::hilbert
