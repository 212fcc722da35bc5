#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qconcept/hilbert.hpp"

namespace qconcept::landscape {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b) noexcept;

/// Isotropic Gaussian intensity |psi|^2 = amplitude * exp(-r^2 / (2 sigma^2)).
struct GaussianField {
  Point center;
  double sigma = 1.0;
  double amplitude = 1.0;

  double intensity(Point p) const noexcept;
  // Distance from the center at which the intensity drops to `mu`.
  double radius_for(double mu) const;
};

struct FieldPair {
  GaussianField a;
  GaussianField b;
  // How the widths were chosen: "anchored" or "sweep".
  std::string sigma_rule;
  std::size_t feasible = 0;  // exemplars whose two target circles meet
};

inline constexpr Point kDefaultCenterA{0.0, 0.0};
inline constexpr Point kDefaultCenterB{10.0, 4.0};

// Fraction of exemplars that must be placeable exactly.
inline constexpr double kMinFeasibleFraction = 0.9;

/// Peak amplitudes are the column maxima. When the two peaks belong to
/// different exemplars, each width is set so that the other concept's peak
/// exemplar lands exactly at its own center ("anchored"). Otherwise, or
/// when anchoring leaves fewer than 90% of the exemplars placeable, one
/// shared width is swept over [0.5, 50] in steps of 0.05 ("sweep").
FieldPair fit_fields(const hilbert::DisjunctionData& d, Point center_a = kDefaultCenterA,
                     Point center_b = kDefaultCenterB);

struct Placement {
  Point position;
  double residual = 0.0;
  bool exact = false;
};

struct PlacementSet {
  std::vector<std::string> labels;
  std::vector<Placement> items;

  std::size_t size() const noexcept { return items.size(); }
};

PlacementSet place_exemplars(const hilbert::DisjunctionData& d, const FieldPair& fields);

/// Phase (degrees) that makes the c-free superposition formula exact at
/// exemplar k: sign(lambda_k) * acos(deviation / sqrt(mu_A mu_B)).
double effective_phase(const hilbert::DisjunctionData& d, const hilbert::DisjunctionModel& model,
                       std::size_t k);
std::vector<double> effective_phases(const hilbert::DisjunctionData& d,
                                     const hilbert::DisjunctionModel& model);

/// Continuous phase field over the plane. Shepard (power 2) weighting of the
/// unit vectors (cos t_k, sin t_k); exact at the nodes.
class PhaseField {
 public:
  PhaseField(std::vector<Point> nodes, std::vector<double> phases_deg);
  static PhaseField constant(double phase_deg);

  /// (cos, sin) of the interpolated phase.
  std::pair<double, double> direction(Point p) const;
  double degrees(Point p) const;

 private:
  PhaseField() = default;

  std::vector<Point> nodes_;
  std::vector<double> phases_deg_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

PhaseField phase_field(const PlacementSet& placements, const std::vector<double>& phases_deg);

double classical_intensity(const FieldPair& f, Point p);
double interference_term(const FieldPair& f, const PhaseField& phase, Point p);
double quantum_intensity(const FieldPair& f, const PhaseField& phase, Point p);

struct Extent {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
};

struct Resolution {
  std::size_t nx = 400;
  std::size_t ny = 300;
};

enum class GridKind { field_a, field_b, classical, quantum, interference };

std::string_view to_string(GridKind kind) noexcept;

/// Samples stored row-major with the first row at y = ymax.
struct InterferenceGrid {
  Extent extent;
  std::size_t nx = 0;
  std::size_t ny = 0;
  GridKind kind = GridKind::classical;
  std::vector<double> values;

  Point coordinate(std::size_t ix, std::size_t iy) const noexcept;
  double at(std::size_t ix, std::size_t iy) const noexcept { return values[iy * nx + ix]; }
};

/// Bounding box of the placements padded by twice the wider sigma.
Extent default_extent(const PlacementSet& placements, const FieldPair& fields);

/// `threads` = 0 picks hardware_concurrency(); output does not depend on it.
InterferenceGrid render(const FieldPair& fields, const PhaseField& phase, const Extent& extent,
                        const Resolution& resolution, GridKind kind, unsigned threads = 0);

enum class ExportFormat { csv, pgm };

/// csv: `x,y,value` rows in storage order with `significant_digits` digits.
/// pgm: binary P5, 8-bit, v -> round(255 (v - min) / (max - min)).
void export_grid(const InterferenceGrid& grid, ExportFormat format,
                 const std::filesystem::path& path, int significant_digits = 9);

std::vector<unsigned char> pgm_pixels(const InterferenceGrid& grid);

/// `label,x,y,exact,residual`
void write_placements(const PlacementSet& placements, const std::filesystem::path& path);

}  // namespace qconcept::landscape
