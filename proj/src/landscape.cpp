#include "qconcept/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "angles.hpp"
#include "qconcept/error.hpp"

namespace qconcept::landscape {

namespace {

// Below this distance a query point is treated as sitting on a node.
constexpr double kCoincident = 1e-12;
// Earlier placements closer than this make the second intersection preferable.
constexpr double kCrowdingRadius = 0.1;
constexpr double kSweepMin = 0.5;
constexpr double kSweepMax = 50.0;
constexpr double kSweepStep = 0.05;
constexpr double kSweepMargin = 1.05;

struct Geometry {
  Point a;
  Point b;
  double d = 0.0;
  Point u;  // unit vector a -> b
  Point v;  // u rotated by +90 degrees
};

Geometry geometry(Point a, Point b) {
  Geometry g{a, b, distance(a, b), {}, {}};
  g.u = {(b.x - a.x) / g.d, (b.y - a.y) / g.d};
  g.v = {-g.u.y, g.u.x};
  return g;
}

// Normalized radius sqrt(2 ln(amplitude / mu)); the target radius is sigma times this.
double unit_radius(double amplitude, double mu) { return std::sqrt(2.0 * std::log(amplitude / mu)); }

bool circles_meet(double ra, double rb, double d) {
  const double tol = 1e-9 * std::max(d, ra + rb);
  return std::abs(ra - rb) <= d + tol && d <= ra + rb + tol;
}

std::size_t count_feasible(const std::vector<double>& rho_a, const std::vector<double>& rho_b, double sigma_a,
                           double sigma_b, double d) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < rho_a.size(); ++k) {
    if (circles_meet(sigma_a * rho_a[k], sigma_b * rho_b[k], d)) ++count;
  }
  return count;
}

bool enough(std::size_t feasible, std::size_t n) {
  return static_cast<double>(feasible) >= kMinFeasibleFraction * static_cast<double>(n) - 1e-12;
}

Point along(const Geometry& g, double t, double h) {
  return {g.a.x + t * g.u.x + h * g.v.x, g.a.y + t * g.u.y + h * g.v.y};
}

double radial_residual(Point p, const Geometry& g, double ra, double rb) {
  const double ea = distance(p, g.a) - ra;
  const double eb = distance(p, g.b) - rb;
  return std::sqrt(ea * ea + eb * eb);
}

bool crowded(Point p, const std::vector<Placement>& earlier) {
  return std::any_of(earlier.begin(), earlier.end(),
                     [&](const Placement& q) { return distance(p, q.position) < kCrowdingRadius; });
}

void check_positive_weights(const hilbert::DisjunctionData& d) {
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!(d.mu_a[k] > 0.0) || !(d.mu_b[k] > 0.0)) {
      throw DataError(fmt::format("'{}' has a zero weight and cannot be placed on a Gaussian", d.labels[k]));
    }
  }
}

void check_extent(const Extent& e) {
  const bool finite = std::isfinite(e.xmin) && std::isfinite(e.xmax) && std::isfinite(e.ymin) && std::isfinite(e.ymax);
  if (!finite || !(e.xmax > e.xmin) || !(e.ymax > e.ymin)) {
    throw DataError(fmt::format("degenerate extent [{}, {}] x [{}, {}]", e.xmin, e.xmax, e.ymin, e.ymax));
  }
}

}  // namespace

double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double GaussianField::intensity(Point p) const noexcept {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  return amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

double GaussianField::radius_for(double mu) const {
  if (!(mu > 0.0)) throw DataError(fmt::format("intensity {} has no finite radius", mu));
  if (mu > amplitude * (1.0 + 1e-12)) {
    throw DataError(fmt::format("intensity {} exceeds the peak amplitude {}", mu, amplitude));
  }
  if (mu >= amplitude) return 0.0;
  return sigma * unit_radius(amplitude, mu);
}

FieldPair fit_fields(const hilbert::DisjunctionData& d, Point center_a, Point center_b) {
  const std::size_t n = d.size();
  if (n == 0) throw DataError("cannot fit fields to empty data");
  const double d_ab = distance(center_a, center_b);
  if (!(d_ab > 0.0)) throw DataError("field centers must be distinct");
  check_positive_weights(d);

  const auto peak_a = static_cast<std::size_t>(std::max_element(d.mu_a.begin(), d.mu_a.end()) - d.mu_a.begin());
  const auto peak_b = static_cast<std::size_t>(std::max_element(d.mu_b.begin(), d.mu_b.end()) - d.mu_b.begin());
  const double amp_a = d.mu_a[peak_a];
  const double amp_b = d.mu_b[peak_b];

  std::vector<double> rho_a(n);
  std::vector<double> rho_b(n);
  for (std::size_t k = 0; k < n; ++k) {
    rho_a[k] = unit_radius(amp_a, d.mu_a[k]);
    rho_b[k] = unit_radius(amp_b, d.mu_b[k]);
  }

  FieldPair fields;
  fields.a = {center_a, 1.0, amp_a};
  fields.b = {center_b, 1.0, amp_b};

  if (peak_a != peak_b && rho_a[peak_b] > 0.0 && rho_b[peak_a] > 0.0) {
    const double sigma_a = d_ab / rho_a[peak_b];
    const double sigma_b = d_ab / rho_b[peak_a];
    const auto feasible = count_feasible(rho_a, rho_b, sigma_a, sigma_b, d_ab);
    if (enough(feasible, n)) {
      fields.a.sigma = sigma_a;
      fields.b.sigma = sigma_b;
      fields.sigma_rule = "anchored";
      fields.feasible = feasible;
      return fields;
    }
  }

  const auto steps = static_cast<int>(std::lround((kSweepMax - kSweepMin) / kSweepStep));
  double best_sigma = kSweepMin;
  std::size_t best_count = 0;
  for (int i = 0; i <= steps; ++i) {
    const double sigma = kSweepMin + i * kSweepStep;
    const auto count = count_feasible(rho_a, rho_b, sigma, sigma, d_ab);
    if (count > best_count) {
      best_count = count;
      best_sigma = sigma;
    }
    if (count == n) break;
  }
  if (best_count == n) {
    const double widened = kSweepMargin * best_sigma;
    if (count_feasible(rho_a, rho_b, widened, widened, d_ab) == n) best_sigma = widened;
  }
  if (!enough(best_count, n)) {
    std::vector<std::string> diagnostics;
    for (std::size_t k = 0; k < n; ++k) {
      const double lo = d_ab / (rho_a[k] + rho_b[k]);
      const double gap = std::abs(rho_a[k] - rho_b[k]);
      const double hi = gap > 0.0 ? d_ab / gap : std::numeric_limits<double>::infinity();
      if (!circles_meet(best_sigma * rho_a[k], best_sigma * rho_b[k], d_ab)) {
        diagnostics.push_back(fmt::format("{}: needs sigma in [{:.4f}, {:.4f}]", d.labels[k], lo, hi));
      }
    }
    throw InfeasibleError(fmt::format("no sigma in [{}, {}] places {:.0f}% of the exemplars exactly (best {} of {})",
                                      kSweepMin, kSweepMax, kMinFeasibleFraction * 100, best_count, n),
                          std::move(diagnostics));
  }
  fields.a.sigma = best_sigma;
  fields.b.sigma = best_sigma;
  fields.sigma_rule = "sweep";
  fields.feasible = count_feasible(rho_a, rho_b, best_sigma, best_sigma, d_ab);
  return fields;
}

PlacementSet place_exemplars(const hilbert::DisjunctionData& d, const FieldPair& fields) {
  const Geometry g = geometry(fields.a.center, fields.b.center);
  if (!(g.d > 0.0)) throw DataError("field centers must be distinct");

  PlacementSet out;
  out.labels = d.labels;
  out.items.reserve(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double ra = fields.a.radius_for(d.mu_a[k]);
    const double rb = fields.b.radius_for(d.mu_b[k]);
    Placement p;
    if (circles_meet(ra, rb, g.d)) {
      const double t = (g.d * g.d + ra * ra - rb * rb) / (2.0 * g.d);
      const double h = std::sqrt(std::max(0.0, ra * ra - t * t));
      Point first = along(g, t, h);
      Point second = along(g, t, -h);
      if (second.y > first.y || (second.y == first.y && second.x > first.x)) std::swap(first, second);
      p.position = first;
      if (h > 0.0 && crowded(first, out.items) && !crowded(second, out.items)) p.position = second;
      p.exact = true;
    } else {
      // Least-squares compromise on the line through both centers.
      const double candidates[] = {(g.d + ra - rb) / 2.0, (g.d + ra + rb) / 2.0, (g.d - ra - rb) / 2.0};
      double best = std::numeric_limits<double>::infinity();
      for (double t : candidates) {
        const Point q = along(g, t, 0.0);
        const double r = radial_residual(q, g, ra, rb);
        if (r < best) {
          best = r;
          p.position = q;
        }
      }
      p.exact = false;
    }
    p.residual = radial_residual(p.position, g, ra, rb);
    out.items.push_back(p);
  }
  return out;
}

double effective_phase(const hilbert::DisjunctionData& d, const hilbert::DisjunctionModel& model, std::size_t k) {
  if (model.size() != d.size()) throw DataError("model and data have different exemplar counts");
  if (k >= d.size()) throw DataError(fmt::format("exemplar index {} out of range", k + 1));
  const double product = d.mu_a[k] * d.mu_b[k];
  const double dev = hilbert::interference_deviation(d, k);
  const double sign = model.signs[k] < 0 ? -1.0 : 1.0;
  if (product == 0.0) return sign * 90.0;
  const double arg = std::clamp(dev / std::sqrt(product), -1.0, 1.0);
  return sign * detail::acos_deg(arg);
}

std::vector<double> effective_phases(const hilbert::DisjunctionData& d, const hilbert::DisjunctionModel& model) {
  std::vector<double> out(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) out[k] = effective_phase(d, model, k);
  return out;
}

PhaseField::PhaseField(std::vector<Point> nodes, std::vector<double> phases_deg)
    : nodes_(std::move(nodes)), phases_deg_(std::move(phases_deg)) {
  if (nodes_.empty() || nodes_.size() != phases_deg_.size()) {
    throw DataError("phase field needs one phase per node and at least one node");
  }
  for (double deg : phases_deg_) {
    const auto [c, s] = detail::cos_sin_deg(deg);
    cos_.push_back(c);
    sin_.push_back(s);
  }
}

PhaseField PhaseField::constant(double phase_deg) {
  PhaseField f;
  const auto [c, s] = detail::cos_sin_deg(phase_deg);
  f.phases_deg_ = {phase_deg};
  f.cos_ = {c};
  f.sin_ = {s};
  return f;
}

std::pair<double, double> PhaseField::direction(Point p) const {
  if (nodes_.empty()) return {cos_.front(), sin_.front()};
  std::size_t nearest = 0;
  double nearest_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const double dx = p.x - nodes_[k].x;
    const double dy = p.y - nodes_[k].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < nearest_d2) {
      nearest_d2 = d2;
      nearest = k;
    }
  }
  if (nearest_d2 <= kCoincident * kCoincident) return {cos_[nearest], sin_[nearest]};

  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const double dx = p.x - nodes_[k].x;
    const double dy = p.y - nodes_[k].y;
    const double w = 1.0 / (dx * dx + dy * dy);
    sx += w * cos_[k];
    sy += w * sin_[k];
  }
  const double r = std::hypot(sx, sy);
  if (r == 0.0) return {1.0, 0.0};
  return {sx / r, sy / r};
}

double PhaseField::degrees(Point p) const {
  if (nodes_.empty()) return phases_deg_.front();
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (distance(p, nodes_[k]) <= kCoincident) {
      // Nearest coincident node wins; ties go to the lower index.
      std::size_t best = k;
      double best_d = distance(p, nodes_[k]);
      for (std::size_t j = k + 1; j < nodes_.size(); ++j) {
        const double dj = distance(p, nodes_[j]);
        if (dj < best_d) {
          best = j;
          best_d = dj;
        }
      }
      return phases_deg_[best];
    }
  }
  const auto [c, s] = direction(p);
  return std::atan2(s, c) * detail::kDegPerRad;
}

PhaseField phase_field(const PlacementSet& placements, const std::vector<double>& phases_deg) {
  std::vector<Point> nodes;
  nodes.reserve(placements.size());
  for (const auto& item : placements.items) nodes.push_back(item.position);
  return PhaseField(std::move(nodes), phases_deg);
}

double classical_intensity(const FieldPair& f, Point p) { return 0.5 * (f.a.intensity(p) + f.b.intensity(p)); }

double interference_term(const FieldPair& f, const PhaseField& phase, Point p) {
  const double cos_theta = phase.direction(p).first;
  return std::sqrt(f.a.intensity(p)) * std::sqrt(f.b.intensity(p)) * cos_theta;
}

double quantum_intensity(const FieldPair& f, const PhaseField& phase, Point p) {
  return classical_intensity(f, p) + interference_term(f, phase, p);
}

std::string_view to_string(GridKind kind) noexcept {
  switch (kind) {
    case GridKind::field_a:
      return "field_a";
    case GridKind::field_b:
      return "field_b";
    case GridKind::classical:
      return "classical";
    case GridKind::quantum:
      return "quantum";
    case GridKind::interference:
      return "interference";
  }
  return "unknown";
}

Point InterferenceGrid::coordinate(std::size_t ix, std::size_t iy) const noexcept {
  const double dx = (extent.xmax - extent.xmin) / static_cast<double>(nx - 1);
  const double dy = (extent.ymax - extent.ymin) / static_cast<double>(ny - 1);
  return {extent.xmin + static_cast<double>(ix) * dx, extent.ymax - static_cast<double>(iy) * dy};
}

Extent default_extent(const PlacementSet& placements, const FieldPair& fields) {
  std::vector<Point> points;
  for (const auto& item : placements.items) points.push_back(item.position);
  if (points.empty()) points = {fields.a.center, fields.b.center};
  Extent e{points.front().x, points.front().x, points.front().y, points.front().y};
  for (const auto& p : points) {
    e.xmin = std::min(e.xmin, p.x);
    e.xmax = std::max(e.xmax, p.x);
    e.ymin = std::min(e.ymin, p.y);
    e.ymax = std::max(e.ymax, p.y);
  }
  const double pad = 2.0 * std::max(fields.a.sigma, fields.b.sigma);
  return {e.xmin - pad, e.xmax + pad, e.ymin - pad, e.ymax + pad};
}

InterferenceGrid render(const FieldPair& fields, const PhaseField& phase, const Extent& extent,
                        const Resolution& resolution, GridKind kind, unsigned threads) {
  check_extent(extent);
  if (resolution.nx < 2 || resolution.ny < 2) {
    throw DataError(fmt::format("grid resolution {}x{} is below 2x2", resolution.nx, resolution.ny));
  }
  InterferenceGrid grid{extent, resolution.nx, resolution.ny, kind, {}};
  grid.values.resize(grid.nx * grid.ny);

  const auto sample = [&](Point p) {
    switch (kind) {
      case GridKind::field_a:
        return fields.a.intensity(p);
      case GridKind::field_b:
        return fields.b.intensity(p);
      case GridKind::classical:
        return classical_intensity(fields, p);
      case GridKind::quantum:
        return quantum_intensity(fields, phase, p);
      case GridKind::interference:
        return interference_term(fields, phase, p);
    }
    return 0.0;
  };
  const auto rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t iy = first; iy < grid.ny; iy += stride) {
      for (std::size_t ix = 0; ix < grid.nx; ++ix) grid.values[iy * grid.nx + ix] = sample(grid.coordinate(ix, iy));
    }
  };

  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, grid.ny));
  if (workers <= 1) {
    rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(rows, w, workers);
  }
  return grid;
}

}  // namespace qconcept::landscape
