#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "qconcept/error.hpp"
#include "qconcept/landscape.hpp"

namespace qconcept::landscape {

namespace {

std::string number(double v, int digits) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  return fmt::format("{:.{}g}", v, digits);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

std::vector<unsigned char> pgm_pixels(const InterferenceGrid& grid) {
  std::vector<unsigned char> pixels(grid.values.size(), 0);
  if (grid.values.empty()) return pixels;
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) return pixels;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const long level = std::lround(255.0 * (grid.values[i] - min) / range);
    pixels[i] = static_cast<unsigned char>(std::clamp(level, 0L, 255L));
  }
  return pixels;
}

void export_grid(const InterferenceGrid& grid, ExportFormat format, const std::filesystem::path& path,
                 int significant_digits) {
  if (grid.nx < 2 || grid.ny < 2 || grid.values.size() != grid.nx * grid.ny) {
    throw DataError("cannot export a malformed grid");
  }
  auto out = open_for_write(path);
  if (format == ExportFormat::csv) {
    std::string text = "x,y,value\n";
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
      for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        const Point p = grid.coordinate(ix, iy);
        text += number(p.x, significant_digits);
        text += ',';
        text += number(p.y, significant_digits);
        text += ',';
        text += number(grid.at(ix, iy), significant_digits);
        text += '\n';
      }
    }
    out << text;
  } else {
    const auto pixels = pgm_pixels(grid);
    out << fmt::format("P5\n{} {}\n255\n", grid.nx, grid.ny);
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  }
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

void write_placements(const PlacementSet& placements, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "label,x,y,exact,residual\n";
  for (std::size_t k = 0; k < placements.size(); ++k) {
    const auto& p = placements.items[k];
    out << placements.labels[k] << ',' << number(p.position.x, 12) << ',' << number(p.position.y, 12) << ','
        << (p.exact ? "true" : "false") << ',' << number(p.residual, 12) << '\n';
  }
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace qconcept::landscape
