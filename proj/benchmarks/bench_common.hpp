#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "geoshadow/raster.hpp"

namespace bench {

// Smooth terrain with scattered box buildings, 1 m pixels.
inline geoshadow::Raster city_dsm(int width, int height, unsigned seed = 1) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> col(0, width - 1), row(0, height - 1), side(3, 12);
  std::uniform_real_distribution<double> tall(5.0, 40.0);
  std::vector<double> z(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) z[static_cast<std::size_t>(r) * width + c] = 2.0 * std::sin(c * 0.01) + r * 0.005;
  }
  const int buildings = width * height / 400;
  for (int b = 0; b < buildings; ++b) {
    const int c0 = col(rng), r0 = row(rng), s = side(rng);
    const double h = tall(rng);
    for (int r = r0; r < std::min(height, r0 + s); ++r) {
      for (int c = c0; c < std::min(width, c0 + s); ++c) z[static_cast<std::size_t>(r) * width + c] += h;
    }
  }
  return geoshadow::Raster(width, height, std::move(z), geoshadow::GeoTransform{0.0, 0.0, 1.0, -1.0}, -9999.0);
}

}  // namespace bench
