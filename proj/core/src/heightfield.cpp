#include "icy/heightfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icy {
namespace {

struct CellCoord {
  int i;
  int j;
  double u;
  double v;
};

CellCoord locate(const HeightField& hf, double x, double y) {
  const double gx = std::clamp((x - hf.origin_x) / hf.cell_size, 0.0,
                               static_cast<double>(hf.width - 1));
  const double gy = std::clamp((y - hf.origin_y) / hf.cell_size, 0.0,
                               static_cast<double>(hf.height - 1));
  int i = std::min(static_cast<int>(std::floor(gx)), hf.width - 2);
  int j = std::min(static_cast<int>(std::floor(gy)), hf.height - 2);
  return {i, j, gx - i, gy - j};
}

}  // namespace

HeightField::HeightField(int w, int h, double cell, double fill)
    : width(w), height(h), cell_size(cell) {
  if (w < 2 || h < 2) throw std::invalid_argument("HeightField: width and height must be >= 2");
  if (!(cell > 0.0)) throw std::invalid_argument("HeightField: cell_size must be > 0");
  elevations.assign(static_cast<std::size_t>(w) * h, fill);
}

bool HeightField::contains(double x, double y) const {
  return x >= origin_x && y >= origin_y && x <= origin_x + extent_x() &&
         y <= origin_y + extent_y();
}

double HeightField::surface_height(double x, double y) const {
  const CellCoord c = locate(*this, x, y);
  const double z00 = at(c.i, c.j);
  const double z10 = at(c.i + 1, c.j);
  const double z01 = at(c.i, c.j + 1);
  const double z11 = at(c.i + 1, c.j + 1);
  if (c.u >= c.v) {
    return z00 + c.u * (z10 - z00) + c.v * (z11 - z10);
  }
  return z00 + c.v * (z01 - z00) + c.u * (z11 - z01);
}

Vec3 HeightField::surface_normal(double x, double y) const {
  const CellCoord c = locate(*this, x, y);
  const double z00 = at(c.i, c.j);
  const double z10 = at(c.i + 1, c.j);
  const double z01 = at(c.i, c.j + 1);
  const double z11 = at(c.i + 1, c.j + 1);
  double dzdx = 0.0;
  double dzdy = 0.0;
  if (c.u >= c.v) {
    dzdx = (z10 - z00) / cell_size;
    dzdy = (z11 - z10) / cell_size;
  } else {
    dzdx = (z11 - z01) / cell_size;
    dzdy = (z01 - z00) / cell_size;
  }
  return Vec3(-dzdx, -dzdy, 1.0).normalized();
}

double HeightField::min_elevation() const {
  return *std::min_element(elevations.begin(), elevations.end());
}

double HeightField::max_elevation() const {
  return *std::max_element(elevations.begin(), elevations.end());
}

void HeightField::validate() const {
  if (width < 2 || height < 2) throw std::invalid_argument("HeightField: width and height must be >= 2");
  if (!(cell_size > 0.0)) throw std::invalid_argument("HeightField: cell_size must be > 0");
  if (elevations.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("HeightField: elevation count does not match width*height");
  }
  for (double z : elevations) {
    if (!std::isfinite(z)) throw std::invalid_argument("HeightField: non-finite elevation");
  }
}

}  // namespace icy
