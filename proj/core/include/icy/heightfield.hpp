#pragma once

#include <vector>

#include "icy/types.hpp"

namespace icy {

/// Regular grid of elevations in meters. Sample (i, j) sits at world
/// (origin_x + i * cell_size, origin_y + j * cell_size).
struct HeightField {
  int width = 0;
  int height = 0;
  double cell_size = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<double> elevations;

  HeightField() = default;
  HeightField(int width, int height, double cell_size, double fill = 0.0);

  double& at(int i, int j) { return elevations[static_cast<std::size_t>(j) * width + i]; }
  double at(int i, int j) const { return elevations[static_cast<std::size_t>(j) * width + i]; }

  double extent_x() const { return (width - 1) * cell_size; }
  double extent_y() const { return (height - 1) * cell_size; }

  bool contains(double x, double y) const;

  /// Height of the triangulated surface at (x, y). Uses the same diagonal
  /// split as heightfield_to_mesh, so it matches the rendered surface exactly.
  double surface_height(double x, double y) const;
  /// Unit normal of the mesh face containing (x, y).
  Vec3 surface_normal(double x, double y) const;

  double min_elevation() const;
  double max_elevation() const;

  /// Throws std::invalid_argument when the grid violates its invariants.
  void validate() const;
};

}  // namespace icy
