#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "icy/heightfield.hpp"
#include "icy/types.hpp"

namespace icy {

/// Indexed triangle mesh. object_coords are the per-vertex coordinates used
/// for texture lookup; for generated terrain they equal the world position.
struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<Vec3> object_coords;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  std::size_t vertex_count() const { return positions.size(); }
  std::size_t triangle_count() const { return triangles.size(); }

  /// Unnormalized face normal (length = 2 * area).
  Vec3 face_cross(std::size_t tri) const;
};

/// Vertex normals as the normalized sum of area-weighted adjacent face
/// normals. Vertices with no non-degenerate face get (0, 0, 1).
void compute_vertex_normals(TriangleMesh& mesh);

/// Two triangles per grid cell, split along the (i, j) -> (i+1, j+1)
/// diagonal, wound counter-clockwise seen from +z.
TriangleMesh heightfield_to_mesh(const HeightField& hf);

/// Minimal Wavefront OBJ support: `v` positions and `f` faces (polygons are
/// fan-triangulated; texture/normal indices are ignored). Normals are
/// recomputed and object coordinates set to positions.
TriangleMesh read_obj(const std::filesystem::path& path);
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace icy
