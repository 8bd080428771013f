#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "icy/bvh.hpp"
#include "icy/camera.hpp"
#include "icy/lighting.hpp"
#include "icy/material.hpp"
#include "icy/mesh.hpp"
#include "icy/terrain.hpp"

namespace icy {

enum class SurfaceClass : std::uint8_t { sky = 0, terrain = 1, rock = 2 };

/// Shading data at a ray hit.
struct SurfacePoint {
  Vec3 position;
  Vec3 geometric_normal;  // faces the incoming ray
  Vec3 shading_normal;    // interpolated, on the same side as geometric_normal
  Vec3 object_coord;
  SurfaceClass surface = SurfaceClass::sky;
  int instance_id = 0;  // 0 for terrain
  int material_id = 0;
};

/// World-space triangles of the terrain and every rock instance, merged into
/// one BVH. Built once and shared by every scene variant that differs only in
/// materials, lights or camera.
class SceneGeometry {
 public:
  SceneGeometry(TriangleMesh terrain, std::vector<RockInstance> rocks,
                int terrain_material_id = 0);

  const TriangleBvh& bvh() const { return bvh_; }
  const TriangleMesh& terrain() const { return terrain_; }
  const std::vector<RockInstance>& rocks() const { return rocks_; }
  int terrain_material_id() const { return terrain_material_id_; }
  std::size_t triangle_count() const { return triangles_.size(); }

  SurfacePoint surface_at(const TriangleHit& hit, const Ray& ray) const;

 private:
  TriangleMesh terrain_;
  std::vector<RockInstance> rocks_;
  int terrain_material_id_;
  std::vector<Vec3> positions_;
  std::vector<Vec3> normals_;
  std::vector<Vec3> object_coords_;
  std::vector<std::array<std::uint32_t, 3>> triangles_;
  std::vector<std::uint32_t> owner_;  // 0 = terrain, k = rocks_[k - 1]
  TriangleBvh bvh_;
};

/// Immutable renderable scene. A default-constructed Scene is unassembled
/// and rejected by the renderer.
class Scene {
 public:
  Scene() = default;

  /// Validates materials, lights, rig and the instance-id invariant.
  static Scene assemble(std::shared_ptr<const SceneGeometry> geometry,
                        std::vector<Material> materials, Lighting lighting, StereoRig rig);

  bool assembled() const { return geometry_ != nullptr; }
  const SceneGeometry& geometry() const { return *geometry_; }
  const std::vector<Material>& materials() const { return materials_; }
  const Material& material(int id) const { return materials_.at(static_cast<std::size_t>(id)); }
  const Lighting& lighting() const { return lighting_; }
  const StereoRig& rig() const { return rig_; }

 private:
  std::shared_ptr<const SceneGeometry> geometry_;
  std::vector<Material> materials_;
  Lighting lighting_;
  StereoRig rig_;
};

}  // namespace icy
