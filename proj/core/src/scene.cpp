#include "icy/scene.hpp"

#include <stdexcept>
#include <string>

namespace icy {

SceneGeometry::SceneGeometry(TriangleMesh terrain, std::vector<RockInstance> rocks,
                             int terrain_material_id)
    : terrain_(std::move(terrain)),
      rocks_(std::move(rocks)),
      terrain_material_id_(terrain_material_id) {
  if (terrain_.normals.size() != terrain_.positions.size()) compute_vertex_normals(terrain_);
  if (terrain_.object_coords.size() != terrain_.positions.size()) {
    terrain_.object_coords = terrain_.positions;
  }
  auto append = [&](const TriangleMesh& mesh, const RockInstance* rock, std::uint32_t owner) {
    const auto base = static_cast<std::uint32_t>(positions_.size());
    for (std::size_t v = 0; v < mesh.positions.size(); ++v) {
      if (rock != nullptr) {
        positions_.push_back(rock->to_world(mesh.positions[v]));
        normals_.push_back(rock->rotation * mesh.normals[v]);
      } else {
        positions_.push_back(mesh.positions[v]);
        normals_.push_back(mesh.normals[v]);
      }
      object_coords_.push_back(mesh.object_coords.empty() ? mesh.positions[v]
                                                          : mesh.object_coords[v]);
    }
    for (const auto& t : mesh.triangles) {
      triangles_.push_back({t[0] + base, t[1] + base, t[2] + base});
      owner_.push_back(owner);
    }
  };
  append(terrain_, nullptr, 0);
  for (std::size_t k = 0; k < rocks_.size(); ++k) {
    append(rocks_[k].mesh, &rocks_[k], static_cast<std::uint32_t>(k + 1));
  }
  bvh_ = TriangleBvh(positions_, triangles_);
}

SurfacePoint SceneGeometry::surface_at(const TriangleHit& hit, const Ray& ray) const {
  const auto& t = triangles_[hit.triangle];
  const double b0 = 1.0 - hit.b1 - hit.b2;
  SurfacePoint sp;
  sp.position = ray.origin + hit.t * ray.direction;
  Vec3 ng = (positions_[t[1]] - positions_[t[0]]).cross(positions_[t[2]] - positions_[t[0]]).normalized();
  Vec3 ns = (b0 * normals_[t[0]] + hit.b1 * normals_[t[1]] + hit.b2 * normals_[t[2]]);
  if (ng.dot(ray.direction) > 0.0) ng = -ng;
  const double ns_len = ns.norm();
  ns = ns_len > 0.0 ? Vec3(ns / ns_len) : ng;
  if (ns.dot(ng) <= 0.0) ns = -ns;
  if (ns.dot(ray.direction) >= 0.0) ns = ng;
  sp.geometric_normal = ng;
  sp.shading_normal = ns;
  sp.object_coord =
      b0 * object_coords_[t[0]] + hit.b1 * object_coords_[t[1]] + hit.b2 * object_coords_[t[2]];
  const std::uint32_t owner = owner_[hit.triangle];
  if (owner == 0) {
    sp.surface = SurfaceClass::terrain;
    sp.instance_id = 0;
    sp.material_id = terrain_material_id_;
  } else {
    const RockInstance& rock = rocks_[owner - 1];
    sp.surface = SurfaceClass::rock;
    sp.instance_id = rock.instance_id;
    sp.material_id = rock.material_id;
  }
  return sp;
}

Scene Scene::assemble(std::shared_ptr<const SceneGeometry> geometry,
                      std::vector<Material> materials, Lighting lighting, StereoRig rig) {
  if (!geometry) throw std::invalid_argument("Scene::assemble: missing geometry");
  if (materials.empty()) throw std::invalid_argument("Scene::assemble: at least one material required");
  for (const Material& m : materials) m.validate();
  lighting.validate();
  rig.validate();

  const auto material_ok = [&](int id) {
    return id >= 0 && static_cast<std::size_t>(id) < materials.size();
  };
  if (!material_ok(geometry->terrain_material_id())) {
    throw std::invalid_argument("Scene::assemble: terrain material id out of range");
  }
  const auto& rocks = geometry->rocks();
  std::vector<bool> seen(rocks.size() + 1, false);
  for (const RockInstance& r : rocks) {
    if (r.instance_id < 1 || static_cast<std::size_t>(r.instance_id) > rocks.size() ||
        seen[static_cast<std::size_t>(r.instance_id)]) {
      throw std::invalid_argument("Scene::assemble: instance ids must be unique and contiguous from 1");
    }
    seen[static_cast<std::size_t>(r.instance_id)] = true;
    if (!material_ok(r.material_id)) {
      throw std::invalid_argument("Scene::assemble: rock material id " +
                                  std::to_string(r.material_id) + " out of range");
    }
  }

  Scene scene;
  scene.geometry_ = std::move(geometry);
  scene.materials_ = std::move(materials);
  scene.lighting_ = std::move(lighting);
  scene.rig_ = rig;
  return scene;
}

}  // namespace icy
