#include "icy/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "icy/noise.hpp"
#include "icy/rng.hpp"

namespace icy {
namespace {

struct FbmPreset {
  double amplitude_fraction;  // of extent
  int octaves;
  double cycles_per_extent;
};

FbmPreset preset_for(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::smooth: return {0.005, 3, 1.5};
    case TerrainKind::rugged_low: return {0.015, 5, 2.0};
    case TerrainKind::rugged_mid: return {0.035, 6, 3.0};
    case TerrainKind::rugged_high: return {0.07, 8, 4.0};
    case TerrainKind::penitente: break;
  }
  return {0.0, 1, 1.0};
}

// Penitente blades are roughly 1-2 m apart.
constexpr double kPenitenteFrequency = 0.6;  // cycles per meter

Mat3 rotation_from_z(const Vec3& target) {
  return Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), target).toRotationMatrix();
}

TriangleMesh make_rock_mesh(std::uint64_t rock_seed, double irregularity, double diameter) {
  TriangleMesh mesh = make_icosphere(2);
  NoiseSpec spec;
  spec.seed = rock_seed;
  const NoiseField field(spec);
  double max_radius = 0.0;
  for (Vec3& p : mesh.positions) {
    // Two 2D lookups on different projections give a field that is smooth
    // over the whole sphere.
    const double n = 0.5 * field.perlin(Vec2(1.7 * p.x() + 3.1, 1.7 * p.y() - 0.7)) +
                     0.5 * field.perlin(Vec2(1.7 * p.y() + 11.3, 1.7 * p.z() + 5.9));
    p *= 1.0 + 0.45 * irregularity * n;
    max_radius = std::max(max_radius, p.norm());
  }
  const double scale = 0.5 * diameter / max_radius;
  for (Vec3& p : mesh.positions) p *= scale;
  compute_vertex_normals(mesh);
  mesh.object_coords = mesh.positions;
  return mesh;
}

}  // namespace

TerrainKind parse_terrain_kind(std::string_view name) {
  if (name == "smooth") return TerrainKind::smooth;
  if (name == "rugged_low") return TerrainKind::rugged_low;
  if (name == "rugged_mid") return TerrainKind::rugged_mid;
  if (name == "rugged_high") return TerrainKind::rugged_high;
  if (name == "penitente") return TerrainKind::penitente;
  throw std::invalid_argument("unknown terrain kind '" + std::string(name) + "'");
}

std::string_view to_string(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::smooth: return "smooth";
    case TerrainKind::rugged_low: return "rugged_low";
    case TerrainKind::rugged_mid: return "rugged_mid";
    case TerrainKind::rugged_high: return "rugged_high";
    case TerrainKind::penitente: return "penitente";
  }
  return "smooth";
}

RockOrientation parse_rock_orientation(std::string_view name) {
  if (name == "random_yaw") return RockOrientation::random_yaw;
  if (name == "aligned") return RockOrientation::aligned;
  throw std::invalid_argument("unknown rock orientation '" + std::string(name) + "'");
}

std::string_view to_string(RockOrientation orientation) {
  return orientation == RockOrientation::aligned ? "aligned" : "random_yaw";
}

HeightField generate_terrain(TerrainKind kind, double extent, int resolution, std::uint64_t seed,
                             const TerrainOptions& options) {
  if (resolution < 2) throw std::invalid_argument("generate_terrain: resolution must be >= 2");
  if (!(extent > 0.0)) throw std::invalid_argument("generate_terrain: extent must be > 0");
  HeightField hf(resolution, resolution, extent / (resolution - 1));
  hf.origin_x = -0.5 * extent;
  hf.origin_y = -0.5 * extent;

  if (kind != TerrainKind::penitente) {
    const FbmPreset preset = preset_for(kind);
    NoiseSpec spec;
    spec.seed = seed;
    spec.octaves = preset.octaves;
    spec.base_frequency = preset.cycles_per_extent / extent;
    spec.amplitude = preset.amplitude_fraction * extent;
    const NoiseField field(spec);
    for (int j = 0; j < resolution; ++j) {
      for (int i = 0; i < resolution; ++i) {
        hf.at(i, j) = field.fbm(Vec2(hf.origin_x + i * hf.cell_size, hf.origin_y + j * hf.cell_size));
      }
    }
    return hf;
  }

  if (!(options.penitente_height > 0.0)) {
    throw std::invalid_argument("generate_terrain: penitente_height must be > 0");
  }
  NoiseSpec spec;
  spec.seed = seed;
  const NoiseField field(spec);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const Vec2 p(hf.origin_x + i * hf.cell_size, hf.origin_y + j * hf.cell_size);
      const double r0 = 1.0 - std::abs(field.perlin(p * kPenitenteFrequency));
      const double r1 = 1.0 - std::abs(field.perlin(p * (kPenitenteFrequency * 2.13) + Vec2(17.3, -4.1)));
      hf.at(i, j) = r0 * r0 * r0 + 0.35 * r1 * r1 * r1;
    }
  }
  const double lo = hf.min_elevation();
  const double hi = hf.max_elevation();
  const double scale = hi > lo ? options.penitente_height / (hi - lo) : 0.0;
  for (double& z : hf.elevations) z = (z - lo) * scale;
  return hf;
}

void RockSpec::validate() const {
  if (!(density >= 0.0) || !std::isfinite(density)) {
    throw std::invalid_argument("RockSpec: density must be finite and >= 0");
  }
  if (!(scale_min > 0.0 && scale_min <= scale_max)) {
    throw std::invalid_argument("RockSpec: require 0 < scale_min <= scale_max");
  }
  if (!(shape_irregularity >= 0.0 && shape_irregularity <= 1.0)) {
    throw std::invalid_argument("RockSpec: shape_irregularity must be in [0, 1]");
  }
  if (material_id && *material_id < 0) throw std::invalid_argument("RockSpec: negative material_id");
}

TriangleMesh make_icosphere(int subdivisions) {
  if (subdivisions < 0) throw std::invalid_argument("make_icosphere: negative subdivisions");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                    {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : mesh.positions) p.normalize();
  mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const std::pair<std::uint32_t, std::uint32_t> key{std::min(a, b), std::max(a, b)};
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      const auto idx = static_cast<std::uint32_t>(mesh.positions.size());
      mesh.positions.push_back((mesh.positions[a] + mesh.positions[b]).normalized());
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& tri : mesh.triangles) {
      const std::uint32_t ab = midpoint(tri[0], tri[1]);
      const std::uint32_t bc = midpoint(tri[1], tri[2]);
      const std::uint32_t ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }
  compute_vertex_normals(mesh);
  mesh.object_coords = mesh.positions;
  return mesh;
}

std::vector<RockInstance> scatter_rocks(const HeightField& hf, const RockSpec& spec) {
  spec.validate();
  hf.validate();
  const double area = hf.extent_x() * hf.extent_y();
  const double expected = spec.density * area;
  if (expected > kMaxExpectedRocks) {
    throw std::invalid_argument("scatter_rocks: density * area exceeds " +
                                std::to_string(static_cast<long long>(kMaxExpectedRocks)));
  }
  std::vector<RockInstance> rocks;
  if (expected <= 0.0) return rocks;

  CounterRng count_rng(spec.seed, /*stream=*/1);
  const std::uint64_t count = sample_poisson(count_rng, expected);
  rocks.reserve(count);
  const double log_min = std::log(spec.scale_min);
  const double log_max = std::log(spec.scale_max);
  for (std::uint64_t k = 0; k < count; ++k) {
    CounterRng rng(spec.seed, /*stream=*/1000 + k);
    const double x = hf.origin_x + rng.uniform() * hf.extent_x();
    const double y = hf.origin_y + rng.uniform() * hf.extent_y();
    const double diameter = std::exp(log_min + rng.uniform() * (log_max - log_min));
    const double yaw = rng.uniform(0.0, 2.0 * kPi);

    RockInstance rock;
    rock.diameter = diameter;
    rock.mesh = make_rock_mesh(rng.next_u64(), spec.shape_irregularity, diameter);
    rock.rotation = rotation_from_z(hf.surface_normal(x, y));
    if (spec.orientation == RockOrientation::random_yaw) {
      rock.rotation = rock.rotation * Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
    }
    const double base = hf.surface_height(x, y) - kRockEmbedFraction * diameter;
    rock.translation = Vec3(x, y, base + 0.5 * diameter);
    rock.instance_id = static_cast<int>(k) + 1;
    rock.material_id = spec.material_id.value_or(0);
    rocks.push_back(std::move(rock));
  }
  return rocks;
}

}  // namespace icy
