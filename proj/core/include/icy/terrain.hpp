#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "icy/heightfield.hpp"
#include "icy/mesh.hpp"
#include "icy/types.hpp"

namespace icy {

enum class TerrainKind { smooth, rugged_low, rugged_mid, rugged_high, penitente };

TerrainKind parse_terrain_kind(std::string_view name);
std::string_view to_string(TerrainKind kind);

struct TerrainOptions {
  /// Peak-to-trough height of the penitente field.
  double penitente_height = 6.0;
};

/// Square heightfield of resolution x resolution samples spanning `extent`
/// meters, centred on the world origin.
///
/// The rugged presets are additive Perlin fBm whose amplitude, octave count
/// and base frequency grow with ruggedness. The penitente preset is ridged
/// noise, (1 - |perlin|)^3 over two octaves, rescaled to exactly
/// options.penitente_height between its lowest and highest sample.
HeightField generate_terrain(TerrainKind kind, double extent, int resolution, std::uint64_t seed,
                             const TerrainOptions& options = {});

enum class RockOrientation { random_yaw, aligned };

RockOrientation parse_rock_orientation(std::string_view name);
std::string_view to_string(RockOrientation orientation);

struct RockSpec {
  double density = 0.0;       // rocks per square meter
  double scale_min = 0.1;     // diameter, meters
  double scale_max = 1.0;
  double shape_irregularity = 0.5;
  RockOrientation orientation = RockOrientation::random_yaw;
  std::uint64_t seed = 0;
  /// Material override; rocks use the terrain material when unset.
  std::optional<int> material_id;

  void validate() const;
};

/// Fraction of the diameter buried below the local terrain surface.
inline constexpr double kRockEmbedFraction = 0.2;
/// Upper bound on the expected rock count, density * area.
inline constexpr double kMaxExpectedRocks = 1e6;

struct RockInstance {
  TriangleMesh mesh;  // local frame, meters, centred on the origin
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double diameter = 0.0;  // bounding-sphere diameter of `mesh`
  int instance_id = 0;
  int material_id = 0;

  /// Bounding-sphere centre in world space.
  Vec3 center() const { return translation; }
  Vec3 to_world(const Vec3& local) const { return rotation * local + translation; }
};

/// Geodesic sphere of unit radius (12 vertices at level 0, 4x faces per level).
TriangleMesh make_icosphere(int subdivisions);

/// Poisson-scatters rocks over the heightfield. Rock centres are uniform in
/// the terrain footprint, the bounding sphere's lowest point sits
/// kRockEmbedFraction * diameter below the surface, and instance ids run
/// 1..count in generation order.
std::vector<RockInstance> scatter_rocks(const HeightField& hf, const RockSpec& spec);

}  // namespace icy
