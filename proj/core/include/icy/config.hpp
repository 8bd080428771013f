#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "icy/camera.hpp"
#include "icy/lighting.hpp"
#include "icy/noise.hpp"
#include "icy/render.hpp"
#include "icy/terrain.hpp"

namespace icy {

/// Invalid configuration. what() starts with the dotted key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

inline constexpr int kConfigVersion = 1;

// Every std::vector field below is a sweep axis. A scalar in the file is a
// one-element list.

struct TerrainConfig {
  std::vector<TerrainKind> kind{TerrainKind::rugged_low};
  double extent = 40.0;  // meters
  int resolution = 257;
  std::vector<std::uint64_t> seed{0};
  double penitente_height = 6.0;
};

struct RocksConfig {
  RockSpec spec;
  /// Separate grey albedo for rocks; they share the terrain material when unset.
  std::optional<double> albedo;
};

struct TextureNoiseConfig {
  std::vector<double> amplitude{0.0};  // 0 disables the modulation
  NoiseSpec noise{NoiseBasis::perlin, 0, 4, 2.0, 0.5, 2.0, 1.0};
};

struct TextureImageConfig {
  std::filesystem::path path;  // 8-bit PNG, sRGB encoded
  double tile_size = 1.0;      // meters
};

struct MaterialConfig {
  std::vector<double> albedo{0.8};  // grey
  double roughness = 0.5;
  std::vector<double> specular{0.0};
  std::vector<double> subsurface{0.0};
  std::vector<double> transmission{0.0};
  TextureNoiseConfig texture_noise;
  std::optional<TextureImageConfig> texture_image;
};

struct SunConfig {
  std::vector<double> irradiance{4.140, 50.26};  // W/m^2
  double angular_diameter = 0.01;               // radians
  std::vector<double> elevation{0.0, 30.0, 60.0};
  std::vector<double> azimuth{0.0, 30.0, 60.0};
};

struct PlanetConfig {
  bool enabled = false;
  double body_diameter = 120536.0;
  double distance = 238000.0;
  double elevation = 45.0;
  double azimuth = 180.0;
  double disc_radiance_scale = 0.3;
};

struct LightingConfig {
  SunConfig sun;
  PlanetConfig planet;
  double ambient_fraction = 0.01;
};

/// Left-camera placement relative to the terrain: (x, y) footprint position,
/// height above the surface there, yaw of the optical axis from +x toward +y
/// and pitch above the horizon (negative looks down).
struct RigConfig {
  CameraIntrinsics intrinsics;
  double baseline = 0.25;
  double x = 0.0;
  double y = 0.0;
  double height = 2.0;
  double yaw = 90.0;
  double pitch = -30.0;
};

struct SceneConfig {
  int version = kConfigVersion;
  std::optional<std::filesystem::path> output;
  std::size_t sweep_cap = 10000;
  TerrainConfig terrain;
  RocksConfig rocks;
  MaterialConfig material;
  LightingConfig lighting;
  RigConfig rig;
  RenderSettings render;

  /// Number of scenes in the cartesian product of all sweep axes.
  std::size_t sweep_size() const;
  /// Range checks on every value; throws ConfigError naming the key.
  void validate() const;
};

/// Parses YAML text. Unknown keys are errors; a top-level `scene` block
/// (written into manifests) is ignored. Relative texture paths resolve
/// against base_dir.
SceneConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
SceneConfig load_config(const std::filesystem::path& path);

/// Every sweep point as a config whose axes hold a single value. Terrain
/// axes vary slowest, so consecutive points share geometry.
std::vector<SceneConfig> expand_sweep(const SceneConfig& config);

/// YAML text of a config in the same dialect parse_config reads. The output
/// path is omitted; single-element axes are written as scalars.
std::string format_config(const SceneConfig& config);

/// Replaces every seed in the config with one derived from `seed`.
void override_seeds(SceneConfig& config, std::uint64_t seed);

}  // namespace icy
