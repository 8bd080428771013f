#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "icy/heightfield.hpp"
#include "icy/types.hpp"

namespace icy {

enum class NoiseBasis { perlin, worley_f1, midpoint_displacement, turbulence };

NoiseBasis parse_noise_basis(std::string_view name);
std::string_view to_string(NoiseBasis basis);

struct NoiseSpec {
  NoiseBasis basis = NoiseBasis::perlin;
  std::uint64_t seed = 0;
  int octaves = 1;
  double lacunarity = 2.0;      // frequency multiplier per octave
  double gain = 0.5;            // amplitude multiplier per octave
  double base_frequency = 1.0;  // cycles per meter
  double amplitude = 1.0;

  void validate() const;
  /// Sum of gain^o over all octaves.
  double octave_weight_sum() const;
};

/// Precomputed tables for one NoiseSpec. Construction is the only expensive
/// step; evaluation is const and thread-safe.
///
/// Basis ranges: perlin in [-1, 1], worley_f1 in [0, sqrt(2)] (one feature
/// point per unit cell), turbulence in [0, 1], midpoint_displacement in
/// [-1, 1] (bilinear lookup into a periodic diamond-square tile).
class NoiseField {
 public:
  explicit NoiseField(const NoiseSpec& spec);

  const NoiseSpec& spec() const { return spec_; }

  /// Single-octave basis value at p, in lattice units (no frequency scaling).
  double basis(const Vec2& p) const;
  /// Additive fBm: sum_o amplitude * gain^o * basis(p * base_frequency * lacunarity^o).
  double fbm(const Vec2& p) const;

  double perlin(const Vec2& p) const;
  double worley_f1(const Vec2& p) const;
  double midpoint(const Vec2& p) const;

  /// Feature point of the worley cell whose lower corner is (cx, cy).
  Vec2 feature_point(std::int64_t cx, std::int64_t cy) const;

  static constexpr int kMidpointTileSize = 64;        // samples per period
  static constexpr double kMidpointTilePeriod = 8.0;  // lattice units per period

 private:
  NoiseSpec spec_;
  std::array<std::uint8_t, 512> perm_{};
  std::vector<double> midpoint_tile_;
};

double eval_basis(const NoiseSpec& spec, const Vec2& p);
double eval_fbm(const NoiseSpec& spec, const Vec2& p);

/// Diamond-square heightfield of size x size samples with zero corners.
/// Offsets are uniform in [-a, a]; a starts at initial_amplitude and is
/// multiplied by roughness after every subdivision level. Each offset is a
/// hash of (seed, i, j), so the grid does not depend on evaluation order.
HeightField midpoint_displace(std::uint64_t seed, int size, double roughness,
                              double initial_amplitude);

}  // namespace icy
