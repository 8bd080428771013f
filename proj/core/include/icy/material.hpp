#pragma once

#include <memory>

#include "icy/image.hpp"
#include "icy/noise.hpp"
#include "icy/types.hpp"

namespace icy {

/// Linear-RGB image repeated every `tile_size` meters in object x/y.
struct TextureImage {
  Image<Color> texels;
  double tile_size = 1.0;
};

/// Width of the cross-fade band at each tile edge, as a fraction of the tile.
inline constexpr double kTileBlendMargin = 0.1;

/// Parametric snow/ice surface.
struct Material {
  Color albedo{0.8, 0.8, 0.8};
  double roughness = 0.5;
  double specular = 0.0;
  double subsurface = 0.0;
  double transmission = 0.0;
  /// Multiplicative albedo modulation; amplitude is the maximum relative change.
  std::shared_ptr<const NoiseField> texture_noise;
  std::shared_ptr<const TextureImage> texture_image;

  void validate() const;
};

/// Albedo at an object-space point, always within [0, 1]^3.
///
/// base * clamp(1 + n) * texel, where n = fbm / sum(gain^o) is clamped to
/// [-amplitude, amplitude] and the texel comes from a planar x/y mapping.
/// Near tile edges the texel is cross-faded with the copy offset by half a
/// tile, which hides seams while keeping the result periodic in tile_size.
Color sample_albedo(const Material& m, const Vec3& object_coord);

/// Bilinear, wrapping texel lookup at tile coordinates (u, v).
Color texel_lookup(const Image<Color>& texels, double u, double v);

/// max(0, (c + s) / (1 + s)).
double wrap_diffuse(double cos_theta, double subsurface);

/// Blinn-Phong exponent from roughness: 2 / max(roughness, eps)^2 - 2.
double blinn_phong_exponent(double roughness);

/// Normalized Blinn-Phong BRDF value (e + 8) / (8 pi) * (n.h)^e. Zero when
/// either direction is below the surface. Symmetric in (wi, wo).
double specular_lobe(const Material& m, const Vec3& n, const Vec3& wi, const Vec3& wo);

/// Reflected radiance per unit normal-incidence irradiance arriving from wi
/// (the cosine factor is included). All vectors unit length.
///
///   (1 - specular) * (1 - transmission) * albedo / pi * wrap(n.wi, subsurface)
///   + specular * lobe(wi, wo) * max(0, n.wi)
Color shade(const Material& m, const Vec3& n, const Vec3& wi, const Vec3& wo,
            const Color& albedo_at_point);

}  // namespace icy
