#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "icy/image.hpp"
#include "icy/scene.hpp"

namespace icy {

struct RenderSettings {
  int shadow_samples = 16;
  double exposure = 1.0;  // multiplies linear radiance before tonemapping
  bool srgb = true;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency; does not affect output

  void validate() const;
};

struct RenderStats {
  std::size_t clipped_pixels = 0;  // any channel saturated by tonemapping
  std::size_t sky_pixels = 0;
};

struct RenderOutput {
  Image<Rgb8> rgb;
  Image<Color> linear;  // radiance, W/(m^2 sr)
  Image<float> depth;   // z along the optical axis, meters; 0 = sky
  Image<std::uint8_t> semantic;  // SurfaceClass values
  Image<std::uint32_t> instance; // rock instance id, 0 elsewhere
  RenderStats stats;
};

struct StereoRenderOutput {
  RenderOutput left;
  RenderOutput right;
};

/// Direct-lighting ray tracer. Per pixel: one primary ray through the pixel
/// centre; sun and planet visibility averaged over `shadow_samples` cone
/// samples; a uniform ambient term. The per-pixel generator is keyed by
/// (seed, eye, pixel index), so output is independent of thread count.
RenderOutput render(const Scene& scene, Eye eye, const RenderSettings& settings);

StereoRenderOutput render_stereo(const Scene& scene, const RenderSettings& settings);

/// Linear -> 8-bit. Clamps linear * exposure to [0, 1], then applies the
/// sRGB transfer curve when srgb is set.
std::uint8_t encode_channel(double linear, double exposure, bool srgb = true);
Rgb8 tonemap(const Color& linear, double exposure, bool srgb = true);
Image<Rgb8> tonemap(const Image<Color>& linear, double exposure, bool srgb = true,
                    std::size_t* clipped = nullptr);

/// Checks the depth/semantic/instance consistency rules of a render and that
/// every instance id present belongs to the scene. Returns a description of
/// the first violation, or nullopt.
std::optional<std::string> check_render_invariants(const RenderOutput& out,
                                                   std::size_t rock_count);

}  // namespace icy
