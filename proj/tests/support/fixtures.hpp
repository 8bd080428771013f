// Shared scene and image builders for the unit and acceptance tests.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "icy/camera.hpp"
#include "icy/heightfield.hpp"
#include "icy/lighting.hpp"
#include "icy/material.hpp"
#include "icy/mesh.hpp"
#include "icy/rng.hpp"
#include "icy/scene.hpp"
#include "icy/stereo.hpp"
#include "icy/terrain.hpp"

namespace icy::testing {

/// I.i.d. uniform texture in [lo, hi).
inline GrayImage random_texture(int width, int height, std::uint64_t seed, double lo = 0.0,
                                double hi = 1.0) {
  GrayImage img(width, height);
  CounterRng rng(seed);
  for (float& v : img.pixels()) v = static_cast<float>(rng.uniform(lo, hi));
  return img;
}

struct ShiftPair {
  GrayImage left;
  GrayImage right;
};

/// left(x, y) = base(x, y) and right(x, y) = base(x + shift, y) over a base
/// image `shift` columns wider, so every left pixel with x >= shift has its
/// exact match at x - shift in the right image.
inline ShiftPair make_shift_pair(int width, int height, int shift, std::uint64_t seed,
                                 double lo = 0.0, double hi = 1.0) {
  const GrayImage base = random_texture(width + shift, height, seed, lo, hi);
  ShiftPair p{GrayImage(width, height), GrayImage(width, height)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      p.left(x, y) = base(x, y);
      p.right(x, y) = base(x + shift, y);
    }
  }
  return p;
}

/// Flat square at z = 0 centred on the origin, two triangles.
inline HeightField flat_ground(double extent) {
  HeightField hf(2, 2, extent, 0.0);
  hf.origin_x = -0.5 * extent;
  hf.origin_y = -0.5 * extent;
  return hf;
}

/// Rig looking straight down from `height`, image "up" along +y.
inline StereoRig nadir_rig(double height, int width = 640, int image_height = 480) {
  StereoRig rig;
  rig.intrinsics.image_width = width;
  rig.intrinsics.image_height = image_height;
  rig.left = CameraPose::look_at(Vec3(0.0, 0.0, height), Vec3::Zero(), Vec3::UnitY());
  return rig;
}

/// Lighting with only the sun (no ambient, no planet).
inline Lighting sun_only(double elevation, double azimuth = 0.0, double irradiance = 50.26) {
  Lighting l;
  l.sun.irradiance = irradiance;
  l.sun.elevation = elevation;
  l.sun.azimuth = azimuth;
  l.ambient.radiance = Color::Zero();
  return l;
}

/// Fronto-parallel ground plane seen from `distance` by a nadir rig.
inline Scene plane_scene(double distance, const Material& material, const Lighting& lighting,
                         int width = 640, int height = 480, double extent = 60.0) {
  auto geometry = std::make_shared<SceneGeometry>(heightfield_to_mesh(flat_ground(extent)),
                                                  std::vector<RockInstance>{});
  return Scene::assemble(geometry, {material}, lighting, nadir_rig(distance, width, height));
}

/// Plane material with strong multi-octave albedo texture.
inline Material textured_material(double albedo = 0.5, double amplitude = 0.6,
                                  double frequency = 6.0, std::uint64_t seed = 11) {
  Material m;
  m.albedo = Color(albedo, albedo, albedo);
  m.roughness = 1.0;
  NoiseSpec ns;
  ns.basis = NoiseBasis::perlin;
  ns.seed = seed;
  ns.octaves = 4;
  ns.base_frequency = frequency;
  ns.amplitude = amplitude;
  m.texture_noise = std::make_shared<NoiseField>(ns);
  return m;
}

}  // namespace icy::testing
