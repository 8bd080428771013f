#include "icy/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "icy/parallel.hpp"
#include "icy/rng.hpp"

namespace icy {
namespace {

constexpr double kShadowBias = 2e-4;  // meters along the geometric normal

// Mean over cone samples of visibility * shade(direction).
Color cone_light(const Scene& scene, const SurfacePoint& sp, const Material& material,
                 const Color& albedo, const Vec3& wo, const Vec3& axis, double half_angle,
                 int samples, CounterRng& rng) {
  Color sum = Color::Zero();
  const Vec3 origin = sp.position + kShadowBias * sp.geometric_normal;
  for (int s = 0; s < samples; ++s) {
    const Vec3 wi = sample_cone(axis, half_angle, rng);
    const Color f = shade(material, sp.shading_normal, wi, wo, albedo);
    if ((f <= 0.0).all()) continue;
    if (wi.dot(sp.geometric_normal) <= 0.0) continue;
    Ray shadow;
    shadow.origin = origin;
    shadow.direction = wi;
    if (!scene.geometry().bvh().occluded(shadow)) sum += f;
  }
  return sum / static_cast<double>(samples);
}

}  // namespace

void RenderSettings::validate() const {
  if (shadow_samples < 1) throw std::invalid_argument("RenderSettings: shadow_samples must be >= 1");
  if (!(exposure > 0.0)) throw std::invalid_argument("RenderSettings: exposure must be > 0");
}

std::uint8_t encode_channel(double linear, double exposure, bool srgb) {
  double v = std::clamp(linear * exposure, 0.0, 1.0);
  if (std::isnan(v)) v = 0.0;
  if (srgb) {
    v = v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
  }
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Rgb8 tonemap(const Color& linear, double exposure, bool srgb) {
  return {encode_channel(linear[0], exposure, srgb), encode_channel(linear[1], exposure, srgb),
          encode_channel(linear[2], exposure, srgb)};
}

Image<Rgb8> tonemap(const Image<Color>& linear, double exposure, bool srgb,
                    std::size_t* clipped) {
  if (!(exposure > 0.0)) throw std::invalid_argument("tonemap: exposure must be > 0");
  Image<Rgb8> out(linear.width(), linear.height());
  std::size_t n_clipped = 0;
  for (std::size_t i = 0; i < linear.size(); ++i) {
    out[i] = tonemap(linear[i], exposure, srgb);
    if ((linear[i] * exposure > 1.0).any()) ++n_clipped;
  }
  if (clipped != nullptr) *clipped = n_clipped;
  return out;
}

RenderOutput render(const Scene& scene, Eye eye, const RenderSettings& settings) {
  if (!scene.assembled()) throw std::invalid_argument("render: scene is not assembled");
  settings.validate();
  const StereoRig& rig = scene.rig();
  const CameraIntrinsics& K = rig.intrinsics;
  const CameraPose pose = rig.pose(eye);
  const Lighting& lights = scene.lighting();
  const int width = K.image_width;
  const int height = K.image_height;

  RenderOutput out;
  out.linear = Image<Color>(width, height, Color::Zero());
  out.depth = Image<float>(width, height, 0.0f);
  out.semantic = Image<std::uint8_t>(width, height, 0);
  out.instance = Image<std::uint32_t>(width, height, 0);

  const double sun_half = 0.5 * lights.sun.angular_diameter;
  const Vec3 sun_axis = lights.sun.direction();
  const Color sun_irradiance = lights.sun.color * lights.sun.irradiance;
  const bool planet_on = lights.planet.enabled;
  const double planet_half = planet_on ? 0.5 * lights.planet.angular_diameter() : 0.0;
  const Color planet_irradiance =
      planet_on ? Color(lights.sun.color * (lights.planet.radiance(lights.sun.irradiance) *
                                            lights.planet.solid_angle()))
                : Color(Color::Zero());
  const std::uint64_t eye_key = eye == Eye::left ? 0 : 1;

  parallel_for(static_cast<std::size_t>(height), settings.threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < width; ++x) {
      Ray ray;
      ray.origin = pose.position;
      ray.direction = pose.camera_to_world_dir(K.pixel_direction(x, y));
      const auto hit = scene.geometry().bvh().intersect(ray);
      if (!hit) continue;

      const SurfacePoint sp = scene.geometry().surface_at(*hit, ray);
      const Material& material = scene.material(sp.material_id);
      const Color albedo = sample_albedo(material, sp.object_coord);
      const Vec3 wo = -ray.direction.normalized();
      CounterRng rng(settings.seed,
                     hash_words({eye_key, static_cast<std::uint64_t>(y) * width + x}));

      Color radiance = sun_irradiance * cone_light(scene, sp, material, albedo, wo, sun_axis,
                                                   sun_half, settings.shadow_samples, rng);
      if (planet_on) {
        radiance += planet_irradiance * cone_light(scene, sp, material, albedo, wo,
                                                   lights.planet.direction, planet_half,
                                                   settings.shadow_samples, rng);
      }
      radiance += albedo * ((1.0 - material.specular) * (1.0 - material.transmission)) *
                  lights.ambient.radiance;

      out.linear(x, y) = radiance;
      // With a z = 1 camera-frame direction the ray parameter is the planar depth.
      out.depth(x, y) = static_cast<float>(hit->t);
      out.semantic(x, y) = static_cast<std::uint8_t>(sp.surface);
      out.instance(x, y) = static_cast<std::uint32_t>(sp.instance_id);
    }
  });

  out.rgb = tonemap(out.linear, settings.exposure, settings.srgb, &out.stats.clipped_pixels);
  out.stats.sky_pixels = static_cast<std::size_t>(
      std::count(out.semantic.pixels().begin(), out.semantic.pixels().end(),
                 static_cast<std::uint8_t>(SurfaceClass::sky)));
  return out;
}

StereoRenderOutput render_stereo(const Scene& scene, const RenderSettings& settings) {
  if (!scene.assembled()) throw std::invalid_argument("render_stereo: scene is not assembled");
  return {render(scene, Eye::left, settings), render(scene, Eye::right, settings)};
}

std::optional<std::string> check_render_invariants(const RenderOutput& out,
                                                   std::size_t rock_count) {
  if (!out.depth.same_size(out.semantic) || !out.depth.same_size(out.instance) ||
      !out.depth.same_size(out.rgb)) {
    return "image dimensions differ";
  }
  for (int y = 0; y < out.depth.height(); ++y) {
    for (int x = 0; x < out.depth.width(); ++x) {
      const float d = out.depth(x, y);
      const auto s = static_cast<SurfaceClass>(out.semantic(x, y));
      const std::uint32_t id = out.instance(x, y);
      const std::string at = " at (" + std::to_string(x) + ", " + std::to_string(y) + ")";
      if (s == SurfaceClass::sky) {
        if (d != 0.0f) return "sky pixel with non-zero depth" + at;
      } else if (!(d > 0.0f) || !std::isfinite(d)) {
        return "surface pixel without positive depth" + at;
      }
      if (s != SurfaceClass::sky && s != SurfaceClass::terrain && s != SurfaceClass::rock) {
        return "unknown semantic class" + at;
      }
      if (id > 0 && s != SurfaceClass::rock) return "instance id on non-rock pixel" + at;
      if (s == SurfaceClass::rock && id == 0) return "rock pixel without instance id" + at;
      if (id > rock_count) return "instance id not in scene" + at;
    }
  }
  return std::nullopt;
}

}  // namespace icy
