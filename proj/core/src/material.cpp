#include "icy/material.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icy {
namespace {

constexpr double kRoughnessEpsilon = 1e-3;

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

double edge_weight(double t) {
  const double d = std::min(t, 1.0 - t);
  return std::clamp(1.0 - d / kTileBlendMargin, 0.0, 1.0);
}

}  // namespace

void Material::validate() const {
  for (int c = 0; c < 3; ++c) {
    if (!in_unit(albedo[c])) throw std::invalid_argument("Material: albedo components must be in [0, 1]");
  }
  if (!in_unit(roughness)) throw std::invalid_argument("Material: roughness must be in [0, 1]");
  if (!in_unit(specular)) throw std::invalid_argument("Material: specular must be in [0, 1]");
  if (!in_unit(subsurface)) throw std::invalid_argument("Material: subsurface must be in [0, 1]");
  if (!in_unit(transmission)) throw std::invalid_argument("Material: transmission must be in [0, 1]");
  if (texture_image) {
    if (texture_image->texels.empty()) throw std::invalid_argument("Material: empty texture image");
    if (!(texture_image->tile_size > 0.0)) throw std::invalid_argument("Material: tile_size must be > 0");
  }
}

Color texel_lookup(const Image<Color>& texels, double u, double v) {
  const int w = texels.width();
  const int h = texels.height();
  const double gx = (u - std::floor(u)) * w - 0.5;
  const double gy = (v - std::floor(v)) * h - 0.5;
  const double fx = std::floor(gx);
  const double fy = std::floor(gy);
  const double tx = gx - fx;
  const double ty = gy - fy;
  auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
  const int x0 = wrap(static_cast<int>(fx), w);
  const int y0 = wrap(static_cast<int>(fy), h);
  const int x1 = wrap(x0 + 1, w);
  const int y1 = wrap(y0 + 1, h);
  const Color top = texels(x0, y0) * (1.0 - tx) + texels(x1, y0) * tx;
  const Color bottom = texels(x0, y1) * (1.0 - tx) + texels(x1, y1) * tx;
  return top * (1.0 - ty) + bottom * ty;
}

Color sample_albedo(const Material& m, const Vec3& object_coord) {
  Color out = m.albedo;
  if (m.texture_noise) {
    const NoiseSpec& spec = m.texture_noise->spec();
    const double n = m.texture_noise->fbm(object_coord.head<2>()) / spec.octave_weight_sum();
    out *= 1.0 + std::clamp(n, -spec.amplitude, spec.amplitude);
  }
  if (m.texture_image) {
    const double u = object_coord.x() / m.texture_image->tile_size;
    const double v = object_coord.y() / m.texture_image->tile_size;
    const double w = std::max(edge_weight(u - std::floor(u)), edge_weight(v - std::floor(v)));
    Color texel = texel_lookup(m.texture_image->texels, u, v);
    if (w > 0.0) {
      texel = texel * (1.0 - w) + texel_lookup(m.texture_image->texels, u + 0.5, v + 0.5) * w;
    }
    out *= texel;
  }
  return out.max(0.0).min(1.0);
}

double wrap_diffuse(double cos_theta, double subsurface) {
  return std::max(0.0, (cos_theta + subsurface) / (1.0 + subsurface));
}

double blinn_phong_exponent(double roughness) {
  const double r = std::max(roughness, kRoughnessEpsilon);
  return 2.0 / (r * r) - 2.0;
}

double specular_lobe(const Material& m, const Vec3& n, const Vec3& wi, const Vec3& wo) {
  if (n.dot(wi) <= 0.0 || n.dot(wo) <= 0.0) return 0.0;
  const Vec3 sum = wi + wo;
  const double len = sum.norm();
  if (len == 0.0) return 0.0;
  const double cos_h = std::max(0.0, n.dot(sum / len));
  const double e = blinn_phong_exponent(m.roughness);
  return (e + 8.0) / (8.0 * kPi) * std::pow(cos_h, e);
}

Color shade(const Material& m, const Vec3& n, const Vec3& wi, const Vec3& wo,
            const Color& albedo_at_point) {
  const double cos_i = n.dot(wi);
  const double diffuse_weight =
      (1.0 - m.specular) * (1.0 - m.transmission) * wrap_diffuse(cos_i, m.subsurface) / kPi;
  Color f = albedo_at_point * diffuse_weight;
  if (m.specular > 0.0 && cos_i > 0.0) {
    f += m.specular * specular_lobe(m, n, wi, wo) * cos_i;
  }
  return f;
}

}  // namespace icy
