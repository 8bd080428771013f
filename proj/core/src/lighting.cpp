#include "icy/lighting.hpp"

#include <cmath>
#include <stdexcept>

namespace icy {

double apparent_size(double body_diameter, double distance) {
  if (!(distance > 0.0)) throw std::invalid_argument("apparent_size: distance must be > 0");
  return 57.3 * body_diameter / distance;
}

Vec3 sun_direction(double elevation_deg, double azimuth_deg) {
  const double e = deg_to_rad(elevation_deg);
  const double a = deg_to_rad(azimuth_deg);
  return Vec3(std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)).normalized();
}

Vec3 sample_cone(const Vec3& axis, double half_angle, CounterRng& rng) {
  const double u = rng.uniform();
  const double v = rng.uniform();
  const double cos_max = std::cos(half_angle);
  const double cos_t = 1.0 - u * (1.0 - cos_max);
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double phi = 2.0 * kPi * v;
  // Orthonormal frame around the axis.
  const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t = axis.cross(helper).normalized();
  const Vec3 b = axis.cross(t);
  return (axis * cos_t + t * (sin_t * std::cos(phi)) + b * (sin_t * std::sin(phi))).normalized();
}

void SunLight::validate() const {
  if (!(irradiance >= 0.0)) throw std::invalid_argument("SunLight: irradiance must be >= 0");
  if (!(angular_diameter > 0.0)) throw std::invalid_argument("SunLight: angular_diameter must be > 0");
  if (!(elevation >= 0.0 && elevation <= 90.0)) {
    throw std::invalid_argument("SunLight: elevation must be in [0, 90]");
  }
  if (!(azimuth >= 0.0 && azimuth < 360.0)) {
    throw std::invalid_argument("SunLight: azimuth must be in [0, 360)");
  }
  if ((color < 0.0).any()) throw std::invalid_argument("SunLight: negative color component");
}

Vec3 sample_sun_cone(const SunLight& sun, CounterRng& rng) {
  return sample_cone(sun.direction(), 0.5 * sun.angular_diameter, rng);
}

double PlanetLight::angular_diameter() const {
  return deg_to_rad(apparent_size(body_diameter, distance));
}

double PlanetLight::solid_angle() const {
  return 2.0 * kPi * (1.0 - std::cos(0.5 * angular_diameter()));
}

double PlanetLight::radiance(double sun_irradiance) const {
  return disc_radiance_scale * sun_irradiance / (kPi * solid_angle());
}

void PlanetLight::validate() const {
  if (!enabled) return;
  if (!(body_diameter > 0.0)) throw std::invalid_argument("PlanetLight: body_diameter must be > 0");
  if (!(distance > 0.5 * body_diameter)) {
    throw std::invalid_argument("PlanetLight: distance must exceed body_diameter / 2");
  }
  if (!(disc_radiance_scale >= 0.0)) {
    throw std::invalid_argument("PlanetLight: disc_radiance_scale must be >= 0");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("PlanetLight: direction must be unit length");
  }
}

void AmbientLight::validate() const {
  if ((radiance < 0.0).any()) throw std::invalid_argument("AmbientLight: negative radiance");
}

AmbientLight Lighting::ambient_from_sun(const SunLight& sun, double fraction) {
  return AmbientLight{sun.color * (fraction * sun.irradiance / kPi)};
}

void Lighting::validate() const {
  sun.validate();
  planet.validate();
  ambient.validate();
}

}  // namespace icy
