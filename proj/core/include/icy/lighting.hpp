#pragma once

#include "icy/rng.hpp"
#include "icy/types.hpp"

namespace icy {

/// Small-angle apparent size in degrees: 57.3 * diameter / distance.
/// Throws std::invalid_argument when distance <= 0.
double apparent_size(double body_diameter, double distance);

/// Unit vector toward a source at the given elevation/azimuth (degrees).
/// Azimuth is measured from +x toward +y; +z is up.
Vec3 sun_direction(double elevation_deg, double azimuth_deg);

/// Direction uniformly distributed over the solid angle of a cone.
Vec3 sample_cone(const Vec3& axis, double half_angle, CounterRng& rng);

struct SunLight {
  double irradiance = 50.26;       // W/m^2, normal incidence
  double angular_diameter = 0.01;  // radians
  double elevation = 30.0;         // degrees, [0, 90]
  double azimuth = 0.0;            // degrees, [0, 360)
  Color color{1.0, 1.0, 1.0};

  Vec3 direction() const { return sun_direction(elevation, azimuth); }
  void validate() const;
};

Vec3 sample_sun_cone(const SunLight& sun, CounterRng& rng);

/// Parent planet as a uniform-radiance disc light.
struct PlanetLight {
  bool enabled = false;
  double body_diameter = 120536.0;  // km
  double distance = 238000.0;       // km
  Vec3 direction{0.0, 0.0, 1.0};
  double disc_radiance_scale = 0.3;

  /// Full angular diameter in radians, from the small-angle apparent size.
  double angular_diameter() const;
  double solid_angle() const;
  /// disc_radiance_scale * sun_irradiance / (pi * solid_angle).
  double radiance(double sun_irradiance) const;
  void validate() const;
};

struct AmbientLight {
  Color radiance{0.0, 0.0, 0.0};  // W/(m^2 sr)
  void validate() const;
};

struct Lighting {
  SunLight sun;
  PlanetLight planet;
  AmbientLight ambient;

  /// Ambient radiance of `fraction` * sun irradiance / pi, tinted by the sun colour.
  static AmbientLight ambient_from_sun(const SunLight& sun, double fraction = 0.01);
  void validate() const;
};

}  // namespace icy
