#include <gtest/gtest.h>

#include <cmath>

#include "icy/lighting.hpp"

namespace icy {
namespace {

constexpr double kDeg = kPi / 180.0;

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

TEST(ApparentSize, SmallAngleFormula) {
  EXPECT_DOUBLE_EQ(apparent_size(1.0, 57.3), 1.0);
  EXPECT_EQ(apparent_size(0.0, 10.0), 0.0);
  const double saturn = apparent_size(120536.0, 238000.0);
  EXPECT_NEAR(saturn, 29.02, 0.01);
  // The small-angle value overestimates the flat-disc angle 2 atan(D / 2d)
  // by about 2.1% and underestimates the sphere's 2 asin(D / 2d) by about 1.1%.
  const double disc = 2.0 * std::atan(120536.0 / (2.0 * 238000.0)) / kDeg;
  const double sphere = 2.0 * std::asin(120536.0 / (2.0 * 238000.0)) / kDeg;
  EXPECT_NEAR(disc, 28.42, 0.01);
  EXPECT_NEAR(saturn / disc - 1.0, 0.021, 0.001);
  EXPECT_LT(std::abs(saturn - sphere) / sphere, 0.02);
  EXPECT_THROW(apparent_size(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(apparent_size(1.0, -3.0), std::invalid_argument);
}

TEST(SunDirection, Examples) {
  for (double az : {0.0, 45.0, 271.0}) {
    EXPECT_TRUE(sun_direction(90.0, az).isApprox(Vec3(0, 0, 1), 1e-12));
  }
  EXPECT_TRUE(sun_direction(0.0, 0.0).isApprox(Vec3(1, 0, 0), 1e-12));
  const Vec3 d = sun_direction(30.0, 90.0);
  EXPECT_NEAR(d.x(), 0.0, 1e-12);
  EXPECT_NEAR(d.y(), std::cos(30.0 * kDeg), 1e-12);
  EXPECT_NEAR(d.z(), 0.5, 1e-12);
  EXPECT_NEAR(sun_direction(17.0, 211.0).norm(), 1.0, 1e-15);
}

TEST(SunCone, DegenerateConeReturnsAxis) {
  SunLight sun;
  sun.angular_diameter = 0.0;
  sun.elevation = 35.0;
  sun.azimuth = 120.0;
  CounterRng rng(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_TRUE(sample_sun_cone(sun, rng).isApprox(sun.direction(), 1e-12));
  }
}

TEST(SunCone, SamplesStayInsideAndAverageToAxis) {
  SunLight sun;
  sun.elevation = 40.0;
  sun.azimuth = 75.0;
  const Vec3 axis = sun.direction();
  CounterRng rng(7);
  Vec3 mean = Vec3::Zero();
  double max_angle = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = sample_sun_cone(sun, rng);
    ASSERT_NEAR(d.norm(), 1.0, 1e-12);
    max_angle = std::max(max_angle, angle_between(d, axis));
    mean += d;
  }
  mean /= n;
  EXPECT_LE(max_angle, 0.5 * sun.angular_diameter + 1e-12);
  EXPECT_GT(max_angle, 0.45 * sun.angular_diameter);
  EXPECT_LT((mean - axis).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(SunCone, UniformOverSolidAngle) {
  // For a uniform cone the fraction inside half the half-angle is
  // (1 - cos(a/2)) / (1 - cos a).
  const double a = 0.3;
  CounterRng rng(3);
  const int n = 100000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    if (angle_between(sample_cone(Vec3::UnitZ(), a, rng), Vec3::UnitZ()) < 0.5 * a) ++inside;
  }
  const double expected = (1.0 - std::cos(0.5 * a)) / (1.0 - std::cos(a));
  EXPECT_NEAR(static_cast<double>(inside) / n, expected, 0.005);
}

TEST(PlanetLight, RadianceFromApparentSize) {
  PlanetLight p;
  p.enabled = true;
  const double ang = p.angular_diameter();
  EXPECT_NEAR(ang, apparent_size(p.body_diameter, p.distance) * kDeg, 1e-15);
  const double half = 0.5 * ang;
  EXPECT_NEAR(p.solid_angle(), 2.0 * kPi * (1.0 - std::cos(half)), 1e-12);
  EXPECT_NEAR(p.radiance(50.26), 0.3 * 50.26 / (kPi * p.solid_angle()), 1e-9);
  // Integrated over the disc at normal incidence the planet delivers
  // approximately scale * E / pi.
  EXPECT_NEAR(p.radiance(10.0) * p.solid_angle(), 0.3 * 10.0 / kPi, 1e-9);
}

TEST(PlanetLight, Validation) {
  PlanetLight p;
  p.enabled = true;
  EXPECT_NO_THROW(p.validate());
  p.distance = 0.4 * p.body_diameter;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.distance = 238000.0;
  p.disc_radiance_scale = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.enabled = false;  // disabled planets are not checked
  EXPECT_NO_THROW(p.validate());
}

TEST(SunLight, Validation) {
  SunLight s;
  EXPECT_NO_THROW(s.validate());
  s.irradiance = -1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.angular_diameter = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.elevation = 91.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.azimuth = 360.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(AmbientLight, DefaultIsOnePercentOfSunOverPi) {
  SunLight s;
  s.irradiance = 50.26;
  s.color = Color(1.0, 0.5, 0.25);
  const AmbientLight a = Lighting::ambient_from_sun(s);
  EXPECT_TRUE(a.radiance.isApprox(0.01 * 50.26 / kPi * s.color, 1e-15));
  AmbientLight bad;
  bad.radiance = Color(0.0, -0.1, 0.0);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace icy
