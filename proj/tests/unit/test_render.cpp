#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "fixtures.hpp"
#include "icy/bvh.hpp"
#include "icy/render.hpp"

namespace icy {
namespace {

using testing::flat_ground;
using testing::nadir_rig;
using testing::plane_scene;
using testing::sun_only;

bool bitwise_equal(const Image<Color>& a, const Image<Color>& b) {
  if (!a.same_size(b)) return false;
  return std::memcmp(a.pixels().data(), b.pixels().data(), a.size() * sizeof(Color)) == 0;
}

Material gray(double albedo) {
  Material m;
  m.albedo = Color(albedo, albedo, albedo);
  m.roughness = 1.0;
  return m;
}

Scene one_rock_scene() {
  RockInstance rock;
  rock.mesh = make_icosphere(2);
  for (Vec3& v : rock.mesh.positions) v *= 0.4;
  rock.mesh.object_coords = rock.mesh.positions;
  compute_vertex_normals(rock.mesh);
  rock.diameter = 0.8;
  rock.translation = Vec3(0.3, -0.2, 0.25);
  rock.instance_id = 1;
  auto geometry = std::make_shared<SceneGeometry>(heightfield_to_mesh(flat_ground(40.0)),
                                                  std::vector<RockInstance>{rock});
  Lighting light = sun_only(50.0, 30.0);
  light.ambient.radiance = Color(0.05, 0.05, 0.05);
  return Scene::assemble(geometry, {gray(0.5)}, light, nadir_rig(4.0, 96, 72));
}

TEST(Render, PlaneDepthIsExact) {
  RenderSettings settings;
  settings.shadow_samples = 1;
  for (double z0 : {2.0, 5.0, 10.0}) {
    const Scene scene = plane_scene(z0, gray(0.5), sun_only(60.0), 160, 120);
    const RenderOutput out = render(scene, Eye::left, settings);
    ASSERT_EQ(out.stats.sky_pixels, 0u);
    for (float d : out.depth.pixels()) ASSERT_NEAR(d, z0, 1e-4 * z0);
    for (std::uint8_t s : out.semantic.pixels()) {
      ASSERT_EQ(s, static_cast<std::uint8_t>(SurfaceClass::terrain));
    }
  }
}

TEST(Render, LeftAndRightPlaneDepthsAgree) {
  RenderSettings settings;
  settings.shadow_samples = 1;
  const Scene scene = plane_scene(5.0, gray(0.5), sun_only(60.0), 96, 72);
  const StereoRenderOutput out = render_stereo(scene, settings);
  EXPECT_EQ(out.left.depth, out.right.depth);
  EXPECT_TRUE(scene.rig().pose(Eye::right).position.isApprox(
      scene.rig().left.position + 0.25 * scene.rig().left.rotation.col(0), 1e-15));
}

TEST(Render, GroundTruthDisparityFromDepth) {
  StereoRig rig;
  EXPECT_NEAR(rig.intrinsics.focal_px(), 32.0 / 60.0 * 640.0, 1e-12);
  EXPECT_NEAR(rig.disparity_for_depth(5.0), 341.3333 * 0.25 / 5.0, 1e-3);
  EXPECT_NEAR(rig.disparity_for_depth(5.0), 17.07, 0.005);
  EXPECT_NEAR(rig.disparity_for_depth(rig.intrinsics.focal_px() * rig.baseline), 1.0, 1e-12);
  EXPECT_NEAR(rig.disparity_for_depth(85.33), 1.0, 1e-4);
}

TEST(Render, ProjectedDisparityMatchesFormula) {
  // A world point on the plane projects into both cameras; the column
  // difference is f * B / Z.
  const StereoRig rig = nadir_rig(5.0);
  const Vec3 p(0.7, -0.4, 0.0);
  const CameraIntrinsics& K = rig.intrinsics;
  auto column = [&](Eye eye) {
    const Vec3 c = rig.pose(eye).world_to_camera(p);
    return K.focal_px() * c.x() / c.z() + K.principal_x();
  };
  EXPECT_NEAR(column(Eye::left) - column(Eye::right), rig.disparity_for_depth(5.0), 1e-9);
}

TEST(Render, OneRockMaskIds) {
  RenderSettings settings;
  settings.shadow_samples = 2;
  const Scene scene = one_rock_scene();
  const RenderOutput out = render(scene, Eye::left, settings);
  std::set<std::uint32_t> ids;
  std::size_t rock_pixels = 0;
  for (int y = 0; y < out.instance.height(); ++y) {
    for (int x = 0; x < out.instance.width(); ++x) {
      if (out.instance(x, y) == 0) continue;
      ids.insert(out.instance(x, y));
      EXPECT_EQ(out.semantic(x, y), static_cast<std::uint8_t>(SurfaceClass::rock));
      ++rock_pixels;
    }
  }
  EXPECT_EQ(ids, std::set<std::uint32_t>{1});
  EXPECT_GT(rock_pixels, 50u);
  EXPECT_FALSE(check_render_invariants(out, 1).has_value());
  EXPECT_TRUE(check_render_invariants(out, 0).has_value());
}

TEST(Render, DeterministicAndThreadIndependent) {
  const Scene scene = one_rock_scene();
  RenderSettings a;
  a.shadow_samples = 4;
  a.seed = 17;
  a.threads = 1;
  RenderSettings b = a;
  b.threads = 3;
  const RenderOutput r1 = render(scene, Eye::right, a);
  const RenderOutput r2 = render(scene, Eye::right, a);
  const RenderOutput r3 = render(scene, Eye::right, b);
  EXPECT_TRUE(bitwise_equal(r1.linear, r2.linear));
  EXPECT_TRUE(bitwise_equal(r1.linear, r3.linear));
  EXPECT_EQ(r1.rgb, r3.rgb);
  EXPECT_EQ(r1.depth, r3.depth);
  EXPECT_EQ(r1.instance, r3.instance);
}

TEST(Render, LambertPlaneRadiance) {
  const double e = 35.0;
  const double albedo = 0.5;
  RenderSettings settings;
  settings.shadow_samples = 16;
  const Scene scene = plane_scene(5.0, gray(albedo), sun_only(e), 32, 24);
  const RenderOutput out = render(scene, Eye::left, settings);
  const double expected = 50.26 * std::sin(e * kPi / 180.0) * albedo / kPi;
  // Each pixel averages 16 directions across the sun disc, so single pixels
  // scatter by a fraction of a percent around the analytic value.
  double sum = 0.0;
  for (const Color& c : out.linear.pixels()) {
    ASSERT_NEAR(c[0], expected, 0.01 * expected);
    sum += c[0];
  }
  EXPECT_NEAR(sum / static_cast<double>(out.linear.size()), expected, 2e-4 * expected);
}

TEST(Render, SunBelowTangentLeavesOnlyAmbient) {
  // Plane z = x faces (-1, 0, 1) / sqrt 2; a low sun from +x is behind it.
  HeightField ramp(2, 2, 40.0);
  ramp.origin_x = -20.0;
  ramp.origin_y = -20.0;
  ramp.at(0, 0) = ramp.at(0, 1) = -20.0;
  ramp.at(1, 0) = ramp.at(1, 1) = 20.0;
  auto geometry =
      std::make_shared<SceneGeometry>(heightfield_to_mesh(ramp), std::vector<RockInstance>{});
  Lighting light = sun_only(10.0, 0.0);
  light.ambient.radiance = Color(0.1, 0.2, 0.3);
  StereoRig rig;
  rig.intrinsics.image_width = 32;
  rig.intrinsics.image_height = 24;
  rig.left = CameraPose::look_at(Vec3(-4.0, 0.0, 4.0), Vec3(0.0, 0.0, 0.0));
  const Material m = gray(0.6);
  const Scene scene = Scene::assemble(geometry, {m}, light, rig);
  RenderSettings settings;
  settings.shadow_samples = 8;
  const RenderOutput out = render(scene, Eye::left, settings);
  ASSERT_EQ(out.stats.sky_pixels, 0u);
  for (const Color& c : out.linear.pixels()) {
    ASSERT_TRUE(c.isApprox(m.albedo * light.ambient.radiance, 1e-12));
  }
}

TEST(Render, UnassembledSceneThrows) {
  EXPECT_THROW(render(Scene{}, Eye::left, RenderSettings{}), std::invalid_argument);
  EXPECT_THROW(render_stereo(Scene{}, RenderSettings{}), std::invalid_argument);
}

TEST(Render, InvariantCheckerCatchesViolations) {
  RenderOutput out;
  out.depth = Image<float>(2, 1, 0.0f);
  out.semantic = Image<std::uint8_t>(2, 1, 0);
  out.instance = Image<std::uint32_t>(2, 1, 0);
  out.rgb = Image<Rgb8>(2, 1);
  EXPECT_FALSE(check_render_invariants(out, 0).has_value());
  out.depth(0, 0) = 1.0f;  // depth on a sky pixel
  EXPECT_TRUE(check_render_invariants(out, 0).has_value());
  out.semantic(0, 0) = static_cast<std::uint8_t>(SurfaceClass::rock);
  EXPECT_TRUE(check_render_invariants(out, 3).has_value());  // rock without id
  out.instance(0, 0) = 2;
  EXPECT_FALSE(check_render_invariants(out, 3).has_value());
  EXPECT_TRUE(check_render_invariants(out, 1).has_value());  // id not in scene
  out.semantic(0, 0) = static_cast<std::uint8_t>(SurfaceClass::terrain);
  EXPECT_TRUE(check_render_invariants(out, 3).has_value());  // id on terrain
}

TEST(Tonemap, Examples) {
  EXPECT_EQ(encode_channel(0.0, 1.0), 0);
  EXPECT_EQ(encode_channel(1.0, 1.0), 255);
  EXPECT_EQ(encode_channel(3.0, 0.5), 255);
  EXPECT_EQ(encode_channel(0.25, 2.0), 188);
  EXPECT_EQ(encode_channel(0.5, 1.0, false), 128);
  EXPECT_EQ(encode_channel(-1.0, 1.0), 0);
  std::size_t clipped = 0;
  Image<Color> img(2, 1, Color(0.2, 0.2, 0.2));
  img(1, 0) = Color(0.2, 1.5, 0.2);
  tonemap(img, 1.0, true, &clipped);
  EXPECT_EQ(clipped, 1u);
}

TEST(Tonemap, MonotoneInRadiance) {
  int prev = 0;
  for (int i = 0; i <= 1000; ++i) {
    const int v = encode_channel(i / 1000.0, 1.0);
    ASSERT_GE(v, prev);
    prev = v;
  }
}

// Independent Moller-Trumbore intersection for the BVH oracle.
std::optional<double> brute_force(const std::vector<Vec3>& pos,
                                  const std::vector<std::array<std::uint32_t, 3>>& tris,
                                  const Ray& ray) {
  std::optional<double> best;
  for (const auto& t : tris) {
    const Vec3 e1 = pos[t[1]] - pos[t[0]];
    const Vec3 e2 = pos[t[2]] - pos[t[0]];
    const Vec3 p = ray.direction.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-14) continue;
    const Vec3 s = ray.origin - pos[t[0]];
    const double u = s.dot(p) / det;
    if (u < 0.0 || u > 1.0) continue;
    const Vec3 q = s.cross(e1);
    const double v = ray.direction.dot(q) / det;
    if (v < 0.0 || u + v > 1.0) continue;
    const double dist = e2.dot(q) / det;
    if (dist > ray.t_min && dist < ray.t_max && (!best || dist < *best)) best = dist;
  }
  return best;
}

TEST(Bvh, MatchesBruteForce) {
  CounterRng rng(21);
  std::vector<Vec3> pos;
  std::vector<std::array<std::uint32_t, 3>> tris;
  for (std::uint32_t i = 0; i < 400; ++i) {
    const Vec3 c(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    for (int k = 0; k < 3; ++k) {
      pos.push_back(c + Vec3(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)));
    }
    tris.push_back({3 * i, 3 * i + 1, 3 * i + 2});
  }
  const TriangleBvh bvh(pos, tris);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    Ray ray;
    ray.origin = Vec3(rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(-8, 8));
    ray.direction = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const auto expected = brute_force(pos, tris, ray);
    const auto got = bvh.intersect(ray);
    ASSERT_EQ(expected.has_value(), got.has_value());
    EXPECT_EQ(bvh.occluded(ray), expected.has_value());
    if (expected) {
      ++hits;
      EXPECT_NEAR(got->t, *expected, 1e-9 * std::max(1.0, *expected));
    }
  }
  EXPECT_GT(hits, 100);
}

}  // namespace
}  // namespace icy
