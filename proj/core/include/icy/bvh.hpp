#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "icy/types.hpp"

namespace icy {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // need not be normalized; t is in units of |direction|
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
};

struct TriangleHit {
  double t = 0.0;
  std::uint32_t triangle = 0;  // index into the input triangle list
  double b1 = 0.0;             // barycentric weight of vertex 1
  double b2 = 0.0;             // barycentric weight of vertex 2
};

/// Bounding volume hierarchy over a static triangle soup, built with binned
/// SAH splits. Queries are const and thread-safe.
class TriangleBvh {
 public:
  TriangleBvh() = default;
  TriangleBvh(std::span<const Vec3> positions,
              std::span<const std::array<std::uint32_t, 3>> triangles);

  /// Nearest hit with t in (t_min, t_max).
  std::optional<TriangleHit> intersect(const Ray& ray) const;
  /// True if any triangle is hit with t in (t_min, t_max).
  bool occluded(const Ray& ray) const;

  bool empty() const { return tris_.empty(); }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    std::array<double, 3> lo;
    std::array<double, 3> hi;
    std::uint32_t first;  // leaf: first triangle; inner: left child (right is first + 1)
    std::uint32_t count;  // 0 for inner nodes
  };
  struct Tri {
    Vec3 v0;
    Vec3 e1;
    Vec3 e2;
  };

  template <bool AnyHit>
  std::optional<TriangleHit> traverse(const Ray& ray) const;

  std::vector<Node> nodes_;
  std::vector<Tri> tris_;
  std::vector<std::uint32_t> ids_;
};

}  // namespace icy
