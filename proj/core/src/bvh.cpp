#include "icy/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace icy {
namespace {

constexpr int kBins = 12;
constexpr std::uint32_t kMaxLeafSize = 4;
constexpr double kBaryEpsilon = 1e-10;

struct Bounds {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void grow(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void grow(const Bounds& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  double area() const {
    if (lo.x() > hi.x()) return 0.0;
    const Vec3 d = hi - lo;
    return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.z() * d.x());
  }
};

struct BuildPrim {
  Bounds bounds;
  Vec3 centroid;
  std::uint32_t id;
};

}  // namespace

TriangleBvh::TriangleBvh(std::span<const Vec3> positions,
                         std::span<const std::array<std::uint32_t, 3>> triangles) {
  if (triangles.empty()) return;
  std::vector<BuildPrim> prims(triangles.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    BuildPrim& p = prims[i];
    for (std::uint32_t v : triangles[i]) p.bounds.grow(positions[v]);
    p.centroid = 0.5 * (p.bounds.lo + p.bounds.hi);
    p.id = static_cast<std::uint32_t>(i);
  }
  nodes_.reserve(2 * triangles.size() / kMaxLeafSize + 1);

  struct Task {
    std::uint32_t node;
    std::uint32_t begin;
    std::uint32_t end;
  };
  std::vector<Task> stack;
  nodes_.push_back({});
  stack.push_back({0, 0, static_cast<std::uint32_t>(prims.size())});

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    Bounds bounds;
    Bounds centroid_bounds;
    for (std::uint32_t i = task.begin; i < task.end; ++i) {
      bounds.grow(prims[i].bounds);
      centroid_bounds.grow(prims[i].centroid);
    }
    Node& node = nodes_[task.node];
    for (int a = 0; a < 3; ++a) {
      node.lo[a] = bounds.lo[a];
      node.hi[a] = bounds.hi[a];
    }
    const std::uint32_t count = task.end - task.begin;
    auto make_leaf = [&] {
      nodes_[task.node].first = task.begin;
      nodes_[task.node].count = count;
    };
    if (count <= kMaxLeafSize) {
      make_leaf();
      continue;
    }

    // Binned SAH over the centroid extent of each axis.
    int best_axis = -1;
    int best_split = 0;
    double best_cost = static_cast<double>(count) * bounds.area();
    for (int axis = 0; axis < 3; ++axis) {
      const double lo = centroid_bounds.lo[axis];
      const double extent = centroid_bounds.hi[axis] - lo;
      if (!(extent > 0.0)) continue;
      std::array<Bounds, kBins> bin_bounds;
      std::array<std::uint32_t, kBins> bin_count{};
      for (std::uint32_t i = task.begin; i < task.end; ++i) {
        int b = static_cast<int>(kBins * (prims[i].centroid[axis] - lo) / extent);
        b = std::clamp(b, 0, kBins - 1);
        bin_bounds[b].grow(prims[i].bounds);
        ++bin_count[b];
      }
      std::array<double, kBins> right_area{};
      std::array<std::uint32_t, kBins> right_count{};
      Bounds acc;
      std::uint32_t acc_count = 0;
      for (int b = kBins - 1; b > 0; --b) {
        acc.grow(bin_bounds[b]);
        acc_count += bin_count[b];
        right_area[b] = acc.area();
        right_count[b] = acc_count;
      }
      acc = Bounds{};
      acc_count = 0;
      for (int b = 0; b < kBins - 1; ++b) {
        acc.grow(bin_bounds[b]);
        acc_count += bin_count[b];
        const double cost = acc_count * acc.area() + right_count[b + 1] * right_area[b + 1];
        if (acc_count > 0 && right_count[b + 1] > 0 && cost < best_cost) {
          best_cost = cost;
          best_axis = axis;
          best_split = b + 1;
        }
      }
    }

    std::uint32_t mid = 0;
    if (best_axis >= 0) {
      const double lo = centroid_bounds.lo[best_axis];
      const double extent = centroid_bounds.hi[best_axis] - lo;
      auto it = std::partition(prims.begin() + task.begin, prims.begin() + task.end,
                               [&](const BuildPrim& p) {
                                 int b = static_cast<int>(kBins * (p.centroid[best_axis] - lo) / extent);
                                 return std::clamp(b, 0, kBins - 1) < best_split;
                               });
      mid = static_cast<std::uint32_t>(it - prims.begin());
    } else {
      // SAH found nothing better; fall back to a median split on the widest
      // centroid axis, or stop if all centroids coincide.
      int axis = 0;
      const Vec3 ext = centroid_bounds.hi - centroid_bounds.lo;
      ext.maxCoeff(&axis);
      if (!(ext[axis] > 0.0) || count <= 2 * kMaxLeafSize) {
        make_leaf();
        continue;
      }
      mid = task.begin + count / 2;
      std::nth_element(prims.begin() + task.begin, prims.begin() + mid, prims.begin() + task.end,
                       [axis](const BuildPrim& a, const BuildPrim& b) {
                         return a.centroid[axis] < b.centroid[axis];
                       });
    }
    if (mid == task.begin || mid == task.end) {
      make_leaf();
      continue;
    }

    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    const auto right = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_[task.node].first = left;
    nodes_[task.node].count = 0;
    stack.push_back({right, mid, task.end});
    stack.push_back({left, task.begin, mid});
  }

  tris_.resize(prims.size());
  ids_.resize(prims.size());
  for (std::size_t i = 0; i < prims.size(); ++i) {
    const auto& t = triangles[prims[i].id];
    const Vec3& v0 = positions[t[0]];
    tris_[i] = {v0, positions[t[1]] - v0, positions[t[2]] - v0};
    ids_[i] = prims[i].id;
  }
}

template <bool AnyHit>
std::optional<TriangleHit> TriangleBvh::traverse(const Ray& ray) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv(1.0 / ray.direction.x(), 1.0 / ray.direction.y(), 1.0 / ray.direction.z());
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction;
  double t_best = ray.t_max;
  std::optional<TriangleHit> best;

  auto box_hit = [&](const Node& n) {
    double t0 = ray.t_min;
    double t1 = t_best;
    for (int a = 0; a < 3; ++a) {
      double tn = (n.lo[a] - o[a]) * inv[a];
      double tf = (n.hi[a] - o[a]) * inv[a];
      if (tn > tf) std::swap(tn, tf);
      // NaN (0 * inf) leaves the interval unchanged.
      t0 = tn > t0 ? tn : t0;
      t1 = tf < t1 ? tf : t1;
      if (t0 > t1) return false;
    }
    return true;
  };

  std::array<std::uint32_t, 128> stack;
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (!box_hit(node)) continue;
    if (node.count == 0) {
      stack[sp++] = node.first + 1;
      stack[sp++] = node.first;
      continue;
    }
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      const Tri& tri = tris_[i];
      const Vec3 pvec = d.cross(tri.e2);
      const double det = tri.e1.dot(pvec);
      if (det == 0.0) continue;
      const double inv_det = 1.0 / det;
      const Vec3 tvec = o - tri.v0;
      const double u = tvec.dot(pvec) * inv_det;
      if (u < -kBaryEpsilon || u > 1.0 + kBaryEpsilon) continue;
      const Vec3 qvec = tvec.cross(tri.e1);
      const double v = d.dot(qvec) * inv_det;
      if (v < -kBaryEpsilon || u + v > 1.0 + kBaryEpsilon) continue;
      const double t = tri.e2.dot(qvec) * inv_det;
      if (t <= ray.t_min || t >= t_best) continue;
      t_best = t;
      best = TriangleHit{t, ids_[i], u, v};
      if constexpr (AnyHit) return best;
    }
  }
  return best;
}

std::optional<TriangleHit> TriangleBvh::intersect(const Ray& ray) const {
  return traverse<false>(ray);
}

bool TriangleBvh::occluded(const Ray& ray) const { return traverse<true>(ray).has_value(); }

}  // namespace icy
