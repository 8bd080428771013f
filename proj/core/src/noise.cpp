#include "icy/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "icy/rng.hpp"

namespace icy {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Eight unit gradients at 45 degree spacing.
constexpr std::array<std::array<double, 2>, 8> kGradients{{
    {1.0, 0.0},
    {kInvSqrt2, kInvSqrt2},
    {0.0, 1.0},
    {-kInvSqrt2, kInvSqrt2},
    {-1.0, 0.0},
    {-kInvSqrt2, -kInvSqrt2},
    {0.0, -1.0},
    {kInvSqrt2, -kInvSqrt2},
}};

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double lerp(double a, double b, double t) { return a + t * (b - a); }

double offset_for(std::uint64_t seed, std::uint64_t salt, int i, int j, double a) {
  const std::uint64_t h = hash_words({seed, salt, static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(j)});
  return a * (2.0 * hash_to_unit(h) - 1.0);
}

// Diamond-square over an n x n grid. With wrap=true the grid is a torus of
// period n - 1 (the last row/column mirror the first).
std::vector<double> diamond_square(std::uint64_t seed, std::uint64_t salt, int n,
                                   double roughness, double amplitude, bool wrap) {
  std::vector<double> z(static_cast<std::size_t>(n) * n, 0.0);
  const int last = n - 1;
  auto at = [&](int i, int j) -> double& { return z[static_cast<std::size_t>(j) * n + i]; };
  auto fetch = [&](int i, int j, double& sum, int& count) {
    if (wrap) {
      i = ((i % last) + last) % last;
      j = ((j % last) + last) % last;
    } else if (i < 0 || j < 0 || i > last || j > last) {
      return;
    }
    sum += at(i, j);
    ++count;
  };

  double a = amplitude;
  for (int step = last; step > 1; step /= 2) {
    const int half = step / 2;
    // Diamond step: square centres.
    for (int j = half; j < last; j += step) {
      for (int i = half; i < last; i += step) {
        double sum = 0.0;
        int count = 0;
        fetch(i - half, j - half, sum, count);
        fetch(i + half, j - half, sum, count);
        fetch(i - half, j + half, sum, count);
        fetch(i + half, j + half, sum, count);
        at(i, j) = sum / count + offset_for(seed, salt, i, j, a);
      }
    }
    // Square step: edge midpoints.
    for (int j = 0; j <= last; j += half) {
      for (int i = ((j / half) % 2 == 0) ? half : 0; i <= last; i += step) {
        if (wrap && (i == last || j == last)) continue;
        double sum = 0.0;
        int count = 0;
        fetch(i - half, j, sum, count);
        fetch(i + half, j, sum, count);
        fetch(i, j - half, sum, count);
        fetch(i, j + half, sum, count);
        at(i, j) = sum / count + offset_for(seed, salt, i, j, a);
      }
    }
    a *= roughness;
  }
  if (wrap) {
    for (int k = 0; k <= last; ++k) {
      at(last, k) = at(0, k % last);
      at(k, last) = at(k % last, 0);
    }
  }
  return z;
}

}  // namespace

NoiseBasis parse_noise_basis(std::string_view name) {
  if (name == "perlin") return NoiseBasis::perlin;
  if (name == "worley_f1" || name == "worley" || name == "voronoi") return NoiseBasis::worley_f1;
  if (name == "midpoint_displacement") return NoiseBasis::midpoint_displacement;
  if (name == "turbulence") return NoiseBasis::turbulence;
  throw std::invalid_argument("unknown noise basis '" + std::string(name) + "'");
}

std::string_view to_string(NoiseBasis basis) {
  switch (basis) {
    case NoiseBasis::perlin: return "perlin";
    case NoiseBasis::worley_f1: return "worley_f1";
    case NoiseBasis::midpoint_displacement: return "midpoint_displacement";
    case NoiseBasis::turbulence: return "turbulence";
  }
  return "perlin";
}

void NoiseSpec::validate() const {
  if (octaves < 1) throw std::invalid_argument("NoiseSpec: octaves must be >= 1");
  if (!(lacunarity > 1.0)) throw std::invalid_argument("NoiseSpec: lacunarity must be > 1");
  if (!(gain > 0.0 && gain <= 1.0)) throw std::invalid_argument("NoiseSpec: gain must be in (0, 1]");
  if (!(base_frequency > 0.0)) throw std::invalid_argument("NoiseSpec: base_frequency must be > 0");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("NoiseSpec: amplitude must be >= 0");
}

double NoiseSpec::octave_weight_sum() const {
  double sum = 0.0;
  double w = 1.0;
  for (int o = 0; o < octaves; ++o) {
    sum += w;
    w *= gain;
  }
  return sum;
}

NoiseField::NoiseField(const NoiseSpec& spec) : spec_(spec) {
  spec_.validate();
  std::array<std::uint8_t, 256> p{};
  for (int i = 0; i < 256; ++i) p[i] = static_cast<std::uint8_t>(i);
  CounterRng rng(spec_.seed, /*stream=*/0x7065726DULL);
  for (int i = 255; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  for (int i = 0; i < 512; ++i) perm_[i] = p[i & 255];

  if (spec_.basis == NoiseBasis::midpoint_displacement) {
    midpoint_tile_ = diamond_square(spec_.seed, 0x6D7064ULL, kMidpointTileSize + 1, 0.5, 1.0,
                                    /*wrap=*/true);
    // Offsets sum to at most 1 + 1/2 + 1/4 + ... < 2.
    for (double& v : midpoint_tile_) v *= 0.5;
  }
}

double NoiseField::perlin(const Vec2& p) const {
  const double fx = std::floor(p.x());
  const double fy = std::floor(p.y());
  const double x = p.x() - fx;
  const double y = p.y() - fy;
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const int xi = static_cast<int>(ix & 255);
  const int yi = static_cast<int>(iy & 255);
  const int xi1 = (xi + 1) & 255;
  const int yi1 = (yi + 1) & 255;

  auto grad = [&](int hx, int hy, double dx, double dy) {
    const auto& g = kGradients[perm_[perm_[hx] + hy] & 7];
    return g[0] * dx + g[1] * dy;
  };
  const double n00 = grad(xi, yi, x, y);
  const double n10 = grad(xi1, yi, x - 1.0, y);
  const double n01 = grad(xi, yi1, x, y - 1.0);
  const double n11 = grad(xi1, yi1, x - 1.0, y - 1.0);
  const double u = fade(x);
  const double v = fade(y);
  // Unit gradients bound 2D gradient noise by sqrt(2)/2.
  const double value = std::sqrt(2.0) * lerp(lerp(n00, n10, u), lerp(n01, n11, u), v);
  return std::clamp(value, -1.0, 1.0);
}

Vec2 NoiseField::feature_point(std::int64_t cx, std::int64_t cy) const {
  const std::uint64_t h = hash_words({spec_.seed, 0x776F726CULL, static_cast<std::uint64_t>(cx),
                                      static_cast<std::uint64_t>(cy)});
  const double u = hash_to_unit(h);
  const double v = hash_to_unit(mix64(h));
  return {static_cast<double>(cx) + u, static_cast<double>(cy) + v};
}

double NoiseField::worley_f1(const Vec2& p) const {
  const auto cx = static_cast<std::int64_t>(std::floor(p.x()));
  const auto cy = static_cast<std::int64_t>(std::floor(p.y()));
  // The own-cell feature is within sqrt(2); cells three away are at least 2
  // away, so a 5x5 neighbourhood is exact.
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t dy = -2; dy <= 2; ++dy) {
    for (std::int64_t dx = -2; dx <= 2; ++dx) {
      const Vec2 f = feature_point(cx + dx, cy + dy);
      best = std::min(best, (f - p).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double NoiseField::midpoint(const Vec2& p) const {
  constexpr int n = kMidpointTileSize;
  const double scale = n / kMidpointTilePeriod;
  const double gx = p.x() * scale;
  const double gy = p.y() * scale;
  const double fx = std::floor(gx);
  const double fy = std::floor(gy);
  const double tx = gx - fx;
  const double ty = gy - fy;
  auto wrap = [](double f) {
    const auto i = static_cast<std::int64_t>(f) % n;
    return static_cast<int>(i < 0 ? i + n : i);
  };
  const int i0 = wrap(fx);
  const int j0 = wrap(fy);
  const int i1 = (i0 + 1) % n;
  const int j1 = (j0 + 1) % n;
  auto at = [&](int i, int j) { return midpoint_tile_[static_cast<std::size_t>(j) * (n + 1) + i]; };
  return lerp(lerp(at(i0, j0), at(i1, j0), tx), lerp(at(i0, j1), at(i1, j1), tx), ty);
}

double NoiseField::basis(const Vec2& p) const {
  switch (spec_.basis) {
    case NoiseBasis::perlin: return perlin(p);
    case NoiseBasis::worley_f1: return worley_f1(p);
    case NoiseBasis::midpoint_displacement: return midpoint(p);
    case NoiseBasis::turbulence: return std::abs(perlin(p));
  }
  return 0.0;
}

double NoiseField::fbm(const Vec2& p) const {
  double sum = 0.0;
  double amp = spec_.amplitude;
  double freq = spec_.base_frequency;
  for (int o = 0; o < spec_.octaves; ++o) {
    sum += amp * basis(p * freq);
    amp *= spec_.gain;
    freq *= spec_.lacunarity;
  }
  return sum;
}

double eval_basis(const NoiseSpec& spec, const Vec2& p) { return NoiseField(spec).basis(p); }

double eval_fbm(const NoiseSpec& spec, const Vec2& p) { return NoiseField(spec).fbm(p); }

HeightField midpoint_displace(std::uint64_t seed, int size, double roughness,
                              double initial_amplitude) {
  if (size < 3 || ((size - 1) & (size - 2)) != 0) {
    throw std::invalid_argument("midpoint_displace: size must be 2^k + 1 with k >= 1");
  }
  if (!(roughness > 0.0 && roughness < 1.0)) {
    throw std::invalid_argument("midpoint_displace: roughness must be in (0, 1)");
  }
  if (!(initial_amplitude >= 0.0)) {
    throw std::invalid_argument("midpoint_displace: initial_amplitude must be >= 0");
  }
  HeightField hf(size, size, 1.0);
  hf.elevations = diamond_square(seed, 0x64736471ULL, size, roughness, initial_amplitude,
                                 /*wrap=*/false);
  return hf;
}

}  // namespace icy
