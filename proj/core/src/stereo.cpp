#include "icy/stereo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "icy/parallel.hpp"

namespace icy {
namespace {

using Fixed = Image<std::int32_t>;

constexpr std::int64_t kNoCost = std::numeric_limits<std::int64_t>::max();
constexpr int kRefineRadius = 2;

Fixed quantize(const GrayImage& image) {
  Fixed out(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = std::clamp(static_cast<double>(image[i]) * kCostScale, -1e9, 1e9);
    out[i] = static_cast<std::int32_t>(std::lround(v));
  }
  return out;
}

// Per-pixel search centre (disparity index relative to min_disparity), or -1
// for a full-range search.
using Hint = Image<std::int32_t>;

void match_band(const Fixed& L, const Fixed& R, const BlockMatchParams& p, const Hint* hint,
                int y_begin, int y_end, DisparityMap& out) {
  const int W = L.width();
  const int D = p.num_disparities;
  const int dmin = p.min_disparity;
  const int r = p.window / 2;
  const std::size_t stride = static_cast<std::size_t>(D);

  std::vector<std::int64_t> colsum(static_cast<std::size_t>(W) * stride, 0);
  std::vector<std::int64_t> cost(static_cast<std::size_t>(W) * stride, 0);
  std::vector<int> right_best(static_cast<std::size_t>(W), -1);

  // Highest disparity index whose right window fits for left column x.
  auto dmax_at = [&](int x) { return std::min(D - 1, x - r - dmin); };

  auto accumulate_row = [&](int yy, int sign) {
    const auto lrow = L.row(yy);
    const auto rrow = R.row(yy);
    for (int x = dmin; x < W; ++x) {
      const int dlim = std::min(D - 1, x - dmin);
      std::int64_t* cs = colsum.data() + static_cast<std::size_t>(x) * stride;
      const std::int32_t lv = lrow[x];
      const std::int32_t* rp = rrow.data() + (x - dmin);
      for (int d = 0; d <= dlim; ++d) {
        const std::int32_t diff = lv - rp[-d];
        cs[d] += sign * static_cast<std::int64_t>(diff < 0 ? -diff : diff);
      }
    }
  };

  for (int y = y_begin; y < y_end; ++y) {
    if (y == y_begin) {
      std::fill(colsum.begin(), colsum.end(), 0);
      for (int yy = y - r; yy <= y + r; ++yy) accumulate_row(yy, +1);
    } else {
      accumulate_row(y + r, +1);
      accumulate_row(y - r - 1, -1);
    }

    // Horizontal window sums.
    for (int x = r; x < W - r; ++x) {
      const int dlim = dmax_at(x);
      const int dprev = x > r ? dmax_at(x - 1) : -1;
      std::int64_t* c = cost.data() + static_cast<std::size_t>(x) * stride;
      const std::int64_t* add = colsum.data() + static_cast<std::size_t>(x + r) * stride;
      for (int d = 0; d <= dlim; ++d) {
        if (d <= dprev) {
          const std::int64_t* prev = c - stride;
          const std::int64_t* sub = colsum.data() + static_cast<std::size_t>(x - r - 1) * stride;
          c[d] = prev[d] + add[d] - sub[d];
        } else {
          std::int64_t s = 0;
          for (int xx = x - r; xx <= x + r; ++xx) s += colsum[static_cast<std::size_t>(xx) * stride + d];
          c[d] = s;
        }
      }
    }

    // Right-to-left winners: right column xr pairs with left column xr + dmin + d.
    for (int xr = 0; xr < W; ++xr) {
      int best = -1;
      std::int64_t best_cost = kNoCost;
      if (xr >= r) {
        for (int d = 0; d < D; ++d) {
          const int xl = xr + dmin + d;
          if (xl >= W - r) break;
          const std::int64_t c = cost[static_cast<std::size_t>(xl) * stride + d];
          if (c < best_cost) {
            best_cost = c;
            best = d;
          }
        }
      }
      right_best[static_cast<std::size_t>(xr)] = best;
    }

    for (int x = r; x < W - r; ++x) {
      int lo = 0;
      int hi = dmax_at(x);
      // Near the left border the range is cut short; a winner on the cut edge
      // may be a truncated slope rather than a minimum.
      const int cut_edge = hi < D - 1 ? hi : -1;
      if (hint != nullptr) {
        const std::int32_t centre = (*hint)(x, y);
        if (centre >= 0) {
          lo = std::max(lo, centre - kRefineRadius);
          hi = std::min(hi, centre + kRefineRadius);
        }
      }
      if (hi < lo) continue;
      const std::int64_t* c = cost.data() + static_cast<std::size_t>(x) * stride;
      int best = lo;
      for (int d = lo + 1; d <= hi; ++d) {
        if (c[d] < c[best]) best = d;
      }
      std::int64_t second = kNoCost;
      for (int d = lo; d <= hi; ++d) {
        if (std::abs(d - best) > 1) second = std::min(second, c[d]);
      }
      if (best == cut_edge) continue;
      // Without a competitor beyond +-1 the match cannot be confirmed.
      if (second == kNoCost ||
          !(static_cast<double>(second) > static_cast<double>(c[best]) * (1.0 + p.uniqueness_ratio))) {
        continue;
      }
      const int xr = x - dmin - best;
      const int rb = right_best[static_cast<std::size_t>(xr)];
      if (rb < 0 || std::abs(rb - best) > p.lr_consistency_px) continue;

      double value = dmin + best;
      if (p.subpixel && best - 1 >= lo && best + 1 <= hi) {
        const double cm = static_cast<double>(c[best - 1]);
        const double c0 = static_cast<double>(c[best]);
        const double cp = static_cast<double>(c[best + 1]);
        const double denom = cm - 2.0 * c0 + cp;
        if (denom > 0.0) value += (cm - cp) / (2.0 * denom);
      }
      out.values(x, y) = static_cast<float>(value);
      out.valid(x, y) = 1;
    }
  }
}

DisparityMap match_fixed(const Fixed& L, const Fixed& R, const BlockMatchParams& p,
                         const Hint* hint) {
  const int W = L.width();
  const int H = L.height();
  DisparityMap out{Image<float>(W, H, 0.0f), Image<std::uint8_t>(W, H, 0)};
  const int r = p.window / 2;
  const int y_first = r;
  const int y_last = H - r;  // exclusive
  if (y_last <= y_first || W - r <= r) return out;

  const int rows = y_last - y_first;
  const int workers = resolve_thread_count(p.threads);
  // Each band re-initialises its column sums, so keep bands tall.
  const int min_band = std::max(p.window * 2, 32);
  const int bands = workers == 1 ? 1 : std::clamp(std::min(workers * 2, rows / min_band), 1, rows);
  parallel_for(static_cast<std::size_t>(bands), p.threads, [&](std::size_t b) {
    const int y0 = y_first + static_cast<int>(static_cast<long long>(rows) * b / bands);
    const int y1 = y_first + static_cast<int>(static_cast<long long>(rows) * (b + 1) / bands);
    match_band(L, R, p, hint, y0, y1, out);
  });
  return out;
}

void check_pair(const GrayImage& left, const GrayImage& right) {
  if (!left.same_size(right)) throw std::invalid_argument("stereo: left and right sizes differ");
}

int odd_at_least(int v, int lo) {
  v = std::max(v, lo);
  return v % 2 == 0 ? v + 1 : v;
}

std::vector<float> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * i * i / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  std::vector<float> out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = static_cast<float>(k[i] / sum);
  return out;
}

}  // namespace

void BlockMatchParams::validate() const {
  if (num_disparities <= 0) throw std::invalid_argument("BlockMatchParams: num_disparities must be > 0");
  if (window < 5 || window % 2 == 0) {
    throw std::invalid_argument("BlockMatchParams: window must be odd and >= 5");
  }
  if (min_disparity < 0) throw std::invalid_argument("BlockMatchParams: min_disparity must be >= 0");
  if (!(uniqueness_ratio >= 0.0)) {
    throw std::invalid_argument("BlockMatchParams: uniqueness_ratio must be >= 0");
  }
  if (lr_consistency_px < 0) {
    throw std::invalid_argument("BlockMatchParams: lr_consistency_px must be >= 0");
  }
}

void PyramidParams::validate() const {
  if (levels < 1) throw std::invalid_argument("PyramidParams: levels must be >= 1");
  if (!(log_kernel_sigma > 0.0)) throw std::invalid_argument("PyramidParams: log_kernel_sigma must be > 0");
  base.validate();
}

std::size_t DisparityMap::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.pixels().begin(), valid.pixels().end(), 1));
}

GrayImage to_grayscale(const Image<Color>& rgb) {
  GrayImage out(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const Color& c = rgb[i];
    out[i] = static_cast<float>(0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2]);
  }
  return out;
}

GrayImage to_grayscale(const Image<Rgb8>& rgb) {
  GrayImage out(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const Rgb8& c = rgb[i];
    out[i] = static_cast<float>((0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b) / 255.0);
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& image, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be > 0");
  const std::vector<float> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int W = image.width();
  const int H = image.height();
  GrayImage tmp(W, H);
  GrayImage out(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      float s = 0.0f;
      for (int i = -radius; i <= radius; ++i) {
        s += k[static_cast<std::size_t>(i + radius)] * image(std::clamp(x + i, 0, W - 1), y);
      }
      tmp(x, y) = s;
    }
  }
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      float s = 0.0f;
      for (int i = -radius; i <= radius; ++i) {
        s += k[static_cast<std::size_t>(i + radius)] * tmp(x, std::clamp(y + i, 0, H - 1));
      }
      out(x, y) = s;
    }
  }
  return out;
}

GrayImage laplacian_of_gaussian(const GrayImage& image, double sigma) {
  const GrayImage g = gaussian_blur(image, sigma);
  const int W = g.width();
  const int H = g.height();
  GrayImage out(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const float c = g(x, y);
      out(x, y) = g(std::max(x - 1, 0), y) + g(std::min(x + 1, W - 1), y) +
                  g(x, std::max(y - 1, 0)) + g(x, std::min(y + 1, H - 1)) - 4.0f * c;
    }
  }
  return out;
}

GrayImage pyramid_down(const GrayImage& image) {
  const GrayImage g = gaussian_blur(image, 1.0);
  GrayImage out(image.width() / 2, image.height() / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = g(2 * x, 2 * y);
  }
  return out;
}

DisparityMap block_match(const GrayImage& left, const GrayImage& right,
                         const BlockMatchParams& params) {
  params.validate();
  check_pair(left, right);
  return match_fixed(quantize(left), quantize(right), params, nullptr);
}

DisparityMap pyramid_match(const GrayImage& left, const GrayImage& right,
                           const PyramidParams& params) {
  params.validate();
  check_pair(left, right);
  if (params.levels == 1) {
    return block_match(laplacian_of_gaussian(left, params.log_kernel_sigma),
                       laplacian_of_gaussian(right, params.log_kernel_sigma), params.base);
  }

  std::vector<GrayImage> lp{left};
  std::vector<GrayImage> rp{right};
  for (int k = 1; k < params.levels; ++k) {
    lp.push_back(pyramid_down(lp.back()));
    rp.push_back(pyramid_down(rp.back()));
  }

  auto level_params = [&](int k) {
    BlockMatchParams p = params.base;
    if (k == 0) return p;
    const int factor = 1 << k;
    p.window = odd_at_least(params.base.window / factor, 5);
    p.num_disparities = std::max(1, (params.base.num_disparities + factor - 1) / factor);
    p.min_disparity = params.base.min_disparity / factor;
    p.subpixel = false;
    return p;
  };

  DisparityMap coarse;
  for (int k = params.levels - 1; k >= 0; --k) {
    const BlockMatchParams p = level_params(k);
    const Fixed L = quantize(laplacian_of_gaussian(lp[static_cast<std::size_t>(k)], params.log_kernel_sigma));
    const Fixed R = quantize(laplacian_of_gaussian(rp[static_cast<std::size_t>(k)], params.log_kernel_sigma));
    if (k == params.levels - 1) {
      coarse = match_fixed(L, R, p, nullptr);
      continue;
    }
    Hint hint(L.width(), L.height(), -1);
    const int cw = coarse.values.width();
    const int ch = coarse.values.height();
    if (cw > 0 && ch > 0) {
      for (int y = 0; y < L.height(); ++y) {
        for (int x = 0; x < L.width(); ++x) {
          const int cx = std::min(x / 2, cw - 1);
          const int cy = std::min(y / 2, ch - 1);
          if (!coarse.valid(cx, cy)) continue;
          const long centre = std::lround(2.0 * coarse.values(cx, cy)) - p.min_disparity;
          hint(x, y) = static_cast<std::int32_t>(std::clamp<long>(centre, 0, p.num_disparities - 1));
        }
      }
    }
    coarse = match_fixed(L, R, p, &hint);
  }
  return coarse;
}

Image<float> disparity_to_depth(const DisparityMap& disparity, double focal_px, double baseline) {
  if (!(focal_px > 0.0) || !(baseline > 0.0)) {
    throw std::invalid_argument("disparity_to_depth: focal_px and baseline must be > 0");
  }
  Image<float> depth(disparity.values.width(), disparity.values.height(), 0.0f);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const float d = disparity.values[i];
    if (disparity.valid[i] && d > 0.0f) depth[i] = static_cast<float>(focal_px * baseline / d);
  }
  return depth;
}

}  // namespace icy
