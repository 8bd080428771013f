#include "icy/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "icy/rng.hpp"

namespace icy {
namespace {

struct Samples {
  std::vector<double> pred;
  std::vector<double> gt;
};

Samples gather(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask) {
  if (!pred.same_size(gt) || !pred.same_size(mask)) {
    throw std::invalid_argument("metrics: image dimensions differ");
  }
  Samples s;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask[i]) continue;
    s.pred.push_back(pred[i]);
    s.gt.push_back(gt[i]);
  }
  return s;
}

Samples gather_nonempty(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask,
                        const char* what) {
  Samples s = gather(pred, gt, mask);
  if (s.pred.empty()) throw std::invalid_argument(std::string(what) + ": no valid pixels");
  return s;
}

}  // namespace

DepthImage to_depth_image(const Image<float>& depth) {
  DepthImage out(depth.width(), depth.height(), 0.0);
  for (std::size_t i = 0; i < depth.size(); ++i) out[i] = depth[i];
  return out;
}

ValidityMask valid_mask(const DepthImage& pred, const DepthImage& gt) {
  if (!pred.same_size(gt)) throw std::invalid_argument("valid_mask: image dimensions differ");
  ValidityMask mask(pred.width(), pred.height(), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mask[i] = std::isfinite(pred[i]) && std::isfinite(gt[i]) && pred[i] > 0.0 && gt[i] > 0.0;
  }
  return mask;
}

double l1_error(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask) {
  const Samples s = gather_nonempty(pred, gt, mask, "l1_error");
  double sum = 0.0;
  for (std::size_t i = 0; i < s.pred.size(); ++i) sum += std::abs(s.pred[i] - s.gt[i]);
  return sum / static_cast<double>(s.pred.size());
}

double l1_rate(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask,
               double threshold) {
  const Samples s = gather_nonempty(pred, gt, mask, "l1_rate");
  std::size_t over = 0;
  for (std::size_t i = 0; i < s.pred.size(); ++i) {
    if (std::abs(s.pred[i] - s.gt[i]) > threshold) ++over;
  }
  return 100.0 * static_cast<double>(over) / static_cast<double>(s.pred.size());
}

double si_rmse(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask) {
  const Samples s = gather_nonempty(pred, gt, mask, "si_rmse");
  std::vector<double> d(s.pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(s.pred[i] > 0.0) || !(s.gt[i] > 0.0)) {
      throw std::invalid_argument("si_rmse: masked depth must be > 0");
    }
    d[i] = std::log(s.pred[i]) - std::log(s.gt[i]);
    sum += d[i];
  }
  // mean(d^2) - mean(d)^2, evaluated as mean((d - mean)^2) to avoid cancellation.
  const auto n = static_cast<double>(d.size());
  const double mean = sum / n;
  double var = 0.0;
  double drift = 0.0;
  for (double v : d) {
    var += (v - mean) * (v - mean);
    drift += v - mean;
  }
  return std::max(0.0, var / n - (drift / n) * (drift / n));
}

int depth_order(double a, double b, double tau) {
  const double ratio = a / b;
  if (ratio > 1.0 + tau) return 1;
  if (ratio < 1.0 - tau) return -1;
  return 0;
}

double dod(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask, double tau,
           std::optional<std::size_t> n_pairs, std::uint64_t seed) {
  const Samples s = gather(pred, gt, mask);
  const std::size_t n = s.pred.size();
  if (n < 2) throw std::invalid_argument("dod: need at least 2 valid pixels");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.pred[i] > 0.0) || !(s.gt[i] > 0.0)) throw std::invalid_argument("dod: masked depth must be > 0");
  }
  auto disagree = [&](std::size_t i, std::size_t j) {
    return depth_order(s.pred[i], s.pred[j], tau) != depth_order(s.gt[i], s.gt[j], tau);
  };
  std::size_t count = 0;
  std::size_t total = 0;
  if (!n_pairs) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) count += disagree(i, j);
    }
    total = n * (n - 1) / 2;
  } else {
    if (*n_pairs == 0) throw std::invalid_argument("dod: n_pairs must be > 0");
    CounterRng rng(seed, /*stream=*/0x646F64ULL);
    for (std::size_t k = 0; k < *n_pairs; ++k) {
      const std::size_t i = rng.below(n);
      std::size_t j = rng.below(n - 1);
      if (j >= i) ++j;
      count += disagree(i, j);
    }
    total = *n_pairs;
  }
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

MetricsReport evaluate(const DepthImage& pred, const DepthImage& gt, const MetricsOptions& options) {
  if (!pred.same_size(gt)) throw std::invalid_argument("evaluate: image dimensions differ");
  const ValidityMask mask = valid_mask(pred, gt);
  MetricsReport report;
  for (std::uint8_t m : mask.pixels()) report.n_pixels += m;
  report.valid_fraction =
      pred.empty() ? 0.0 : 100.0 * static_cast<double>(report.n_pixels) / static_cast<double>(pred.size());
  if (report.n_pixels == 0) throw std::invalid_argument("evaluate: no pixel is valid in both maps");
  report.l1 = l1_error(pred, gt, mask);
  report.l1_rate_10 = l1_rate(pred, gt, mask, options.l1_threshold);
  report.si_rmse = si_rmse(pred, gt, mask);
  report.si_rmse_sqrt = std::sqrt(report.si_rmse);
  if (report.n_pixels >= 2) {
    report.dod = dod(pred, gt, mask, options.tau, options.dod_pairs, options.dod_seed);
    report.n_pairs = options.dod_pairs ? *options.dod_pairs
                                       : report.n_pixels * (report.n_pixels - 1) / 2;
  }
  return report;
}

}  // namespace icy
