#pragma once

#include <cstdint>
#include <optional>

#include "icy/image.hpp"

namespace icy {

/// Metrics run in double precision; float maps are widened with to_depth_image.
using DepthImage = Image<double>;
using ValidityMask = Image<std::uint8_t>;

struct MetricsOptions {
  double l1_threshold = 0.10;  // meters
  double tau = 0.01;           // ordinal ratio tolerance
  /// Number of uniformly sampled pixel pairs for DOD; nullopt = all pairs.
  std::optional<std::size_t> dod_pairs = 100000;
  std::uint64_t dod_seed = 0;
};

struct MetricsReport {
  double l1 = 0.0;              // meters
  double l1_rate_10 = 0.0;      // percent
  double si_rmse = 0.0;         // D, the log-error variance
  double si_rmse_sqrt = 0.0;    // sqrt(D), auxiliary
  double dod = 0.0;             // percent
  double valid_fraction = 0.0;  // percent of pixels valid in both maps
  std::size_t n_pixels = 0;
  std::size_t n_pairs = 0;
};

DepthImage to_depth_image(const Image<float>& depth);

/// 1 where both depths are finite and > 0.
ValidityMask valid_mask(const DepthImage& pred, const DepthImage& gt);

/// Mean |pred - gt| over masked pixels.
double l1_error(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask);

/// Percentage of masked pixels with |pred - gt| > threshold (strict).
double l1_rate(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask,
               double threshold = 0.10);

/// (1/N) sum d_i^2 - (1/N^2) (sum d_i)^2 with d_i = log pred_i - log gt_i.
/// Clamped at 0 against rounding.
double si_rmse(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask);

/// +1 if a/b > 1 + tau, -1 if a/b < 1 - tau, else 0.
int depth_order(double a, double b, double tau);

/// Percentage of pixel pairs whose ordinal relation differs between pred and
/// gt, normalized by the number of pairs evaluated. n_pairs = nullopt uses
/// all unordered pairs; otherwise pairs (i != j) are drawn uniformly with the
/// given seed.
double dod(const DepthImage& pred, const DepthImage& gt, const ValidityMask& mask,
           double tau = 0.01, std::optional<std::size_t> n_pairs = std::nullopt,
           std::uint64_t seed = 0);

/// All metrics over the intersection of valid pred and gt pixels.
MetricsReport evaluate(const DepthImage& pred, const DepthImage& gt,
                       const MetricsOptions& options = {});

}  // namespace icy
