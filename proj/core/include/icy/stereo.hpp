#pragma once

#include <cstdint>

#include "icy/image.hpp"
#include "icy/types.hpp"

namespace icy {

using GrayImage = Image<float>;

/// SAD block matching parameters. `window` is the full side of the square
/// window, so the default 49 means a 49 x 49 block.
struct BlockMatchParams {
  int num_disparities = 96;
  int window = 49;
  int min_disparity = 0;
  double uniqueness_ratio = 0.15;
  int lr_consistency_px = 1;
  bool subpixel = false;
  int threads = 0;  // row bands; does not affect output

  void validate() const;
};

struct PyramidParams {
  int levels = 3;
  double log_kernel_sigma = 1.0;
  BlockMatchParams base;

  void validate() const;
};

struct DisparityMap {
  Image<float> values;        // pixels; 0 where invalid
  Image<std::uint8_t> valid;  // 1 = valid

  std::size_t valid_count() const;
};

/// Intensities are quantized to 1/kCostScale before matching so window sums
/// are exact integers.
inline constexpr double kCostScale = 4096.0;

/// Rec. 709 luma, 0.2126 R + 0.7152 G + 0.0722 B.
GrayImage to_grayscale(const Image<Color>& rgb);
/// Same weights applied to 8-bit values scaled to [0, 1].
GrayImage to_grayscale(const Image<Rgb8>& rgb);

/// Separable Gaussian, radius ceil(3 sigma), replicated borders.
GrayImage gaussian_blur(const GrayImage& image, double sigma);
/// Gaussian blur followed by the 5-point Laplacian.
GrayImage laplacian_of_gaussian(const GrayImage& image, double sigma);
/// Gaussian blur (sigma 1) and 2x decimation; output is floor(w/2) x floor(h/2).
GrayImage pyramid_down(const GrayImage& image);

/// Winner-take-all SAD matching of left against right along rows.
///
/// For left pixel x the candidates are d in [min_disparity,
/// min_disparity + num_disparities) whose right window lies inside the
/// image, so pixels near the left border search a shortened range. A pixel
/// is invalid when its window leaves the image, when the winner sits on the
/// border-shortened end of its range, when no candidate lies more than one
/// step from the winner or the best such cost is not above
/// best * (1 + uniqueness_ratio), or when the right-to-left winner differs by
/// more than lr_consistency_px. Ties go to the smaller disparity.
/// Cost is O(W * H * num_disparities), independent of the window size.
DisparityMap block_match(const GrayImage& left, const GrayImage& right,
                         const BlockMatchParams& params);

/// Coarse-to-fine matching on Laplacian-of-Gaussian pyramids. The coarsest
/// level searches the full (scaled) range; each finer level searches +-2 px
/// around the doubled coarse disparity, falling back to the full range where
/// the coarse level had no valid match. With levels == 1 this is exactly
/// block_match on the LoG-filtered pair.
DisparityMap pyramid_match(const GrayImage& left, const GrayImage& right,
                           const PyramidParams& params);

/// Z = focal_px * baseline / d for valid d > 0, otherwise 0.
Image<float> disparity_to_depth(const DisparityMap& disparity, double focal_px, double baseline);

}  // namespace icy
