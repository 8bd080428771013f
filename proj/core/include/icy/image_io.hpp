#pragma once

#include <cstdint>
#include <filesystem>

#include "icy/image.hpp"
#include "icy/types.hpp"

namespace icy {

/// 8-bit RGB PNG.
void write_png(const std::filesystem::path& path, const Image<Rgb8>& image);
/// 16-bit grayscale PNG.
void write_png16(const std::filesystem::path& path, const Image<std::uint16_t>& image);

/// Reads 8-bit gray/RGB/RGBA (and palette) PNGs as RGB; alpha is dropped.
Image<Rgb8> read_png_rgb(const std::filesystem::path& path);
/// Reads a 16-bit grayscale PNG (8-bit gray is widened).
Image<std::uint16_t> read_png16(const std::filesystem::path& path);

/// Portable float map: "Pf" header, scale -1.0 (little-endian), rows stored
/// bottom-to-top as the format prescribes.
void write_pfm(const std::filesystem::path& path, const Image<float>& image);
Image<float> read_pfm(const std::filesystem::path& path);

/// Depth in millimetres, rounded and saturated to [0, 65535]; 0 stays 0.
Image<std::uint16_t> depth_to_mm(const Image<float>& depth);

/// Narrowing with an error if any value exceeds 65535.
Image<std::uint16_t> to_u16_checked(const Image<std::uint32_t>& image);
Image<std::uint16_t> to_u16(const Image<std::uint8_t>& image);

/// sRGB-encoded byte to linear [0, 1].
double srgb_to_linear(std::uint8_t v);
Image<Color> decode_srgb(const Image<Rgb8>& image);

}  // namespace icy
