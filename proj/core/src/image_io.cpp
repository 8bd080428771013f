#include "icy/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace icy {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return f;
}

[[noreturn]] void png_error_handler(png_structp, png_const_charp message) {
  throw std::runtime_error(std::string("libpng: ") + message);
}

void png_warning_handler(png_structp, png_const_charp) {}

void write_png_rows(const std::filesystem::path& path, int width, int height, int bit_depth,
                    int color_type, const std::vector<png_bytep>& rows) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                            png_warning_handler);
  if (png == nullptr) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  try {
    if (info == nullptr) throw std::runtime_error("png_create_info_struct failed");
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> data;  // 16-bit samples in host order
};

DecodedPng decode_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw std::runtime_error(path.string() + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                           png_warning_handler);
  if (png == nullptr) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  DecodedPng out;
  try {
    if (info == nullptr) throw std::runtime_error("png_create_info_struct failed");
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int color_type = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_swap(png);
    png_read_update_info(png, info);
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    out.data.resize(rowbytes * static_cast<std::size_t>(out.height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = out.data.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

void write_png(const std::filesystem::path& path, const Image<Rgb8>& image) {
  static_assert(sizeof(Rgb8) == 3);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    rows[static_cast<std::size_t>(y)] =
        reinterpret_cast<png_bytep>(const_cast<Rgb8*>(image.row(y).data()));
  }
  write_png_rows(path, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, rows);
}

void write_png16(const std::filesystem::path& path, const Image<std::uint16_t>& image) {
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    rows[static_cast<std::size_t>(y)] =
        reinterpret_cast<png_bytep>(const_cast<std::uint16_t*>(image.row(y).data()));
  }
  write_png_rows(path, image.width(), image.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

Image<Rgb8> read_png_rgb(const std::filesystem::path& path) {
  const DecodedPng png = decode_png(path);
  if (png.bit_depth != 8) throw std::runtime_error(path.string() + ": expected an 8-bit PNG");
  Image<Rgb8> out(png.width, png.height);
  const std::size_t stride = static_cast<std::size_t>(png.width) * png.channels;
  for (int y = 0; y < png.height; ++y) {
    const std::uint8_t* row = png.data.data() + stride * y;
    for (int x = 0; x < png.width; ++x) {
      const std::uint8_t* px = row + static_cast<std::size_t>(x) * png.channels;
      out(x, y) = png.channels >= 3 ? Rgb8{px[0], px[1], px[2]} : Rgb8{px[0], px[0], px[0]};
    }
  }
  return out;
}

Image<std::uint16_t> read_png16(const std::filesystem::path& path) {
  const DecodedPng png = decode_png(path);
  if (png.channels != 1) throw std::runtime_error(path.string() + ": expected a grayscale PNG");
  Image<std::uint16_t> out(png.width, png.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (png.bit_depth == 16) {
      std::uint16_t v = 0;
      std::memcpy(&v, png.data.data() + 2 * i, 2);
      out[i] = v;
    } else {
      out[i] = png.data[i];
    }
  }
  return out;
}

void write_pfm(const std::filesystem::path& path, const Image<float>& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "Pf\n" << image.width() << ' ' << image.height() << "\n-1.0\n";
  static_assert(sizeof(float) == 4);
  for (int y = image.height() - 1; y >= 0; --y) {
    for (float v : image.row(y)) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, &v, 4);
      const char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                             static_cast<char>((bits >> 16) & 0xFF),
                             static_cast<char>((bits >> 24) & 0xFF)};
      out.write(bytes, 4);
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Image<float> read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  in.get();  // single whitespace before the raster
  if (!in || magic != "Pf" || width <= 0 || height <= 0 || scale == 0.0) {
    throw std::runtime_error(path.string() + ": not a single-channel PFM");
  }
  const bool little = scale < 0.0;
  Image<float> image(width, height);
  for (int y = height - 1; y >= 0; --y) {
    for (float& v : image.row(y)) {
      unsigned char b[4];
      if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error(path.string() + ": truncated PFM");
      const std::uint32_t bits =
          little ? (std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
                    std::uint32_t{b[3]} << 24)
                 : (std::uint32_t{b[3]} | std::uint32_t{b[2]} << 8 | std::uint32_t{b[1]} << 16 |
                    std::uint32_t{b[0]} << 24);
      std::memcpy(&v, &bits, 4);
    }
  }
  return image;
}

Image<std::uint16_t> depth_to_mm(const Image<float>& depth) {
  Image<std::uint16_t> out(depth.width(), depth.height(), 0);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double mm = std::round(static_cast<double>(depth[i]) * 1000.0);
    out[i] = static_cast<std::uint16_t>(std::isfinite(mm) ? std::clamp(mm, 0.0, 65535.0) : 0.0);
  }
  return out;
}

Image<std::uint16_t> to_u16_checked(const Image<std::uint32_t>& image) {
  Image<std::uint16_t> out(image.width(), image.height(), 0);
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i] > 65535u) throw std::runtime_error("value exceeds 16-bit range");
    out[i] = static_cast<std::uint16_t>(image[i]);
  }
  return out;
}

Image<std::uint16_t> to_u16(const Image<std::uint8_t>& image) {
  Image<std::uint16_t> out(image.width(), image.height(), 0);
  for (std::size_t i = 0; i < image.size(); ++i) out[i] = image[i];
  return out;
}

double srgb_to_linear(std::uint8_t v) {
  const double c = v / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

Image<Color> decode_srgb(const Image<Rgb8>& image) {
  Image<Color> out(image.width(), image.height(), Color::Zero());
  for (std::size_t i = 0; i < image.size(); ++i) {
    out[i] = Color(srgb_to_linear(image[i].r), srgb_to_linear(image[i].g), srgb_to_linear(image[i].b));
  }
  return out;
}

}  // namespace icy
