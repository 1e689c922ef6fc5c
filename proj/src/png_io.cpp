// SPDX-License-Identifier: Apache-2.0

#include "rfaug/png_io.hpp"

#include <png.h>

#include <cstring>
#include <system_error>

namespace rfaug::png {
namespace {

namespace fs = std::filesystem;

struct ImageHandle {
  png_image image;
  ImageHandle() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~ImageHandle() { png_image_free(&image); }
};

void open_for_read(ImageHandle& h, const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, path.string());
  }
  if (!png_image_begin_read_from_file(&h.image, path.c_str())) {
    throw Error(ErrorCode::IoFailure,
                path.string() + ": " + h.image.message);
  }
  if (h.image.width < 1 || h.image.height < 1) {
    throw Error(ErrorCode::IoFailure, path.string() + ": empty image");
  }
}

template <typename T>
std::vector<T> finish_read(ImageHandle& h, const fs::path& path, png_uint_32 format,
                           std::size_t channels) {
  h.image.format = format;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(h.image));
  if (!png_image_finish_read(&h.image, nullptr, buf.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + h.image.message);
  }
  std::vector<T> out(static_cast<std::size_t>(h.image.width) * h.image.height);
  static_assert(sizeof(T) == 1 || sizeof(T) == 3);
  if (buf.size() != out.size() * channels) {
    throw Error(ErrorCode::IoFailure, path.string() + ": unexpected buffer size");
  }
  std::memcpy(out.data(), buf.data(), buf.size());
  return out;
}

void write(const fs::path& path, const void* data, int width, int height,
           png_uint_32 format) {
  ImageHandle h;
  h.image.width = static_cast<png_uint_32>(width);
  h.image.height = static_cast<png_uint_32>(height);
  h.image.format = format;
  if (!png_image_write_to_file(&h.image, path.c_str(), 0, data, 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + h.image.message);
  }
}

}  // namespace

Size read_size(const fs::path& path) {
  ImageHandle h;
  open_for_read(h, path);
  return {static_cast<int>(h.image.width), static_cast<int>(h.image.height)};
}

RasterImage read_rgb(const fs::path& path) {
  static_assert(sizeof(Rgb) == 3);
  ImageHandle h;
  open_for_read(h, path);
  const int w = static_cast<int>(h.image.width);
  const int hgt = static_cast<int>(h.image.height);
  return RasterImage(w, hgt, finish_read<Rgb>(h, path, PNG_FORMAT_RGB, 3));
}

GrayImage read_gray(const fs::path& path) {
  ImageHandle h;
  open_for_read(h, path);
  const int w = static_cast<int>(h.image.width);
  const int hgt = static_cast<int>(h.image.height);
  return GrayImage(w, hgt, finish_read<std::uint8_t>(h, path, PNG_FORMAT_GRAY, 1));
}

void write_rgb(const fs::path& path, const RasterImage& img) {
  write(path, img.pixels().data(), img.width(), img.height(), PNG_FORMAT_RGB);
}

void write_gray(const fs::path& path, const GrayImage& img) {
  write(path, img.pixels().data(), img.width(), img.height(), PNG_FORMAT_GRAY);
}

void write_mask(const fs::path& path, const BinaryMask& mask) {
  GrayImage g(mask.width(), mask.height());
  auto out = g.pixels();
  auto bits = mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? 255 : 0;
  write_gray(path, g);
}

}  // namespace rfaug::png
