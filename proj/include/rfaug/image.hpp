// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rfaug/error.hpp"

namespace rfaug {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Size {
  int width = 0;
  int height = 0;

  friend bool operator==(const Size&, const Size&) = default;
};

/// Row-major 2-D grid. Dimensions are at least 1x1.
template <typename T>
class Grid {
public:
  Grid() = default;

  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "grid dimensions must be >= 1");
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "grid dimensions must be >= 1");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(ErrorCode::InvalidArgument, "grid data length != width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Size size() const noexcept { return {width_, height_}; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept { return data_.size(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& at(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& at(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  std::span<T> row(int y) noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using RasterImage = Grid<Rgb>;
using GrayImage = Grid<std::uint8_t>;

/// Foreground/background mask. Elements are always 0 or 1.
class BinaryMask {
public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false)
      : bits_(width, height, fill ? 1 : 0) {}

  int width() const noexcept { return bits_.width(); }
  int height() const noexcept { return bits_.height(); }
  Size size() const noexcept { return bits_.size(); }
  bool contains(int x, int y) const noexcept { return bits_.contains(x, y); }

  bool get(int x, int y) const noexcept { return bits_.at(x, y) != 0; }
  void set(int x, int y, bool v) noexcept { bits_.at(x, y) = v ? 1 : 0; }

  /// Raw 0/1 bytes, row-major.
  std::span<const std::uint8_t> bits() const noexcept { return bits_.pixels(); }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
  Grid<std::uint8_t> bits_;
};

}  // namespace rfaug
