// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "rfaug/image.hpp"

namespace rfaug::png {

/// Reads only the IHDR chunk.
Size read_size(const std::filesystem::path& path);

/// Decodes to 8-bit RGB; gray is expanded, alpha is dropped, 16-bit is
/// reduced to 8-bit.
RasterImage read_rgb(const std::filesystem::path& path);

/// Decodes to 8-bit single channel; color inputs are converted with the
/// libpng default luminance weights.
GrayImage read_gray(const std::filesystem::path& path);

// Writers emit no timestamp or text chunks so the output bytes depend only
// on pixel content.
void write_rgb(const std::filesystem::path& path, const RasterImage& img);
void write_gray(const std::filesystem::path& path, const GrayImage& img);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace rfaug::png
