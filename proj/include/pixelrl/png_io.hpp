#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "pixelrl/image.hpp"

namespace pixelrl {

/// Reads an 8-bit (or converted-to-8-bit) PNG as gray (1 channel) or RGB (3
/// channels), mapping 0..255 linearly onto [0,1]. Alpha is dropped; palette
/// images are expanded. desired_channels = 0 keeps the file's own layout.
ImagePlane read_png(const std::filesystem::path& path, int desired_channels = 0);

/// Writes a 1- or 3-channel image as an 8-bit PNG (values clipped, round-half-up).
void write_png(const std::filesystem::path& path, const ImagePlane& img);

/// Writes an indexed-color PNG: each byte of `indices` is a palette entry.
void write_indexed_png(const std::filesystem::path& path, int height, int width,
                       const std::vector<std::uint8_t>& indices,
                       const std::vector<std::array<std::uint8_t, 3>>& palette);

struct IndexedImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> indices;
  std::vector<std::array<std::uint8_t, 3>> palette;
};

/// Reads back an indexed PNG without expanding the palette.
IndexedImage read_indexed_png(const std::filesystem::path& path);

}  // namespace pixelrl
