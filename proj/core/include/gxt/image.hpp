#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gxt/common.hpp"

namespace gxt {

/// 8-bit RGBA raster, row-major from the top-left.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;
  /// tEXt chunks written alongside the pixels.
  MetadataList text;

  Image() = default;
  Image(int w, int h, std::array<std::uint8_t, 4> fill = {255, 255, 255, 255});

  std::uint8_t* at(int x, int y) { return &rgba[4 * (static_cast<std::size_t>(y) * width + x)]; }
  const std::uint8_t* at(int x, int y) const { return &rgba[4 * (static_cast<std::size_t>(y) * width + x)]; }
  void blit(const Image& src, int x0, int y0);
};

std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(const std::vector<std::uint8_t>& bytes);
void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

}  // namespace gxt
