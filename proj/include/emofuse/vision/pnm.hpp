#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "emofuse/vision/image.hpp"

namespace emofuse::vision {

/// Decodes binary PGM (P5) into a gray image or binary PPM (P6) through the
/// luminosity conversion. Maxval must be 255. Throws DecodeError on
/// malformed headers or truncated payloads.
GrayImage load_image(std::span<const std::uint8_t> bytes);

GrayImage load_image_file(const std::filesystem::path& path);

/// Binary PGM (P5), maxval 255; values are rounded and clamped here.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

void save_pgm_file(const GrayImage& img, const std::filesystem::path& path);

}  // namespace emofuse::vision
