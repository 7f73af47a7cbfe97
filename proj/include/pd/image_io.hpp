#pragma once

#include <filesystem>

#include "pd/image.hpp"

namespace pd {

enum class ImageFormat { kPgm, kFloatCsv };

// Load a grayscale image.
//  - kPgm: binary (P5) or ASCII (P2) PGM, maxval up to 65535 (two-byte
//    samples are big-endian). Samples are scaled to [0,1].
//  - kFloatCsv: comma-separated doubles, one image row per line; values must
//    be finite but are otherwise unrestricted.
// invert flips the scale (useful when the source encodes ink as 0 = black,
// while this library expects larger = darker).
GrayImage read_image(const std::filesystem::path& path, ImageFormat format,
                     bool invert = false);

// Write an image. PGM output is binary (P5) with values clamped to [0,1] and
// quantized to maxval steps; CSV output preserves doubles exactly
// (shortest round-trip formatting).
void write_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format,
                 int maxval = 255);

}  // namespace pd
