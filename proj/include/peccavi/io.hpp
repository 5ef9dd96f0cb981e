#pragma once

#include "peccavi/image.hpp"

#include <filesystem>
#include <vector>

namespace peccavi {

// 8-bit PNG/JPEG/any OpenCV-readable file, returned as RGB or gray.
ImageBuffer read_image(const std::filesystem::path& path);

// Lossless 8-bit PNG.
void write_png(const ImageBuffer& image, const std::filesystem::path& path);

// 8-bit quantization round trip through the JPEG codec.
std::vector<unsigned char> encode_jpeg(const ImageBuffer& image, int quality);
ImageBuffer decode_image(const std::vector<unsigned char>& bytes);

// Nearest 8-bit representation, as written by write_png.
ImageBuffer quantize_8bit(const ImageBuffer& image);

}  // namespace peccavi
