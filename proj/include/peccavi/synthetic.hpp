#pragma once

#include "peccavi/image.hpp"

#include <cstdint>
#include <vector>

namespace peccavi {

// Procedural RGB scene: textured gradient background with a few textured
// foreground objects, quantized to 8 bits. Deterministic in `seed`.
ImageBuffer synthetic_scene(std::uint64_t seed, int width = 256, int height = 256);

std::vector<ImageBuffer> synthetic_corpus(std::uint64_t seed, int count, int width = 256, int height = 256);

}  // namespace peccavi
