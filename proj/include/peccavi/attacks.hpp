#pragma once

#include "peccavi/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace peccavi {

struct Brightness {
    double factor = 0.5;
};
struct GaussianNoise {
    double sigma = 0.05;
};
struct Jpeg {
    int quality = 50;
};
// Seeded blur + elastic warp + noise stand-in for diffusion paraphrasing.
struct SurrogateParaphrase {
    double strength = 0.1;
};
// The index-th variant listed in a `<stem>.para.json` manifest.
struct ExternalParaphrase {
    std::filesystem::path manifest;
    int index = 0;
};

struct AttackSpec {
    std::variant<Brightness, GaussianNoise, Jpeg, SurrogateParaphrase, ExternalParaphrase> kind;
    std::uint64_t seed = 0;
};

// Short label used as a report column, e.g. "jpeg_q50".
std::string attack_label(const AttackSpec& spec);

// Throws ConfigError when parameters fall outside their legal ranges.
void validate(const AttackSpec& spec);

// The standard robustness suite: brightness 0.5, Gaussian sigma 0.05,
// JPEG Q50, surrogate paraphrase s = 0.1 and 0.2.
std::vector<AttackSpec> standard_attacks(std::uint64_t seed = 7);

// Never changes image dimensions; deterministic for a fixed seed.
ImageBuffer apply_attack(const ImageBuffer& image, const AttackSpec& spec);

ImageBuffer surrogate_paraphrase(const ImageBuffer& image, double strength, std::uint64_t seed);

/// Paraphrase interchange manifest written by the neural adapters.
struct ParaphraseManifest {
    std::string generator;
    double strength = 0.0;
    double guidance_scale = 0.0;
    std::vector<std::filesystem::path> paths;  // resolved against the manifest directory
    std::vector<std::uint64_t> seeds;
};

ParaphraseManifest load_paraphrase_manifest(const std::filesystem::path& path);
void save_paraphrase_manifest(const ParaphraseManifest& manifest, const std::filesystem::path& path);

}  // namespace peccavi
