#pragma once

#include "peccavi/enhance.hpp"
#include "peccavi/image.hpp"
#include "peccavi/nmp.hpp"
#include "peccavi/saliency.hpp"
#include "peccavi/watermark.hpp"

#include <optional>
#include <vector>

namespace peccavi {

struct PipelineConfig {
    int max_nmps = 4;
    // Candidate regions extracted per saliency map.
    int max_regions = 8;
    // Surrogate variants generated when no external paraphrases are given.
    int variant_count = 5;
    double variant_strength = 0.15;
    bool random_patch = true;
    bool enhance = true;
    EnhancementConfig enhancement;
    bool burnish = false;
    BurnishConfig burnishing;
};

// Optional externally produced inputs for one image.
struct PipelineInputs {
    std::optional<SaliencyMap> saliency;
    std::vector<ImageBuffer> variants;
    // Per-variant maps; missing entries fall back to spectral residual.
    std::vector<std::optional<SaliencyMap>> variant_saliency;
};

struct EmbedOutcome {
    NmpSet nmps;
    ImageBuffer watermarked;  // before enhancement
    ImageBuffer output;       // final image
    EnhancementResult enhancement;
    std::optional<BurnishResult> burnish;
};

// K surrogate paraphrases of `image` at strength s, seeded from `seed`.
std::vector<ImageBuffer> surrogate_variants(const ImageBuffer& image, int count, double strength,
                                            std::uint64_t seed);

// Saliency, paraphrase matching and NMP selection (plus the random patch
// when enabled).
NmpSet find_nmps(const ImageBuffer& image, const WatermarkKey& key, const PipelineConfig& config,
                 const PipelineInputs& inputs = {});

// Full embedding: NMPs, ring embedding, adaptive enhancement and optional
// burnishing.
EmbedOutcome watermark_image(const ImageBuffer& image, const WatermarkKey& key, const PipelineConfig& config,
                             const PipelineInputs& inputs = {});

// Same, with a precomputed NMP set.
EmbedOutcome watermark_image(const ImageBuffer& image, const NmpSet& nmps, const WatermarkKey& key,
                             const PipelineConfig& config);

}  // namespace peccavi
