#include "peccavi/pipeline.hpp"

#include "peccavi/attacks.hpp"
#include "peccavi/quality.hpp"
#include "peccavi/error.hpp"
#include "peccavi/rng.hpp"

namespace peccavi {

namespace {

constexpr std::uint64_t kVariantTag = 0x76617269616e74ULL;  // "variant"
constexpr std::uint64_t kPatchTag = 0x7061746368ULL;        // "patch"

}  // namespace

std::vector<ImageBuffer> surrogate_variants(const ImageBuffer& image, int count, double strength,
                                            std::uint64_t seed) {
    std::vector<ImageBuffer> variants;
    variants.reserve(count);
    for (int i = 0; i < count; ++i) {
        variants.push_back(surrogate_paraphrase(image, strength, derive_seed(seed, kVariantTag + i)));
    }
    return variants;
}

NmpSet find_nmps(const ImageBuffer& image, const WatermarkKey& key, const PipelineConfig& config,
                 const PipelineInputs& inputs) {
    const SaliencyMap map = inputs.saliency ? *inputs.saliency : spectral_residual_saliency(image);
    const auto regions = extract_regions(map, config.max_regions);

    std::vector<ImageBuffer> variants = inputs.variants;
    if (variants.empty()) variants = surrogate_variants(image, config.variant_count, config.variant_strength, key.seed);

    std::vector<std::optional<SaliencyMap>> variant_maps = inputs.variant_saliency;
    variant_maps.resize(variants.size());
    std::size_t next = 0;
    auto finder = [&](const ImageBuffer& variant) {
        const auto& given = variant_maps[next++];
        const bool usable = given && given->width() == variant.width() && given->height() == variant.height();
        return extract_regions(usable ? *given : spectral_residual_saliency(variant), config.max_regions);
    };
    const ParaphraseSet pset = make_paraphrase_set(image, std::move(variants), finder);

    NmpSet set = compute_nmps(pset, regions, key.nmp_config(config.max_nmps));
    if (!config.random_patch) return set;
    // NMPs are ranked most stable first; give up the tail until the extra
    // patch fits.
    while (true) {
        NmpSet with_patch = add_random_patch(set, derive_seed(key.seed, kPatchTag));
        if (with_patch.has_random_patch() || set.nmps.size() <= 1) return with_patch;
        set.nmps.pop_back();
        set.warnings.push_back("dropped the least stable NMP to make room for the random patch");
    }
}

EmbedOutcome watermark_image(const ImageBuffer& image, const NmpSet& nmps, const WatermarkKey& key,
                             const PipelineConfig& config) {
    EmbedOutcome outcome;
    outcome.nmps = nmps;
    outcome.watermarked = embed(image, nmps, key);
    if (config.enhance) {
        outcome.enhancement = adaptive_enhance(image, outcome.watermarked, config.enhancement);
    } else {
        outcome.enhancement.image = outcome.watermarked;
        outcome.enhancement.ssim_before = ssim(outcome.watermarked, image);
        outcome.enhancement.ssim_after = outcome.enhancement.ssim_before;
    }
    outcome.output = outcome.enhancement.image;
    if (config.burnish) {
        outcome.burnish = noisy_burnish(outcome.output, key, config.burnishing,
                                        [](const ImageBuffer& img) { return spectral_residual_saliency(img); });
        outcome.output = outcome.burnish->image;
    }
    return outcome;
}

EmbedOutcome watermark_image(const ImageBuffer& image, const WatermarkKey& key, const PipelineConfig& config,
                             const PipelineInputs& inputs) {
    return watermark_image(image, find_nmps(image, key, config, inputs), key, config);
}

}  // namespace peccavi
