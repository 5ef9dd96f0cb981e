#pragma once

#include "peccavi/image.hpp"
#include "peccavi/saliency.hpp"
#include "peccavi/watermark.hpp"

#include <cstdint>
#include <functional>

namespace peccavi {

struct EnhancementConfig {
    double s_star = 0.92;
    int grid_steps = 64;  // gamma resolution is 1 / grid_steps
};

struct EnhancementResult {
    ImageBuffer image;
    double gamma = 0.0;
    double ssim_before = 0.0;
    double ssim_after = 0.0;
    // The floor was not reached for any gamma below 1.
    bool quality_warning = false;
    // The monotonicity probe failed and a full sweep was used.
    bool swept = false;
};

/// Blends the watermarked image back toward the original,
/// x_bar = x_hat + gamma (x0 - x_hat), with the smallest gamma on the grid
/// whose SSIM against x0 reaches s_star.
EnhancementResult adaptive_enhance(const ImageBuffer& original, const ImageBuffer& watermarked,
                                   const EnhancementConfig& config = {});

using SaliencyFn = std::function<SaliencyMap(const ImageBuffer&)>;

struct BurnishConfig {
    double epsilon = 8.0 / 255.0;
    int iterations = 200;
    double wdp_floor = 0.9;
    std::uint64_t trial_seed = 0x6275726e;
    // Fraction of Nyquist below which proposal noise is removed.
    double low_cut = 0.1;
    int top_regions = 3;
};

struct BurnishResult {
    ImageBuffer image;
    int accepted = 0;
    // 1 - IoU of top-region masks between the input and the output.
    double divergence = 0.0;
    double wdp = 0.0;
};

// IoU of the union masks of two region lists on a width x height canvas.
double region_set_iou(const std::vector<Region>& a, const std::vector<Region>& b, int width, int height);

/// Seeded random search for a bounded perturbation that moves the top
/// saliency regions while detection stays at or above wdp_floor.
///
/// Each proposal is uniform noise with its low spatial frequencies removed,
/// rescaled to the L-infinity budget and added to the input. A proposal is
/// kept when it increases the divergence of the top regions and still
/// detects; the best kept proposal is returned.
BurnishResult noisy_burnish(const ImageBuffer& watermarked, const WatermarkKey& key, const BurnishConfig& config,
                            const SaliencyFn& saliency_fn);

}  // namespace peccavi
