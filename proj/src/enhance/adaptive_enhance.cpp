#include "peccavi/enhance.hpp"
#include "peccavi/error.hpp"
#include "peccavi/quality.hpp"

#include <spdlog/spdlog.h>

#include <fmt/format.h>

namespace peccavi {

EnhancementResult adaptive_enhance(const ImageBuffer& original, const ImageBuffer& watermarked,
                                   const EnhancementConfig& config) {
    if (!original.same_shape(watermarked)) throw DimensionError("enhancement needs images of identical shape");
    if (!(config.s_star > 0.0 && config.s_star < 1.0)) {
        throw ConfigError(fmt::format("SSIM floor must lie in (0,1), got {}", config.s_star));
    }
    if (config.grid_steps < 2) throw ConfigError("gamma grid needs at least two steps");

    const int steps = config.grid_steps;
    auto blended = [&](int j) { return blend(watermarked, original, static_cast<double>(j) / steps); };
    auto similarity = [&](int j) { return ssim(blended(j), original); };

    EnhancementResult result;
    result.ssim_before = ssim(watermarked, original);
    if (result.ssim_before >= config.s_star) {
        result.image = watermarked;
        result.ssim_after = result.ssim_before;
        return result;
    }

    int chosen = -1;
    const double at_half = similarity(steps / 2);
    const bool monotone = result.ssim_before <= at_half && at_half <= 1.0;
    if (monotone) {
        // Smallest j in [1, steps-1] passing the floor, assuming monotone SSIM.
        int lo = 1, hi = steps - 1;
        if (similarity(hi) >= config.s_star) {
            while (lo < hi) {
                const int mid = lo + (hi - lo) / 2;
                if (similarity(mid) >= config.s_star) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            chosen = lo;
        }
    } else {
        result.swept = true;
        for (int j = 1; j < steps; ++j) {
            if (similarity(j) >= config.s_star) {
                chosen = j;
                break;
            }
        }
    }

    if (chosen < 0) {
        chosen = steps - 1;
        result.quality_warning = true;
        spdlog::warn("adaptive enhancement: SSIM floor {} not reached below gamma = 1", config.s_star);
    }
    result.gamma = static_cast<double>(chosen) / steps;
    result.image = blended(chosen);
    result.ssim_after = ssim(result.image, original);
    return result;
}

}  // namespace peccavi
