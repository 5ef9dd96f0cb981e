#include "peccavi/enhance.hpp"
#include "peccavi/error.hpp"
#include "peccavi/rng.hpp"

#include <opencv2/core.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace peccavi {

double region_set_iou(const std::vector<Region>& a, const std::vector<Region>& b, int width, int height) {
    cv::Mat1b mask_a = cv::Mat1b::zeros(height, width);
    cv::Mat1b mask_b = cv::Mat1b::zeros(height, width);
    const cv::Rect bounds(0, 0, width, height);
    for (const auto& r : a) mask_a(r.rect() & bounds).setTo(1);
    for (const auto& r : b) mask_b(r.rect() & bounds).setTo(1);
    const int inter = cv::countNonZero(mask_a & mask_b);
    const int uni = cv::countNonZero(mask_a | mask_b);
    return uni > 0 ? static_cast<double>(inter) / uni : 1.0;
}

namespace {

// Removes spatial frequencies below `low_cut` of Nyquist from a plane.
Plane remove_low_frequencies(const Plane& plane, double low_cut) {
    cv::Mat2d freq;
    cv::dft(plane, freq, cv::DFT_COMPLEX_OUTPUT);
    const int rows = plane.rows;
    const int cols = plane.cols;
    for (int r = 0; r < rows; ++r) {
        const double fy = (r <= rows / 2 ? r : r - rows) / static_cast<double>(rows);
        auto* row = freq.ptr<cv::Vec2d>(r);
        for (int c = 0; c < cols; ++c) {
            const double fx = (c <= cols / 2 ? c : c - cols) / static_cast<double>(cols);
            // Normalized so that Nyquist (0.5 cycles/pixel) maps to 1.
            if (std::hypot(fx, fy) / 0.5 < low_cut) row[c] = {0.0, 0.0};
        }
    }
    Plane out;
    cv::dft(freq, out, cv::DFT_INVERSE | cv::DFT_SCALE | cv::DFT_REAL_OUTPUT);
    return out;
}

std::vector<Region> top_regions(const SaliencyFn& saliency_fn, const ImageBuffer& image, int count) {
    return extract_regions(saliency_fn(image), count);
}

}  // namespace

BurnishResult noisy_burnish(const ImageBuffer& watermarked, const WatermarkKey& key, const BurnishConfig& config,
                            const SaliencyFn& saliency_fn) {
    if (!key.calibration) throw CalibrationError("burnishing needs a calibrated key");
    if (!(config.epsilon > 0.0 && config.epsilon <= 0.1)) {
        throw ConfigError(fmt::format("burnish epsilon must lie in (0, 0.1], got {}", config.epsilon));
    }
    if (!(config.wdp_floor > 0.0 && config.wdp_floor < 1.0)) {
        throw ConfigError(fmt::format("burnish WDP floor must lie in (0,1), got {}", config.wdp_floor));
    }
    if (config.iterations < 0) throw ConfigError("burnish iterations must be >= 0");

    BurnishResult result;
    result.image = watermarked;
    if (config.iterations == 0) {
        result.wdp = detect(watermarked, key).wdp;
        return result;
    }

    const int width = watermarked.width();
    const int height = watermarked.height();
    const auto reference = top_regions(saliency_fn, watermarked, config.top_regions);
    const std::vector<Plane> base = watermarked.planes();

    Rng rng(config.trial_seed);
    double best_divergence = 0.0;
    for (int it = 0; it < config.iterations; ++it) {
        std::vector<Plane> candidate_planes;
        for (const auto& plane : base) {
            Plane noise(height, width);
            for (int y = 0; y < height; ++y) {
                auto* row = noise.ptr<double>(y);
                for (int x = 0; x < width; ++x) row[x] = rng.uniform(-1.0, 1.0);
            }
            noise = remove_low_frequencies(noise, config.low_cut);
            double peak = 0.0;
            cv::minMaxLoc(cv::abs(noise), nullptr, &peak);
            if (peak > 0.0) noise *= config.epsilon / peak;
            candidate_planes.push_back(plane + noise);
        }
        const ImageBuffer candidate = ImageBuffer::from_planes(candidate_planes);

        const double divergence =
            1.0 - region_set_iou(reference, top_regions(saliency_fn, candidate, config.top_regions), width, height);
        if (divergence <= best_divergence) continue;
        const double wdp = detect(candidate, key).wdp;
        if (wdp < config.wdp_floor) continue;

        best_divergence = divergence;
        result.image = candidate;
        result.wdp = wdp;
        ++result.accepted;
    }
    result.divergence = best_divergence;
    if (result.accepted == 0) result.wdp = detect(watermarked, key).wdp;
    return result;
}

}  // namespace peccavi
