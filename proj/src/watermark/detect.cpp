#include "peccavi/error.hpp"
#include "peccavi/watermark.hpp"

#include <nlohmann/json.hpp>
#include <opencv2/core/utility.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <numeric>

namespace peccavi {

double score_spectrum(const Spectrum& spectrum, const RingPattern& pattern) {
    if (spectrum.size() != pattern.size) throw DimensionError("spectrum and pattern differ in size");
    const auto& coeffs = spectrum.coeffs();
    double num = 0.0, obs_energy = 0.0, pat_energy = 0.0;
    for (const auto& ring : pattern.rings) {
        double ring_energy = 0.0;
        for (int idx : ring.indices) ring_energy += std::norm(coeffs[idx]);
        if (ring_energy <= 0.0) continue;
        // Whitening each ring keeps low-frequency rings from dominating.
        const double inv_rms = 1.0 / std::sqrt(ring_energy / static_cast<double>(ring.indices.size()));
        for (std::size_t i = 0; i < ring.indices.size(); ++i) {
            const auto obs = coeffs[ring.indices[i]] * inv_rms;
            num += (obs * std::conj(ring.values[i])).real();
            obs_energy += std::norm(obs);
            pat_energy += std::norm(ring.values[i]);
        }
    }
    if (obs_energy <= 0.0 || pat_energy <= 0.0) return 0.0;
    return std::clamp(num / std::sqrt(obs_energy * pat_energy), -1.0, 1.0);
}

double score_patch(const Plane& patch, const WatermarkKey& key, const RingSpec& spec) {
    if (patch.rows != key.transform_size || patch.cols != key.transform_size) {
        throw DimensionError(fmt::format("patch must be {0}x{0}, got {1}x{2}", key.transform_size, patch.cols,
                                         patch.rows));
    }
    return score_spectrum(forward_spectrum(patch), make_ring_pattern(key, spec));
}

double standard_normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double wdp_from_score(double best_score, const NullStats& stats) noexcept {
    return standard_normal_cdf((best_score - stats.mu0) / stats.sigma0);
}

namespace {

struct ScanUnit {
    int size;
    int y;
    int x;
    Channel channel;
};

std::vector<ScanUnit> scan_units(const ImageBuffer& image, const WatermarkKey& key,
                                 const std::vector<Channel>& channels) {
    std::vector<ScanUnit> units;
    const int stride = key.stride();
    for (int size : key.scan_scales()) {
        for (int y = 0; y + size <= image.height(); y += stride) {
            for (int x = 0; x + size <= image.width(); x += stride) {
                for (Channel c : channels) units.push_back({size, y, x, c});
            }
        }
    }
    if (units.empty()) {
        const int side = std::min(image.width(), image.height());
        for (Channel c : channels) units.push_back({side, 0, 0, c});
    }
    return units;
}

}  // namespace

DetectionReport scan(const ImageBuffer& image, const WatermarkKey& key) {
    if (image.empty()) throw DimensionError("cannot scan an empty image");
    const int size = key.transform_size;

    std::vector<Channel> channels;
    std::vector<Plane> planes(kChannelCount);
    for (int c = 0; c < kChannelCount; ++c) {
        const auto channel = static_cast<Channel>(c);
        if (!channel_available(image, channel)) continue;
        channels.push_back(channel);
        planes[c] = extract_channel(image, channel);
    }

    std::vector<RingPattern> patterns;
    for (double strength : kLegalStrengths) patterns.push_back(make_ring_pattern(key, make_ring_spec(strength, size)));

    const auto units = scan_units(image, key, channels);
    std::vector<PatchScore> results(units.size());
    cv::parallel_for_(cv::Range(0, static_cast<int>(units.size())), [&](const cv::Range& range) {
        for (int i = range.start; i < range.end; ++i) {
            const auto& u = units[i];
            const Plane& plane = planes[static_cast<int>(u.channel)];
            const Plane patch = resample(plane(cv::Rect(u.x, u.y, u.size, u.size)), size, size);
            const Spectrum spectrum = forward_spectrum(patch);
            PatchScore best{u.x, u.y, u.size, u.channel, kLegalStrengths[0], -1.0};
            for (const auto& pattern : patterns) {
                const double s = score_spectrum(spectrum, pattern);
                if (s > best.score) {
                    best.score = s;
                    best.strength = pattern.strength;
                }
            }
            results[i] = best;
        }
    });

    DetectionReport report;
    report.scanned_patches = static_cast<int>(units.size());
    // Units are in (scale, y, x, channel) order; the first maximum wins.
    const auto best = std::max_element(results.begin(), results.end(), [](const PatchScore& a, const PatchScore& b) {
        return a.score < b.score;
    });
    report.best = *best;
    report.best_score = best->score;
    report.per_patch_scores = std::move(results);
    report.calibration = key.calibration;
    return report;
}

DetectionReport detect(const ImageBuffer& image, const WatermarkKey& key) {
    if (!key.calibration) {
        throw CalibrationError("key is not calibrated; run calibrate on a clean corpus first");
    }
    DetectionReport report = scan(image, key);
    report.wdp = wdp_from_score(report.best_score, *key.calibration);
    return report;
}

WatermarkKey calibrate(WatermarkKey key, std::span<const ImageBuffer> clean_corpus, double target_fpr) {
    if (static_cast<int>(clean_corpus.size()) < kMinCalibrationImages) {
        throw CalibrationError(fmt::format("calibration needs at least {} clean images, got {}",
                                           kMinCalibrationImages, clean_corpus.size()));
    }
    if (!(target_fpr > 0.0 && target_fpr < 0.1)) {
        throw ConfigError(fmt::format("target false-positive rate must lie in (0, 0.1), got {}", target_fpr));
    }
    std::vector<double> best;
    best.reserve(clean_corpus.size());
    for (const auto& image : clean_corpus) best.push_back(scan(image, key).best_score);

    const double n = static_cast<double>(best.size());
    const double mean = std::accumulate(best.begin(), best.end(), 0.0) / n;
    double ss = 0.0;
    for (double b : best) ss += (b - mean) * (b - mean);
    const double stddev = std::max(std::sqrt(ss / (n - 1.0)), 1e-6);

    // Method-of-moments Gumbel fit for the max statistic.
    constexpr double kEulerGamma = 0.5772156649015329;
    constexpr double kZ90 = 1.2815515655446004;
    const double beta = stddev * std::sqrt(6.0) / std::numbers::pi;
    const double location = mean - kEulerGamma * beta;
    const double tail_quantile = location - beta * std::log(-std::log1p(-target_fpr));

    NullStats stats;
    stats.mu0 = mean;
    stats.sigma0 = std::max(stddev, (tail_quantile - mean) / kZ90);
    stats.sample_count = static_cast<int>(best.size());
    key.calibration = stats;
    return key;
}

nlohmann::json report_to_json(const DetectionReport& report, bool verbose) {
    auto patch_json = [](const PatchScore& p) {
        return nlohmann::json{{"x", p.x},
                              {"y", p.y},
                              {"size", p.size},
                              {"channel", channel_name(p.channel)},
                              {"strength", p.strength},
                              {"score", p.score}};
    };
    nlohmann::json doc = {{"wdp", report.wdp},
                          {"best_score", report.best_score},
                          {"best", patch_json(report.best)},
                          {"scanned_patches", report.scanned_patches},
                          {"detected", report.wdp >= kDetectionThreshold}};
    if (report.calibration) {
        doc["calibration"] = {{"mu0", report.calibration->mu0},
                              {"sigma0", report.calibration->sigma0},
                              {"n", report.calibration->sample_count}};
    }
    if (verbose) {
        auto& scores = doc["per_patch_scores"] = nlohmann::json::array();
        for (const auto& p : report.per_patch_scores) scores.push_back(patch_json(p));
    }
    return doc;
}

}  // namespace peccavi
