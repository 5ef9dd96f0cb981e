#pragma once

#include "peccavi/image.hpp"
#include "peccavi/nmp.hpp"
#include "peccavi/spectrum.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace peccavi {

// Strengths an NMP can carry, one per match count n = 1..5.
inline constexpr std::array<double, 5> kLegalStrengths{1.0, 0.75, 0.5, 0.25, 0.1};

// WDP at or above which an image is reported as watermarked.
inline constexpr double kDetectionThreshold = 0.9;

/// Null model of the brute-force max score on unwatermarked images.
struct NullStats {
    double mu0 = 0.0;
    double sigma0 = 1.0;
    int sample_count = 0;

    friend bool operator==(const NullStats&, const NullStats&) = default;
};

/// The sole secret shared by embedding and detection.
struct WatermarkKey {
    std::uint64_t seed = 0;
    int transform_size = 64;
    double ring_value_scale = 1.0;
    int rotation_offset = 0;
    std::optional<NullStats> calibration;

    int stride() const noexcept { return transform_size / 2; }
    // Square window sides scanned by the detector: S/2, S, 3S/2.
    std::vector<int> scan_scales() const { return {transform_size / 2, transform_size, 3 * transform_size / 2}; }
    // Embedding configuration consistent with the detector's scan lattice.
    NmpConfig nmp_config(int max_nmps = 4) const;

    friend bool operator==(const WatermarkKey&, const WatermarkKey&) = default;
};

void save_key(const WatermarkKey& key, const std::filesystem::path& path);
WatermarkKey load_key(const std::filesystem::path& path);
nlohmann::json key_to_json(const WatermarkKey& key);
WatermarkKey key_from_json(const nlohmann::json& doc);

/// Concentric ring layout for one strength.
///
/// Radii are fractions of Nyquist, starting one radial unit (0.1 Nyquist)
/// out and stepping by spacing * unit up to 0.9 Nyquist (0.45 cycles per
/// pixel). The spacing is 1 - 0.5 * strength, so stronger marks pack more,
/// tighter rings.
struct RingSpec {
    double strength = 1.0;
    double spacing = 0.5;
    std::vector<double> radii;
    int transform_size = 64;

    // Ring radii in coefficient units, rounded and de-duplicated.
    std::vector<int> coefficient_radii() const;
};

inline constexpr double kRadialUnit = 0.1;
inline constexpr double kMaxRingRadius = 0.9;

double ring_spacing(double strength) noexcept;
RingSpec make_ring_spec(double strength, int transform_size = 64);

/// Key-seeded complex values on each ring of a spec, conjugate symmetric.
struct RingPattern {
    struct Ring {
        int radius = 0;
        // Flat indices into a center-shifted S x S spectrum.
        std::vector<int> indices;
        // Unit-RMS values, one per index.
        std::vector<std::complex<double>> values;
    };

    int size = 0;
    double strength = 1.0;
    std::vector<Ring> rings;

    // Values on the rings, zero elsewhere.
    Spectrum as_spectrum() const;
    std::size_t coefficient_count() const noexcept;
};

RingPattern make_ring_pattern(const WatermarkKey& key, const RingSpec& spec);

// Normalized correlation (real part) between two patterns' ring values.
double pattern_correlation(const RingPattern& a, const RingPattern& b);

/// Writes each NMP's ring pattern into the spectrum of its patch.
///
/// The patch of the NMP's channel is resampled to S x S, its ring
/// coefficients are replaced by ring_value_scale * pattern, and the change
/// is resampled back and added to the original patch. Pixels outside every
/// NMP are untouched.
ImageBuffer embed(const ImageBuffer& image, const NmpSet& nmps, const WatermarkKey& key);

// Per-ring whitened correlation of a spectrum's ring coefficients with the
// pattern, in [-1, 1].
double score_spectrum(const Spectrum& spectrum, const RingPattern& pattern);

// Scores an S x S plane patch against the key's pattern for `spec`.
double score_patch(const Plane& patch, const WatermarkKey& key, const RingSpec& spec);

struct PatchScore {
    int x = 0;
    int y = 0;
    int size = 0;
    Channel channel = Channel::Y;
    double strength = 1.0;
    double score = -1.0;
};

struct DetectionReport {
    // Best score over strengths for every scanned (window, channel).
    std::vector<PatchScore> per_patch_scores;
    PatchScore best;
    double best_score = -1.0;
    double wdp = 0.0;
    int scanned_patches = 0;
    std::optional<NullStats> calibration;
};

// Brute-force scan without calibration; wdp stays 0.
DetectionReport scan(const ImageBuffer& image, const WatermarkKey& key);

// Scan plus calibrated WDP. Throws CalibrationError for an uncalibrated key.
DetectionReport detect(const ImageBuffer& image, const WatermarkKey& key);

double standard_normal_cdf(double z) noexcept;
double wdp_from_score(double best_score, const NullStats& stats) noexcept;

inline constexpr int kMinCalibrationImages = 50;

/// Fits the null model from clean images.
///
/// mu0 is the mean best score. sigma0 is the sample deviation, widened when
/// needed so that WDP reaches the detection threshold only at the
/// (1 - target_fpr) quantile of a moment-fitted Gumbel law, the limiting
/// law of a maximum over many scan windows.
WatermarkKey calibrate(WatermarkKey key, std::span<const ImageBuffer> clean_corpus, double target_fpr = 0.01);

nlohmann::json report_to_json(const DetectionReport& report, bool verbose);

}  // namespace peccavi
