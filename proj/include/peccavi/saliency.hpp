#pragma once

#include "peccavi/error.hpp"
#include "peccavi/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace peccavi {

/// Per-pixel saliency in [0,1] tagged with where it came from.
struct SaliencyMap {
    Plane values;
    // "spectral_residual" for the built-in provider, otherwise the external
    // source named in the sidecar (e.g. "xrai").
    std::string provenance = "spectral_residual";
    bool external = false;

    int width() const noexcept { return values.cols; }
    int height() const noexcept { return values.rows; }
};

/// Axis-aligned box with top-left origin, scored by mean saliency inside it.
struct Region {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    double score = 0.0;

    long long area() const noexcept { return static_cast<long long>(w) * h; }
    cv::Rect rect() const noexcept { return {x, y, w, h}; }
    friend bool operator==(const Region&, const Region&) = default;
};

inline constexpr int kMinRegionSide = 8;

// Classical spectral-residual saliency computed on a 64x64 luma thumbnail.
SaliencyMap spectral_residual_saliency(const ImageBuffer& image);

// Errors from the saliency interchange loader.
class SaliencyFileMissing : public IoError {
public:
    using IoError::IoError;
};
class SaliencySidecarMalformed : public FormatError {
public:
    using FormatError::FormatError;
};
class SaliencyDimensionMismatch : public DimensionError {
public:
    using DimensionError::DimensionError;
};

// Sidecar path for a `<stem>.sal.png` map: `<stem>.sal.json`.
std::filesystem::path saliency_sidecar_path(const std::filesystem::path& png_path);

/// Reads a 16-bit grayscale `<stem>.sal.png` plus its JSON sidecar
/// `{"w","h","source","version"}` and rescales to [0,1].
SaliencyMap load_external_saliency(const std::filesystem::path& png_path, int expected_width,
                                   int expected_height);

// Writes the interchange pair for `map`; `source` lands in the sidecar.
void save_saliency(const SaliencyMap& map, const std::filesystem::path& png_path, const std::string& source);

/// Otsu threshold, 8-connected components, bounding boxes of the
/// `max_regions` largest components scored by mean saliency. Boxes grow to
/// at least 8x8, are clipped to the map and come back sorted by score.
std::vector<Region> extract_regions(const SaliencyMap& map, int max_regions);

// Mean of `map` inside `box`.
double mean_saliency(const Plane& map, const cv::Rect& box);

}  // namespace peccavi
