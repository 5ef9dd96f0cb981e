#pragma once

#include "peccavi/image.hpp"
#include "peccavi/saliency.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace peccavi {

// |a ∩ b| / |a ∪ b|; 0 for degenerate boxes.
double iou(const Region& a, const Region& b) noexcept;

// True when the boxes share at least one pixel.
bool overlaps(const Region& a, const Region& b) noexcept;

/// Greedy non-maximum suppression.
///
/// Regions are visited by descending score (ties: smaller y, then smaller x)
/// and kept when their IoU with every kept region is <= `iou_threshold`.
std::vector<Region> nms(std::vector<Region> regions, double iou_threshold = 0.5);

// Watermark strength for a region seen in `n` paraphrases:
// max(0.1, 1 - 0.25 (n - 1)).
double strength_for_count(int n);

/// The original image plus K paraphrased variants and their regions.
struct ParaphraseSet {
    ImageBuffer original;
    std::vector<ImageBuffer> variants;
    std::vector<std::vector<Region>> variant_regions;

    int variant_count() const noexcept { return static_cast<int>(variants.size()); }
};

using RegionFinder = std::function<std::vector<Region>(const ImageBuffer&)>;

// Resamples variants to the original's size and runs `find_regions` on each.
ParaphraseSet make_paraphrase_set(ImageBuffer original, std::vector<ImageBuffer> variants,
                                  const RegionFinder& find_regions);

struct Nmp {
    Region region;
    int n = 0;
    double stability = 0.0;  // 1 - n/K, lower is more stable
    double strength = 1.0;
    Channel channel = Channel::Y;
    bool is_random_patch = false;
};

struct NmpConfig {
    double iou_match = 0.5;
    double nms_threshold = 0.5;
    int max_nmps = 4;
    // Patch grid cell in pixels. Matches the detector's scan stride so that
    // snapped regions line up with scan windows.
    int cell_size = 32;
    // Square patch sides the detector scans, ascending.
    std::vector<int> footprints{32, 64, 96};
    // Key material for the channel rotation.
    std::uint64_t seed = 0;
    int rotation_offset = 0;
};

struct NmpSet {
    std::vector<Nmp> nmps;
    int width = 0;
    int height = 0;
    int cell_size = 32;
    int grid_cols = 0;
    int grid_rows = 0;
    int variant_count = 0;
    std::uint64_t seed = 0;
    int rotation_offset = 0;
    std::array<int, kChannelCount> channel_order{0, 1, 2, 3};
    std::vector<std::string> warnings;

    // Channel for the next NMP appended to the set.
    Channel next_channel() const noexcept;
    bool has_random_patch() const noexcept;
};

// Key-seeded permutation of the four logical channels.
std::array<int, kChannelCount> channel_rotation(std::uint64_t seed);

/// Snaps a box outward to the cell grid, then fits it to the smallest square
/// footprint covering it (the largest one if none does), centred on the
/// snapped box and kept grid-aligned inside the image.
Region fit_to_patch_grid(const Region& region, int width, int height, int cell_size,
                         const std::vector<int>& footprints);

// Central square covering a quarter of the image area.
Region default_box(int width, int height);

/// Turns original-image regions plus paraphrase-variant regions into NMPs:
/// counts per-variant IoU matches, suppresses overlaps, snaps survivors to
/// the patch grid and assigns strengths and channels. Falls back to the
/// central default box when nothing matches.
NmpSet compute_nmps(const ParaphraseSet& pset, const std::vector<Region>& original_regions,
                    const NmpConfig& config = {});

/// Appends one extra patch shaped like the smallest NMP at a seeded,
/// grid-aligned position that overlaps no existing NMP. After 1000 failed
/// draws the set is returned unchanged with a warning.
NmpSet add_random_patch(NmpSet set, std::uint64_t seed);

void save_nmp_set(const NmpSet& set, const std::filesystem::path& path);
NmpSet load_nmp_set(const std::filesystem::path& path);

}  // namespace peccavi
