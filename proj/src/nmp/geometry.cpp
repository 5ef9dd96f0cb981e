#include "peccavi/error.hpp"
#include "peccavi/nmp.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace peccavi {

double iou(const Region& a, const Region& b) noexcept {
    if (a.w <= 0 || a.h <= 0 || b.w <= 0 || b.h <= 0) return 0.0;
    const long long ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const long long iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const long long inter = ix * iy;
    const long long uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

bool overlaps(const Region& a, const Region& b) noexcept {
    return std::min(a.x + a.w, b.x + b.w) > std::max(a.x, b.x) &&
           std::min(a.y + a.h, b.y + b.h) > std::max(a.y, b.y);
}

std::vector<Region> nms(std::vector<Region> regions, double iou_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
        throw ConfigError(fmt::format("NMS threshold must lie in (0,1), got {}", iou_threshold));
    }
    std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.y, a.x) < std::tie(b.y, b.x);
    });
    std::vector<Region> kept;
    for (const auto& candidate : regions) {
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Region& k) {
            return iou(candidate, k) > iou_threshold;
        });
        if (!suppressed) kept.push_back(candidate);
    }
    return kept;
}

double strength_for_count(int n) {
    if (n < 1) throw ConfigError(fmt::format("match count must be >= 1, got {}", n));
    return std::max(0.1, 1.0 - 0.25 * (n - 1));
}

Region fit_to_patch_grid(const Region& region, int width, int height, int cell_size,
                         const std::vector<int>& footprints) {
    if (cell_size <= 0) throw ConfigError("cell size must be positive");
    if (footprints.empty()) throw ConfigError("at least one patch footprint is required");

    const int x0 = (region.x / cell_size) * cell_size;
    const int y0 = (region.y / cell_size) * cell_size;
    const int x1 = std::min(width, (region.x + region.w + cell_size - 1) / cell_size * cell_size);
    const int y1 = std::min(height, (region.y + region.h + cell_size - 1) / cell_size * cell_size);
    const int extent = std::max(x1 - x0, y1 - y0);
    const int limit = std::min(width, height);

    int side = 0;
    for (int f : footprints) {
        if (f > limit) break;
        side = f;
        if (f >= extent) break;
    }
    if (side == 0) side = limit;

    auto place = [&](int lo, int hi, int span) {
        const double centre = 0.5 * (lo + hi);
        int start = static_cast<int>(std::floor((centre - 0.5 * side) / cell_size + 0.5)) * cell_size;
        const int last = std::max(0, (span - side) / cell_size * cell_size);
        return std::clamp(start, 0, last);
    };
    return {place(x0, x1, width), place(y0, y1, height), side, side, region.score};
}

Region default_box(int width, int height) {
    const int side = std::min({width, height,
                               static_cast<int>(std::lround(std::sqrt(0.25 * width * height)))});
    return {(width - side) / 2, (height - side) / 2, side, side, 0.0};
}

}  // namespace peccavi
