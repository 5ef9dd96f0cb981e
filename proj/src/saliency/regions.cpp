#include "peccavi/error.hpp"
#include "peccavi/saliency.hpp"

#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <fmt/format.h>

namespace peccavi {

double mean_saliency(const Plane& map, const cv::Rect& box) {
    const cv::Rect clipped = box & cv::Rect(0, 0, map.cols, map.rows);
    if (clipped.empty()) return 0.0;
    return cv::mean(map(clipped))[0];
}

namespace {

// Grows a box symmetrically to the minimum side, then shifts it back inside.
cv::Rect enforce_minimum(cv::Rect box, int width, int height) {
    auto grow = [](int& start, int& extent, int limit) {
        const int target = std::min(kMinRegionSide, limit);
        if (extent < target) {
            start -= (target - extent) / 2;
            extent = target;
        }
        start = std::clamp(start, 0, limit - extent);
    };
    grow(box.x, box.width, width);
    grow(box.y, box.height, height);
    return box;
}

}  // namespace

std::vector<Region> extract_regions(const SaliencyMap& map, int max_regions) {
    if (max_regions < 1) throw ConfigError(fmt::format("max_regions must be >= 1, got {}", max_regions));
    if (map.values.empty()) return {};

    double hi = 0.0;
    cv::minMaxLoc(map.values, nullptr, &hi);
    if (hi <= 0.0) return {};

    cv::Mat1b as_u8;
    map.values.convertTo(as_u8, CV_8U, 255.0);
    cv::Mat1b mask;
    cv::threshold(as_u8, mask, 0, 255, cv::THRESH_BINARY | cv::THRESH_OTSU);

    cv::Mat labels, stats, centroids;
    const int count = cv::connectedComponentsWithStats(mask, labels, stats, centroids, 8, CV_32S);

    struct Component {
        cv::Rect box;
        int area;
        double score;
    };
    std::vector<Component> components;
    for (int label = 1; label < count; ++label) {
        const cv::Rect box(stats.at<int>(label, cv::CC_STAT_LEFT), stats.at<int>(label, cv::CC_STAT_TOP),
                           stats.at<int>(label, cv::CC_STAT_WIDTH), stats.at<int>(label, cv::CC_STAT_HEIGHT));
        components.push_back({box, stats.at<int>(label, cv::CC_STAT_AREA), mean_saliency(map.values, box)});
    }

    std::sort(components.begin(), components.end(), [](const Component& a, const Component& b) {
        if (a.area != b.area) return a.area > b.area;
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.box.y, a.box.x) < std::tie(b.box.y, b.box.x);
    });
    if (static_cast<int>(components.size()) > max_regions) components.resize(max_regions);

    std::vector<Region> regions;
    regions.reserve(components.size());
    for (const auto& comp : components) {
        const cv::Rect box = enforce_minimum(comp.box, map.width(), map.height());
        regions.push_back({box.x, box.y, box.width, box.height, mean_saliency(map.values, box)});
    }
    std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.y, a.x) < std::tie(b.y, b.x);
    });
    return regions;
}

}  // namespace peccavi
