#include "peccavi/error.hpp"
#include "peccavi/saliency.hpp"

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>

#include <fmt/format.h>
#include <fstream>

namespace peccavi {

using nlohmann::json;

std::filesystem::path saliency_sidecar_path(const std::filesystem::path& png_path) {
    auto sidecar = png_path;
    sidecar.replace_extension(".json");
    return sidecar;
}

SaliencyMap load_external_saliency(const std::filesystem::path& png_path, int expected_width,
                                   int expected_height) {
    const auto sidecar_path = saliency_sidecar_path(png_path);
    if (!std::filesystem::exists(png_path)) {
        throw SaliencyFileMissing(fmt::format("saliency map not found: {}", png_path.string()));
    }
    if (!std::filesystem::exists(sidecar_path)) {
        throw SaliencyFileMissing(fmt::format("saliency sidecar not found: {}", sidecar_path.string()));
    }

    json sidecar;
    try {
        std::ifstream in(sidecar_path);
        sidecar = json::parse(in);
    } catch (const json::exception& e) {
        throw SaliencySidecarMalformed(fmt::format("{}: {}", sidecar_path.string(), e.what()));
    }
    if (!sidecar.is_object() || !sidecar.contains("w") || !sidecar.contains("h") || !sidecar.contains("source") ||
        !sidecar["w"].is_number_integer() || !sidecar["h"].is_number_integer() || !sidecar["source"].is_string()) {
        throw SaliencySidecarMalformed(
            fmt::format("{}: expected {{\"w\":int,\"h\":int,\"source\":string}}", sidecar_path.string()));
    }
    if (sidecar.contains("version") && sidecar["version"] != 1) {
        throw SaliencySidecarMalformed(fmt::format("{}: unsupported version", sidecar_path.string()));
    }
    const int w = sidecar["w"].get<int>();
    const int h = sidecar["h"].get<int>();

    const cv::Mat raw = cv::imread(png_path.string(), cv::IMREAD_UNCHANGED);
    if (raw.empty() || raw.channels() != 1 || raw.depth() != CV_16U) {
        throw SaliencySidecarMalformed(
            fmt::format("{}: expected a 16-bit single-channel PNG", png_path.string()));
    }
    if (raw.cols != w || raw.rows != h) {
        throw SaliencyDimensionMismatch(
            fmt::format("{}: sidecar says {}x{}, PNG is {}x{}", png_path.string(), w, h, raw.cols, raw.rows));
    }
    if (w != expected_width || h != expected_height) {
        throw SaliencyDimensionMismatch(fmt::format("{}: map is {}x{}, image is {}x{}", png_path.string(), w, h,
                                                    expected_width, expected_height));
    }

    SaliencyMap map;
    raw.convertTo(map.values, CV_64F, 1.0 / 65535.0);
    double hi = 0.0;
    cv::minMaxLoc(map.values, nullptr, &hi);
    if (hi > 0.0) map.values /= hi;
    map.provenance = sidecar["source"].get<std::string>();
    map.external = true;
    return map;
}

void save_saliency(const SaliencyMap& map, const std::filesystem::path& png_path, const std::string& source) {
    cv::Mat raw;
    map.values.convertTo(raw, CV_16U, 65535.0);
    if (!cv::imwrite(png_path.string(), raw)) {
        throw IoError(fmt::format("could not write saliency map: {}", png_path.string()));
    }
    const json sidecar = {{"w", map.width()}, {"h", map.height()}, {"source", source}, {"version", 1}};
    std::ofstream out(saliency_sidecar_path(png_path));
    if (!out) throw IoError(fmt::format("could not write sidecar for {}", png_path.string()));
    out << sidecar.dump() << '\n';
}

}  // namespace peccavi
