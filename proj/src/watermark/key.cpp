#include "peccavi/error.hpp"
#include "peccavi/watermark.hpp"

#include <nlohmann/json.hpp>

#include <fmt/format.h>
#include <fstream>

namespace peccavi {

NmpConfig WatermarkKey::nmp_config(int max_nmps) const {
    NmpConfig config;
    config.max_nmps = max_nmps;
    config.cell_size = stride();
    config.footprints = scan_scales();
    config.seed = seed;
    config.rotation_offset = rotation_offset;
    return config;
}

nlohmann::json key_to_json(const WatermarkKey& key) {
    nlohmann::json doc = {{"version", 1},
                          {"seed", key.seed},
                          {"S", key.transform_size},
                          {"ring_value_scale", key.ring_value_scale},
                          {"rotation", key.rotation_offset}};
    if (key.calibration) {
        doc["calibration"] = {{"mu0", key.calibration->mu0},
                              {"sigma0", key.calibration->sigma0},
                              {"n", key.calibration->sample_count}};
    } else {
        doc["calibration"] = nullptr;
    }
    return doc;
}

WatermarkKey key_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("version").get<int>() != 1) throw FormatError("unsupported key file version");
        WatermarkKey key;
        key.seed = doc.at("seed").get<std::uint64_t>();
        key.transform_size = doc.at("S").get<int>();
        key.ring_value_scale = doc.at("ring_value_scale").get<double>();
        key.rotation_offset = doc.value("rotation", 0);
        if (key.transform_size < 8 || key.transform_size % 2 != 0) {
            throw FormatError(fmt::format("transform size {} must be even and >= 8", key.transform_size));
        }
        if (doc.contains("calibration") && !doc["calibration"].is_null()) {
            const auto& cal = doc["calibration"];
            NullStats stats{cal.at("mu0").get<double>(), cal.at("sigma0").get<double>(), cal.at("n").get<int>()};
            if (!(stats.sigma0 > 0.0)) throw FormatError("calibration sigma0 must be positive");
            key.calibration = stats;
        }
        return key;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("malformed key: {}", e.what()));
    }
}

void save_key(const WatermarkKey& key, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("could not write key file {}", path.string()));
    out << key_to_json(key).dump(2) << '\n';
}

WatermarkKey load_key(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("could not open key file {}", path.string()));
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return key_from_json(doc);
}

}  // namespace peccavi
