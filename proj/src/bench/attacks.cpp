#include "peccavi/attacks.hpp"

#include "peccavi/error.hpp"
#include "peccavi/io.hpp"
#include "peccavi/rng.hpp"

#include <nlohmann/json.hpp>
#include <opencv2/imgproc.hpp>

#include <cmath>
#include <fmt/format.h>
#include <fstream>

namespace peccavi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ImageBuffer map_samples(const ImageBuffer& image, auto&& fn) {
    std::vector<double> out(image.data().begin(), image.data().end());
    for (double& v : out) v = fn(v);
    return ImageBuffer(image.width(), image.height(), image.channels(), std::move(out));
}

Plane gaussian_field(int width, int height, Rng& rng) {
    Plane field(height, width);
    for (int y = 0; y < height; ++y) {
        auto* row = field.ptr<double>(y);
        for (int x = 0; x < width; ++x) row[x] = rng.normal();
    }
    return field;
}

constexpr double kBlurPerStrength = 4.0;
constexpr double kWarpPerStrength = 12.0;
constexpr double kWarpSmoothing = 16.0;
constexpr double kNoisePerStrength = 0.15;

}  // namespace

std::string attack_label(const AttackSpec& spec) {
    return std::visit(overloaded{
                          [](const Brightness& a) { return fmt::format("brightness_{:g}", a.factor); },
                          [](const GaussianNoise& a) { return fmt::format("gaussian_{:g}", a.sigma); },
                          [](const Jpeg& a) { return fmt::format("jpeg_q{}", a.quality); },
                          [](const SurrogateParaphrase& a) { return fmt::format("paraphrase_s{:g}", a.strength); },
                          [](const ExternalParaphrase& a) {
                              return fmt::format("external_{}_{}", a.manifest.stem().string(), a.index);
                          },
                      },
                      spec.kind);
}

void validate(const AttackSpec& spec) {
    std::visit(overloaded{
                   [](const Brightness& a) {
                       if (!(a.factor > 0.0)) throw ConfigError("brightness factor must be > 0");
                   },
                   [](const GaussianNoise& a) {
                       if (!(a.sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
                   },
                   [](const Jpeg& a) {
                       if (a.quality < 1 || a.quality > 100) throw ConfigError("JPEG quality must lie in [1,100]");
                   },
                   [](const SurrogateParaphrase& a) {
                       if (!(a.strength > 0.0 && a.strength < 1.0)) {
                           throw ConfigError("paraphrase strength must lie in (0,1)");
                       }
                   },
                   [](const ExternalParaphrase& a) {
                       if (a.index < 0) throw ConfigError("paraphrase index must be >= 0");
                   },
               },
               spec.kind);
}

std::vector<AttackSpec> standard_attacks(std::uint64_t seed) {
    return {
        {Brightness{0.5}, seed},
        {GaussianNoise{0.05}, seed},
        {Jpeg{50}, seed},
        {SurrogateParaphrase{0.1}, seed},
        {SurrogateParaphrase{0.2}, seed},
    };
}

ImageBuffer surrogate_paraphrase(const ImageBuffer& image, double strength, std::uint64_t seed) {
    const int width = image.width();
    const int height = image.height();
    Rng rng(seed);

    // Blur.
    std::vector<Plane> planes = image.planes();
    const double blur_sigma = kBlurPerStrength * strength;
    for (auto& p : planes) cv::GaussianBlur(p, p, cv::Size(0, 0), blur_sigma, blur_sigma, cv::BORDER_REFLECT_101);

    // Smooth random displacement field with peak amplitude 12 s pixels.
    const double amplitude = kWarpPerStrength * strength;
    cv::Mat1f map_x(height, width);
    cv::Mat1f map_y(height, width);
    std::array<Plane, 2> displacement{gaussian_field(width, height, rng), gaussian_field(width, height, rng)};
    for (auto& d : displacement) {
        cv::GaussianBlur(d, d, cv::Size(0, 0), kWarpSmoothing, kWarpSmoothing, cv::BORDER_REFLECT_101);
        double peak = 0.0;
        cv::minMaxLoc(cv::abs(d), nullptr, &peak);
        if (peak > 0.0) d *= amplitude / peak;
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            map_x(y, x) = static_cast<float>(x + displacement[0](y, x));
            map_y(y, x) = static_cast<float>(y + displacement[1](y, x));
        }
    }
    for (auto& p : planes) {
        Plane warped;
        cv::remap(p, warped, map_x, map_y, cv::INTER_LINEAR, cv::BORDER_REFLECT_101);
        p = warped;
    }

    // Noise.
    const double noise_sigma = kNoisePerStrength * strength;
    for (auto& p : planes) p += noise_sigma * gaussian_field(width, height, rng);
    return ImageBuffer::from_planes(planes);
}

ImageBuffer apply_attack(const ImageBuffer& image, const AttackSpec& spec) {
    validate(spec);
    return std::visit(
        overloaded{
            [&](const Brightness& a) { return map_samples(image, [&](double v) { return v * a.factor; }); },
            [&](const GaussianNoise& a) {
                if (a.sigma == 0.0) return image;
                Rng rng(spec.seed);
                return map_samples(image, [&](double v) { return v + a.sigma * rng.normal(); });
            },
            [&](const Jpeg& a) { return decode_image(encode_jpeg(image, a.quality)); },
            [&](const SurrogateParaphrase& a) { return surrogate_paraphrase(image, a.strength, spec.seed); },
            [&](const ExternalParaphrase& a) {
                const auto manifest = load_paraphrase_manifest(a.manifest);
                if (a.index >= static_cast<int>(manifest.paths.size())) {
                    throw FormatError(fmt::format("manifest {} lists {} variants, index {} requested",
                                                  a.manifest.string(), manifest.paths.size(), a.index));
                }
                ImageBuffer variant = read_image(manifest.paths[a.index]);
                if (variant.channels() != image.channels()) {
                    std::vector<Plane> planes;
                    if (image.channels() == 1) {
                        planes.push_back(luma(variant));
                    } else {
                        planes.assign(3, variant.plane(0));
                    }
                    variant = ImageBuffer::from_planes(planes);
                }
                return resize_image(variant, image.width(), image.height());
            },
        },
        spec.kind);
}

ParaphraseManifest load_paraphrase_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("could not open paraphrase manifest {}", path.string()));
    try {
        const auto doc = nlohmann::json::parse(in);
        ParaphraseManifest manifest;
        manifest.generator = doc.at("generator").get<std::string>();
        manifest.strength = doc.contains("strength") ? doc["strength"].get<double>() : doc.at("s").get<double>();
        if (doc.contains("guidance_scale")) {
            manifest.guidance_scale = doc["guidance_scale"].get<double>();
        } else if (doc.contains("guidance")) {
            manifest.guidance_scale = doc["guidance"].get<double>();
        }
        const auto& paths = doc.contains("paths") ? doc["paths"] : doc.at("variants");
        if (!paths.is_array() || paths.empty()) throw FormatError("manifest lists no variants");
        for (const auto& p : paths) {
            std::filesystem::path variant = p.get<std::string>();
            if (variant.is_relative()) variant = path.parent_path() / variant;
            manifest.paths.push_back(variant);
        }
        if (doc.contains("seeds")) manifest.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
        return manifest;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("malformed paraphrase manifest {}: {}", path.string(), e.what()));
    }
}

void save_paraphrase_manifest(const ParaphraseManifest& manifest, const std::filesystem::path& path) {
    const auto base = std::filesystem::absolute(path).parent_path();
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& p : manifest.paths) {
        paths.push_back(p.is_absolute() ? std::filesystem::relative(p, base).string() : p.string());
    }
    const nlohmann::json doc = {{"version", 1},
                                {"generator", manifest.generator},
                                {"strength", manifest.strength},
                                {"guidance_scale", manifest.guidance_scale},
                                {"seeds", manifest.seeds},
                                {"paths", paths}};
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("could not write {}", path.string()));
    out << doc.dump(2) << '\n';
}

}  // namespace peccavi
