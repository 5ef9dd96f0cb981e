#include "peccavi/bench.hpp"

#include "peccavi/error.hpp"
#include "peccavi/io.hpp"
#include "peccavi/quality.hpp"
#include "peccavi/rng.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fmt/format.h>
#include <sstream>

namespace peccavi {

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string stem_of(const std::filesystem::path& path) { return path.stem().string(); }

}  // namespace

PipelineInputs discover_inputs(const std::filesystem::path& image_path, const ImageBuffer& image,
                               bool use_external_saliency, const std::filesystem::path& paraphrase_dir) {
    PipelineInputs inputs;
    const std::string stem = stem_of(image_path);
    if (use_external_saliency) {
        const auto map_path = image_path.parent_path() / (stem + ".sal.png");
        inputs.saliency = load_external_saliency(map_path, image.width(), image.height());
    }
    if (!paraphrase_dir.empty()) {
        const auto manifest_path = paraphrase_dir / (stem + ".para.json");
        if (std::filesystem::exists(manifest_path)) {
            const auto manifest = load_paraphrase_manifest(manifest_path);
            for (std::size_t i = 0; i < manifest.paths.size(); ++i) {
                inputs.variants.push_back(
                    apply_attack(image, {ExternalParaphrase{manifest_path, static_cast<int>(i)}, 0}));
                std::optional<SaliencyMap> map;
                auto variant_map = manifest.paths[i];
                variant_map.replace_extension(".sal.png");
                if (use_external_saliency && std::filesystem::exists(variant_map)) {
                    map = load_external_saliency(variant_map, image.width(), image.height());
                }
                inputs.variant_saliency.push_back(std::move(map));
            }
        }
    }
    return inputs;
}

BenchReport run_benchmark(std::vector<NamedImage> images, const WatermarkKey& key,
                          const std::vector<AttackSpec>& attacks, const PipelineConfig& config) {
    if (images.empty()) throw ConfigError("benchmark corpus is empty");
    if (!key.calibration) throw CalibrationError("benchmark needs a calibrated key");
    for (const auto& a : attacks) validate(a);

    std::stable_sort(images.begin(), images.end(),
                     [](const NamedImage& a, const NamedImage& b) { return a.name < b.name; });

    BenchReport report;
    for (const auto& a : attacks) report.attack_labels.push_back(attack_label(a));

    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto& item = images[i];
        BenchRow row;
        row.name = item.name;
        try {
            const auto outcome = watermark_image(item.image, key, config, item.inputs);
            // Outputs are stored as 8-bit PNGs.
            const ImageBuffer stored = quantize_8bit(outcome.output);
            row.nmp_count = static_cast<int>(outcome.nmps.nmps.size());
            row.psnr = psnr(stored, item.image);
            row.ssim = ssim(stored, item.image);
            row.gamma = outcome.enhancement.gamma;
            row.wdp_pre = detect(stored, key).wdp;
            for (const auto& attack : attacks) {
                AttackSpec seeded = attack;
                seeded.seed = derive_seed(attack.seed, i);
                row.wdp_post.push_back(detect(apply_attack(stored, seeded), key).wdp);
            }
            row.ok = true;
        } catch (const std::exception& e) {
            spdlog::warn("benchmark: {} failed: {}", item.name, e.what());
            row.ok = false;
            row.error = e.what();
            row.wdp_post.assign(attacks.size(), 0.0);
        }
        report.rows.push_back(std::move(row));
    }

    report.mean_wdp_post.assign(attacks.size(), 0.0);
    for (const auto& row : report.rows) {
        if (!row.ok) continue;
        ++report.succeeded;
        report.mean_psnr += row.psnr;
        report.mean_ssim += row.ssim;
        report.mean_wdp_pre += row.wdp_pre;
        for (std::size_t a = 0; a < attacks.size(); ++a) report.mean_wdp_post[a] += row.wdp_post[a];
    }
    if (report.succeeded > 0) {
        const double n = report.succeeded;
        report.mean_psnr /= n;
        report.mean_ssim /= n;
        report.mean_wdp_pre /= n;
        for (double& m : report.mean_wdp_post) m /= n;
    }
    return report;
}

BenchReport run_benchmark(const std::filesystem::path& corpus_dir, const WatermarkKey& key,
                          const std::vector<AttackSpec>& attacks, const PipelineConfig& config,
                          bool use_external_saliency, const std::filesystem::path& paraphrase_dir) {
    if (!std::filesystem::is_directory(corpus_dir)) {
        throw IoError(fmt::format("corpus directory not found: {}", corpus_dir.string()));
    }
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && has_suffix(name, ".png") && !has_suffix(name, ".sal.png")) {
            paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw ConfigError(fmt::format("no PNG images in {}", corpus_dir.string()));

    std::vector<NamedImage> images;
    std::vector<BenchRow> unreadable;
    for (const auto& path : paths) {
        try {
            NamedImage item;
            item.name = path.filename().string();
            item.image = read_image(path);
            item.inputs = discover_inputs(path, item.image, use_external_saliency, paraphrase_dir);
            images.push_back(std::move(item));
        } catch (const std::exception& e) {
            spdlog::warn("benchmark: skipping {}: {}", path.string(), e.what());
            BenchRow row;
            row.name = path.filename().string();
            row.error = e.what();
            row.wdp_post.assign(attacks.size(), 0.0);
            unreadable.push_back(std::move(row));
        }
    }
    if (images.empty()) throw ConfigError("no readable images in the corpus");
    BenchReport report = run_benchmark(std::move(images), key, attacks, config);
    for (auto& row : unreadable) report.rows.push_back(std::move(row));
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const BenchRow& a, const BenchRow& b) { return a.name < b.name; });
    return report;
}

std::string report_to_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "image,ok,nmps,psnr,ssim,gamma,wdp_pre";
    for (const auto& label : report.attack_labels) out << ",wdp_" << label;
    out << ",error\n";
    for (const auto& row : report.rows) {
        out << row.name << ',' << (row.ok ? 1 : 0) << ',' << row.nmp_count << ','
            << fmt::format("{:.6f},{:.6f},{:.6f},{:.6f}", row.psnr, row.ssim, row.gamma, row.wdp_pre);
        for (double w : row.wdp_post) out << fmt::format(",{:.6f}", w);
        std::string error = row.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out << ',' << error << '\n';
    }
    out << "mean," << report.succeeded << ",,"
        << fmt::format("{:.6f},{:.6f},,{:.6f}", report.mean_psnr, report.mean_ssim, report.mean_wdp_pre);
    for (double w : report.mean_wdp_post) out << fmt::format(",{:.6f}", w);
    out << ",\n";
    return out.str();
}

nlohmann::json report_to_json(const BenchReport& report, const PipelineConfig& config) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json post = nlohmann::json::object();
        for (std::size_t a = 0; a < report.attack_labels.size() && a < row.wdp_post.size(); ++a) {
            post[report.attack_labels[a]] = row.wdp_post[a];
        }
        rows.push_back({{"image", row.name},
                        {"ok", row.ok},
                        {"error", row.error},
                        {"nmps", row.nmp_count},
                        {"psnr", row.psnr},
                        {"ssim", row.ssim},
                        {"gamma", row.gamma},
                        {"wdp_pre", row.wdp_pre},
                        {"wdp_post", post}});
    }
    nlohmann::json means = nlohmann::json::object();
    for (std::size_t a = 0; a < report.attack_labels.size(); ++a) {
        means[report.attack_labels[a]] = report.mean_wdp_post[a];
    }
    return {{"config",
             {{"max_nmps", config.max_nmps},
              {"max_regions", config.max_regions},
              {"variant_count", config.variant_count},
              {"variant_strength", config.variant_strength},
              {"random_patch", config.random_patch},
              {"enhance", config.enhance},
              {"s_star", config.enhancement.s_star},
              {"burnish", config.burnish}}},
            {"rows", rows},
            {"succeeded", report.succeeded},
            {"mean", {{"psnr", report.mean_psnr}, {"ssim", report.mean_ssim}, {"wdp_pre", report.mean_wdp_pre},
                      {"wdp_post", means}}}};
}

std::vector<double> successive_paraphrase_curve(const ImageBuffer& image, const WatermarkKey& key, int rounds,
                                                double strength, std::uint64_t seed) {
    if (rounds < 1) throw ConfigError("successive paraphrasing needs at least one round");
    std::vector<double> curve;
    ImageBuffer current = image;
    for (int r = 0; r < rounds; ++r) {
        current = apply_attack(current, {SurrogateParaphrase{strength}, derive_seed(seed, r)});
        curve.push_back(detect(current, key).wdp);
    }
    return curve;
}

}  // namespace peccavi
