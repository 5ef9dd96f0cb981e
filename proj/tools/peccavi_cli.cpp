// peccavi: command line front end for embedding, detection and evaluation.

#include "peccavi/attacks.hpp"
#include "peccavi/bench.hpp"
#include "peccavi/io.hpp"
#include "peccavi/pipeline.hpp"
#include "peccavi/quality.hpp"
#include "peccavi/synthetic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

using namespace peccavi;
namespace fs = std::filesystem;

namespace {

constexpr int kExitNotDetected = 2;

std::vector<ImageBuffer> load_corpus(const fs::path& dir) {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == ".png" && !name.ends_with(".sal.png")) paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<ImageBuffer> images;
    for (const auto& p : paths) images.push_back(read_image(p));
    return images;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Paraphrase-resilient image watermarking"};
    app.require_subcommand(1);
    app.fallthrough();
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Only log errors");

    // keygen
    auto* keygen = app.add_subcommand("keygen", "Create a new (uncalibrated) key");
    fs::path key_out;
    std::uint64_t key_seed = 0;
    keygen->add_option("-o,--output", key_out, "Key file to write")->required();
    auto* seed_opt = keygen->add_option("--seed", key_seed, "Key seed (random when omitted)");

    // calibrate
    auto* calib = app.add_subcommand("calibrate", "Fit the null model on clean images");
    fs::path corpus_dir, key_path;
    double target_fpr = 0.01;
    calib->add_option("--corpus", corpus_dir, "Directory of clean PNGs (>= 50)")->required()->check(CLI::ExistingDirectory);
    calib->add_option("--key", key_path, "Key file, updated in place")->required()->check(CLI::ExistingFile);
    calib->add_option("--target-fpr", target_fpr, "False-positive target per image")->check(CLI::Range(1e-6, 0.5));

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "Watermark one image");
    fs::path input, output, paraphrase_dir, nmp_in, nmp_out;
    std::string saliency = "spectral";
    bool burnish = false;
    int top = 4;
    embed_cmd->add_option("-i,--input", input)->required()->check(CLI::ExistingFile);
    embed_cmd->add_option("-o,--output", output, "Output PNG")->required();
    embed_cmd->add_option("--key", key_path)->required()->check(CLI::ExistingFile);
    embed_cmd->add_option("--paraphrase-dir", paraphrase_dir, "Directory holding <stem>.para.json");
    embed_cmd->add_option("--saliency", saliency)->check(CLI::IsMember({"spectral", "external"}));
    embed_cmd->add_flag("--burnish", burnish, "Run noisy burnishing after enhancement");
    embed_cmd->add_option("--top", top, "Maximum number of NMPs")->check(CLI::Range(1, 64));
    embed_cmd->add_option("--nmp", nmp_in, "Use a precomputed NMP file")->check(CLI::ExistingFile);
    embed_cmd->add_option("--save-nmp", nmp_out, "Write the NMP set used");

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "Report the watermark detection probability");
    bool verbose = false;
    detect_cmd->add_option("-i,--input", input)->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("--key", key_path)->required()->check(CLI::ExistingFile);
    detect_cmd->add_flag("--verbose", verbose, "Emit the full JSON report");

    // nmp
    auto* nmp_cmd = app.add_subcommand("nmp", "Select non-melting points without embedding");
    nmp_cmd->add_option("-i,--input", input)->required()->check(CLI::ExistingFile);
    nmp_cmd->add_option("-o,--output", nmp_out, "NMP JSON file")->required();
    nmp_cmd->add_option("--key", key_path, "Key (channel rotation); seed 0 when omitted")->check(CLI::ExistingFile);
    nmp_cmd->add_option("--paraphrase-dir", paraphrase_dir);
    nmp_cmd->add_option("--saliency", saliency)->check(CLI::IsMember({"spectral", "external"}));
    nmp_cmd->add_option("--top", top)->check(CLI::Range(1, 64));

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "Apply one attack to an image");
    std::string kind;
    double factor = 0.5, sigma = 0.05, strength = 0.1;
    int quality = 50;
    std::uint64_t attack_seed = 7;
    attack_cmd->add_option("-i,--input", input)->required()->check(CLI::ExistingFile);
    attack_cmd->add_option("-o,--output", output)->required();
    attack_cmd->add_option("--kind", kind)->required()->check(
        CLI::IsMember({"brightness", "gaussian", "jpeg", "paraphrase"}));
    attack_cmd->add_option("--factor", factor, "Brightness factor");
    attack_cmd->add_option("--sigma", sigma, "Gaussian noise sigma");
    attack_cmd->add_option("--quality", quality, "JPEG quality");
    attack_cmd->add_option("--strength", strength, "Surrogate paraphrase strength");
    attack_cmd->add_option("--seed", attack_seed);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Embed, attack and detect over a corpus");
    std::string attack_set = "standard";
    fs::path report_path, json_path;
    eval_cmd->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--key", key_path)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--attacks", attack_set)->check(CLI::IsMember({"standard"}));
    eval_cmd->add_option("--report", report_path, "CSV output")->required();
    eval_cmd->add_option("--json", json_path, "JSON summary output");
    eval_cmd->add_option("--paraphrase-dir", paraphrase_dir);
    eval_cmd->add_option("--saliency", saliency)->check(CLI::IsMember({"spectral", "external"}));
    eval_cmd->add_option("--top", top)->check(CLI::Range(1, 64));

    // fixtures
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Write deterministic synthetic test scenes");
    fs::path fixtures_dir;
    int count = 20;
    std::uint64_t fixtures_seed = 1;
    fixtures_cmd->add_option("-o,--output", fixtures_dir)->required();
    fixtures_cmd->add_option("--count", count)->check(CLI::Range(1, 100000));
    fixtures_cmd->add_option("--seed", fixtures_seed);

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(quiet ? spdlog::level::err : spdlog::level::info);

    PipelineConfig config;
    config.max_nmps = top;
    config.burnish = burnish;
    const bool external = saliency == "external";

    try {
        if (keygen->parsed()) {
            WatermarkKey key;
            key.seed = seed_opt->count() ? key_seed : (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();
            save_key(key, key_out);
            std::printf("wrote key %s (seed %llu); calibrate it before detecting\n", key_out.c_str(),
                        static_cast<unsigned long long>(key.seed));
        } else if (calib->parsed()) {
            const auto corpus = load_corpus(corpus_dir);
            const auto key = calibrate(load_key(key_path), corpus, target_fpr);
            save_key(key, key_path);
            std::printf("calibrated on %zu images: mu0 %.6f sigma0 %.6f\n", corpus.size(), key.calibration->mu0,
                        key.calibration->sigma0);
        } else if (embed_cmd->parsed()) {
            const auto key = load_key(key_path);
            const auto image = read_image(input);
            EmbedOutcome outcome;
            if (!nmp_in.empty()) {
                outcome = watermark_image(image, load_nmp_set(nmp_in), key, config);
            } else {
                outcome = watermark_image(image, key, config, discover_inputs(input, image, external, paraphrase_dir));
            }
            write_png(outcome.output, output);
            if (!nmp_out.empty()) save_nmp_set(outcome.nmps, nmp_out);
            std::printf("%zu NMPs, gamma %.4f, PSNR %.2f dB, SSIM %.4f\n", outcome.nmps.nmps.size(),
                        outcome.enhancement.gamma, psnr(outcome.output, image), ssim(outcome.output, image));
        } else if (detect_cmd->parsed()) {
            const auto report = detect(read_image(input), load_key(key_path));
            if (verbose) {
                std::cout << report_to_json(report, true).dump(2) << '\n';
            } else {
                std::printf("WDP %.4f (%s)\n", report.wdp,
                            report.wdp >= kDetectionThreshold ? "watermarked" : "not detected");
            }
            return report.wdp >= kDetectionThreshold ? 0 : kExitNotDetected;
        } else if (nmp_cmd->parsed()) {
            const auto key = key_path.empty() ? WatermarkKey{} : load_key(key_path);
            const auto image = read_image(input);
            const auto set = find_nmps(image, key, config, discover_inputs(input, image, external, paraphrase_dir));
            save_nmp_set(set, nmp_out);
            for (const auto& nmp : set.nmps) {
                std::printf("(%d,%d) %dx%d n=%d strength %.2f%s\n", nmp.region.x, nmp.region.y, nmp.region.w,
                            nmp.region.h, nmp.n, nmp.strength, nmp.is_random_patch ? " random" : "");
            }
        } else if (attack_cmd->parsed()) {
            AttackSpec spec;
            spec.seed = attack_seed;
            if (kind == "brightness") spec.kind = Brightness{factor};
            else if (kind == "gaussian") spec.kind = GaussianNoise{sigma};
            else if (kind == "jpeg") spec.kind = Jpeg{quality};
            else spec.kind = SurrogateParaphrase{strength};
            validate(spec);
            write_png(apply_attack(read_image(input), spec), output);
        } else if (eval_cmd->parsed()) {
            const auto report =
                run_benchmark(corpus_dir, load_key(key_path), standard_attacks(), config, external, paraphrase_dir);
            write_text(report_path, report_to_csv(report));
            if (!json_path.empty()) write_text(json_path, report_to_json(report, config).dump(2) + "\n");
            std::printf("%d/%zu images, PSNR %.2f, SSIM %.4f, WDP pre %.4f", report.succeeded, report.rows.size(),
                        report.mean_psnr, report.mean_ssim, report.mean_wdp_pre);
            for (std::size_t a = 0; a < report.attack_labels.size(); ++a) {
                std::printf(", %s %.4f", report.attack_labels[a].c_str(), report.mean_wdp_post[a]);
            }
            std::printf("\n");
        } else if (fixtures_cmd->parsed()) {
            fs::create_directories(fixtures_dir);
            const auto scenes = synthetic_corpus(fixtures_seed, count);
            for (int i = 0; i < count; ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "scene_%04d.png", i);
                write_png(scenes[i], fixtures_dir / name);
            }
            std::printf("wrote %d scenes to %s\n", count, fixtures_dir.c_str());
        }
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
