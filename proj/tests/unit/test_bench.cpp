#include "stats.hpp"
#include "peccavi/attacks.hpp"
#include "peccavi/bench.hpp"
#include "peccavi/error.hpp"
#include "peccavi/io.hpp"
#include "peccavi/quality.hpp"
#include "peccavi/rng.hpp"
#include "peccavi/synthetic.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

using namespace peccavi;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PECCAVI_TEST_DATA;

const WatermarkKey& calibrated_key() {
    static const WatermarkKey key = [] {
        WatermarkKey k;
        k.seed = 31337;
        return calibrate(k, synthetic_corpus(900, kMinCalibrationImages));
    }();
    return key;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(Attacks, Identities) {
    const ImageBuffer image = synthetic_scene(1, 64, 48);
    EXPECT_EQ(apply_attack(image, {Brightness{1.0}, 0}), image);
    EXPECT_EQ(apply_attack(image, {GaussianNoise{0.0}, 0}), image);
    const ImageBuffer half = apply_attack(ImageBuffer(8, 8, 3, 0.5), {Brightness{0.5}, 0});
    for (double v : half.data()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Attacks, DeterministicAndShapePreserving) {
    const ImageBuffer image = synthetic_scene(2, 96, 80);
    for (const auto& spec : standard_attacks(3)) {
        const ImageBuffer a = apply_attack(image, spec);
        EXPECT_TRUE(a.same_shape(image)) << attack_label(spec);
        EXPECT_EQ(a, apply_attack(image, spec)) << attack_label(spec);
    }
    const ImageBuffer n1 = apply_attack(image, {GaussianNoise{0.05}, 1});
    const ImageBuffer n2 = apply_attack(image, {GaussianNoise{0.05}, 2});
    EXPECT_NE(n1, n2);
}

TEST(Attacks, JpegGoesThroughTheCodec) {
    const ImageBuffer image = synthetic_scene(4, 64, 64);
    const ImageBuffer attacked = apply_attack(image, {Jpeg{50}, 0});
    EXPECT_EQ(attacked, decode_image(encode_jpeg(image, 50)));
    EXPECT_NE(attacked, quantize_8bit(image));
    EXPECT_LT(psnr(attacked, image), 45.0);
}

TEST(Attacks, Validation) {
    EXPECT_THROW(validate({Brightness{0.0}, 0}), ConfigError);
    EXPECT_THROW(validate({GaussianNoise{-0.1}, 0}), ConfigError);
    EXPECT_THROW(validate({Jpeg{0}, 0}), ConfigError);
    EXPECT_THROW(validate({Jpeg{101}, 0}), ConfigError);
    EXPECT_THROW(validate({SurrogateParaphrase{0.0}, 0}), ConfigError);
    EXPECT_THROW(validate({SurrogateParaphrase{1.0}, 0}), ConfigError);
    EXPECT_THROW(apply_attack(ImageBuffer(8, 8, 1), {Jpeg{0}, 0}), ConfigError);
}

TEST(Attacks, Labels) {
    const auto suite = standard_attacks();
    std::vector<std::string> labels;
    for (const auto& a : suite) labels.push_back(attack_label(a));
    EXPECT_EQ(labels, (std::vector<std::string>{"brightness_0.5", "gaussian_0.05", "jpeg_q50", "paraphrase_s0.1",
                                                "paraphrase_s0.2"}));
}

TEST(Attacks, SurrogateSsimBands) {
    const auto fixtures = synthetic_corpus(1, 10);
    std::vector<double> low, high;
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        low.push_back(ssim(surrogate_paraphrase(fixtures[i], 0.1, i), fixtures[i]));
        high.push_back(ssim(surrogate_paraphrase(fixtures[i], 0.2, i), fixtures[i]));
    }
    EXPECT_LT(stats::mean(high), stats::mean(low));
    EXPECT_GE(stats::mean(high), 0.55);
    EXPECT_LE(stats::mean(high), 0.75);
}

TEST(Manifest, LoadsGoldenWithAliases) {
    const auto manifest = load_paraphrase_manifest(kData / "para" / "sample.para.json");
    EXPECT_EQ(manifest.generator, "sd-img2img");
    EXPECT_DOUBLE_EQ(manifest.strength, 0.1);
    EXPECT_DOUBLE_EQ(manifest.guidance_scale, 7.5);
    ASSERT_EQ(manifest.paths.size(), 3u);
    for (const auto& p : manifest.paths) EXPECT_TRUE(fs::exists(p)) << p;
    EXPECT_EQ(manifest.seeds, (std::vector<std::uint64_t>{11, 12, 13}));
}

TEST(Manifest, SaveLoadRoundTrip) {
    TempDir dir("peccavi_manifest");
    ParaphraseManifest m;
    m.generator = "surrogate";
    m.strength = 0.15;
    m.guidance_scale = 3.0;
    m.paths = {dir.path / "a.png", dir.path / "sub" / "b.png"};
    m.seeds = {1, 2};
    save_paraphrase_manifest(m, dir.path / "x.para.json");
    const auto back = load_paraphrase_manifest(dir.path / "x.para.json");
    EXPECT_EQ(back.generator, m.generator);
    EXPECT_EQ(back.strength, m.strength);
    EXPECT_EQ(back.guidance_scale, m.guidance_scale);
    EXPECT_EQ(back.seeds, m.seeds);
    ASSERT_EQ(back.paths.size(), 2u);
    EXPECT_EQ(fs::weakly_canonical(back.paths[1]), fs::weakly_canonical(m.paths[1]));

    // A bare file name still resolves against the working directory.
    const auto cwd = fs::current_path();
    fs::current_path(dir.path);
    ParaphraseManifest local = m;
    local.paths = {fs::absolute("c.png")};
    save_paraphrase_manifest(local, "local.para.json");
    const auto reloaded = load_paraphrase_manifest("local.para.json");
    fs::current_path(cwd);
    EXPECT_EQ(reloaded.paths.at(0).filename(), "c.png");
}

TEST(Manifest, MalformedRejected) {
    TempDir dir("peccavi_manifest_bad");
    std::ofstream(dir.path / "bad.para.json") << R"({"generator": "x", "strength": 0.1, "paths": []})";
    EXPECT_THROW(load_paraphrase_manifest(dir.path / "bad.para.json"), FormatError);
    std::ofstream(dir.path / "worse.para.json") << "{";
    EXPECT_THROW(load_paraphrase_manifest(dir.path / "worse.para.json"), FormatError);
    EXPECT_THROW(load_paraphrase_manifest(dir.path / "missing.para.json"), IoError);
}

TEST(Manifest, ExternalParaphraseAttack) {
    const ImageBuffer image = read_image(kData / "sample.png");
    const AttackSpec spec{ExternalParaphrase{kData / "para" / "sample.para.json", 1}, 0};
    const ImageBuffer variant = apply_attack(image, spec);
    EXPECT_TRUE(variant.same_shape(image));
    EXPECT_EQ(variant, read_image(kData / "para" / "sample_v1.png"));
    EXPECT_THROW(apply_attack(image, {ExternalParaphrase{kData / "para" / "sample.para.json", 3}, 0}), FormatError);
}

TEST(Pipeline, NmpSetInvariants) {
    PipelineConfig config;
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
        const ImageBuffer image = synthetic_scene(seed);
        const NmpSet set = find_nmps(image, calibrated_key(), config);
        ASSERT_GE(set.nmps.size(), 2u);
        EXPECT_LE(static_cast<int>(set.nmps.size()), config.max_nmps + 1);
        EXPECT_EQ(std::count_if(set.nmps.begin(), set.nmps.end(), [](const Nmp& n) { return n.is_random_patch; }),
                  1);
        for (std::size_t i = 0; i < set.nmps.size(); ++i) {
            for (std::size_t j = i + 1; j < set.nmps.size(); ++j) {
                EXPECT_FALSE(overlaps(set.nmps[i].region, set.nmps[j].region));
            }
        }
        config.random_patch = false;
        EXPECT_FALSE(find_nmps(image, calibrated_key(), config).has_random_patch());
        config.random_patch = true;
    }
}

TEST(Pipeline, GoldenInterchangeDrivesEmbedding) {
    const fs::path image_path = kData / "sample.png";
    const ImageBuffer image = read_image(image_path);
    const auto inputs = discover_inputs(image_path, image, true, kData / "para");
    ASSERT_TRUE(inputs.saliency);
    EXPECT_EQ(inputs.saliency->provenance, "xrai");
    ASSERT_EQ(inputs.variants.size(), 3u);
    ASSERT_EQ(inputs.variant_saliency.size(), 3u);
    for (const auto& m : inputs.variant_saliency) EXPECT_TRUE(m && m->external);

    const auto outcome = watermark_image(image, calibrated_key(), PipelineConfig{}, inputs);
    EXPECT_EQ(outcome.nmps.variant_count, 3);
    // The golden maps share one blob around (136, 112), seen in every variant.
    const auto& top = outcome.nmps.nmps.front();
    EXPECT_EQ(top.n, 3);
    EXPECT_TRUE(top.region.rect().contains({136, 112}));
    EXPECT_GE(detect(quantize_8bit(outcome.output), calibrated_key()).wdp, 0.95);
}

TEST(Bench, AggregatesDeterminismAndIsolation) {
    TempDir dir("peccavi_bench");
    const auto fixtures = synthetic_corpus(1, 3);
    for (std::size_t i = 0; i < fixtures.size(); ++i) write_png(fixtures[i], dir.path / ("f" + std::to_string(i) + ".png"));
    std::ofstream(dir.path / "broken.png") << "not an image";

    const std::vector<AttackSpec> attacks{{Jpeg{50}, 7}, {SurrogateParaphrase{0.1}, 7}};
    const auto report = run_benchmark(dir.path, calibrated_key(), attacks);
    ASSERT_EQ(report.rows.size(), 4u);
    EXPECT_EQ(report.succeeded, 3);
    EXPECT_EQ(report.rows[0].name, "broken.png");
    EXPECT_FALSE(report.rows[0].ok);
    EXPECT_FALSE(report.rows[0].error.empty());

    std::vector<double> psnrs, pre, post0;
    for (const auto& row : report.rows) {
        if (!row.ok) continue;
        psnrs.push_back(row.psnr);
        pre.push_back(row.wdp_pre);
        post0.push_back(row.wdp_post[0]);
        EXPECT_EQ(row.wdp_post.size(), attacks.size());
    }
    EXPECT_NEAR(report.mean_psnr, stats::mean(psnrs), 1e-9);
    EXPECT_NEAR(report.mean_wdp_pre, stats::mean(pre), 1e-9);
    EXPECT_NEAR(report.mean_wdp_post[0], stats::mean(post0), 1e-9);

    const auto again = run_benchmark(dir.path, calibrated_key(), attacks);
    EXPECT_EQ(report_to_csv(again), report_to_csv(report));
    EXPECT_EQ(report_to_json(again, {}).dump(), report_to_json(report, {}).dump());

    const std::string csv = report_to_csv(report);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "image,ok,nmps,psnr,ssim,gamma,wdp_pre,wdp_jpeg_q50,wdp_paraphrase_s0.1,error");
}

TEST(Bench, NeedsCalibrationAndImages) {
    EXPECT_THROW(run_benchmark(std::vector<NamedImage>{}, calibrated_key(), {}), ConfigError);
    EXPECT_THROW(run_benchmark({NamedImage{"a", synthetic_scene(1, 64, 64), {}}}, WatermarkKey{}, {}),
                 CalibrationError);
    EXPECT_THROW(run_benchmark(fs::path("/nonexistent/corpus"), calibrated_key(), {}), IoError);
}

TEST(Successive, BaseCaseAndStability) {
    const auto& key = calibrated_key();
    const auto fixtures = synthetic_corpus(1, 4);
    double first = 0.0, fifth = 0.0;
    for (const auto& image : fixtures) {
        const ImageBuffer marked = quantize_8bit(watermark_image(image, key, PipelineConfig{}).output);
        const auto one = successive_paraphrase_curve(marked, key, 1, 0.1, 11);
        ASSERT_EQ(one.size(), 1u);
        EXPECT_EQ(one[0], detect(apply_attack(marked, {SurrogateParaphrase{0.1}, derive_seed(11, 0)}), key).wdp);

        const auto curve = successive_paraphrase_curve(marked, key, 5, 0.1, 11);
        for (int r = 0; r < 3; ++r) EXPECT_GE(curve[r], 0.5);
        first += curve.front() / fixtures.size();
        fifth += curve.back() / fixtures.size();
    }
    EXPECT_LE(fifth, first + 0.05);
    EXPECT_THROW(successive_paraphrase_curve(fixtures[0], key, 0, 0.1), ConfigError);
}
