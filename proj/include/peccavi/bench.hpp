#pragma once

#include "peccavi/attacks.hpp"
#include "peccavi/pipeline.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace peccavi {

struct NamedImage {
    std::string name;
    ImageBuffer image;
    PipelineInputs inputs;
};

struct BenchRow {
    std::string name;
    bool ok = false;
    std::string error;
    int nmp_count = 0;
    double psnr = 0.0;
    double ssim = 0.0;
    double gamma = 0.0;
    double wdp_pre = 0.0;
    std::vector<double> wdp_post;  // one per attack
};

struct BenchReport {
    std::vector<std::string> attack_labels;
    std::vector<BenchRow> rows;
    int succeeded = 0;
    // Means over successful rows.
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    double mean_wdp_pre = 0.0;
    std::vector<double> mean_wdp_post;
};

/// Runs the embed/attack/detect loop over named images.
///
/// Images are processed in name order; a failure on one image is recorded
/// in its row and the run continues.
BenchReport run_benchmark(std::vector<NamedImage> images, const WatermarkKey& key,
                          const std::vector<AttackSpec>& attacks, const PipelineConfig& config = {});

/// Loads every `*.png` in `corpus_dir` (skipping `*.sal.png`), picking up
/// `<stem>.sal.png` maps when `use_external_saliency` is set and
/// `<stem>.para.json` manifests from `paraphrase_dir` when given.
BenchReport run_benchmark(const std::filesystem::path& corpus_dir, const WatermarkKey& key,
                          const std::vector<AttackSpec>& attacks, const PipelineConfig& config = {},
                          bool use_external_saliency = false, const std::filesystem::path& paraphrase_dir = {});

// Inputs found on disk for one image, following the interchange naming.
PipelineInputs discover_inputs(const std::filesystem::path& image_path, const ImageBuffer& image,
                               bool use_external_saliency, const std::filesystem::path& paraphrase_dir);

std::string report_to_csv(const BenchReport& report);
nlohmann::json report_to_json(const BenchReport& report, const PipelineConfig& config);

/// WDP after each of `rounds` cumulative surrogate paraphrases at strength s.
std::vector<double> successive_paraphrase_curve(const ImageBuffer& image, const WatermarkKey& key, int rounds,
                                                double strength, std::uint64_t seed = 11);

}  // namespace peccavi
