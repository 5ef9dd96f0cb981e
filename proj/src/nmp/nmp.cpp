#include "peccavi/nmp.hpp"

#include "peccavi/error.hpp"
#include "peccavi/rng.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <numeric>

namespace peccavi {

namespace {

constexpr std::uint64_t kRotationTag = 0x6368616e6e656c73ULL;  // "channels"
constexpr int kRandomPatchDraws = 1000;

}  // namespace

Channel NmpSet::next_channel() const noexcept {
    const auto slot = (nmps.size() + static_cast<std::size_t>(rotation_offset)) % kChannelCount;
    return static_cast<Channel>(channel_order[slot]);
}

bool NmpSet::has_random_patch() const noexcept {
    return std::any_of(nmps.begin(), nmps.end(), [](const Nmp& n) { return n.is_random_patch; });
}

std::array<int, kChannelCount> channel_rotation(std::uint64_t seed) {
    std::array<int, kChannelCount> order{};
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, kRotationTag));
    for (int i = kChannelCount - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }
    return order;
}

ParaphraseSet make_paraphrase_set(ImageBuffer original, std::vector<ImageBuffer> variants,
                                  const RegionFinder& find_regions) {
    ParaphraseSet pset;
    pset.original = std::move(original);
    for (auto& v : variants) {
        if (v.channels() != pset.original.channels()) {
            throw DimensionError("paraphrase variant channel count differs from the original");
        }
        pset.variants.push_back(resize_image(v, pset.original.width(), pset.original.height()));
    }
    for (const auto& v : pset.variants) pset.variant_regions.push_back(find_regions(v));
    return pset;
}

NmpSet compute_nmps(const ParaphraseSet& pset, const std::vector<Region>& original_regions,
                    const NmpConfig& config) {
    const int k = pset.variant_count();
    if (k < 1 || pset.original.empty()) throw ConfigError("paraphrase set needs an original and >= 1 variant");
    if (static_cast<int>(pset.variant_regions.size()) != k) {
        throw ConfigError("paraphrase set has regions for a different number of variants");
    }
    if (config.max_nmps < 1) throw ConfigError("max_nmps must be >= 1");

    const int width = pset.original.width();
    const int height = pset.original.height();

    NmpSet set;
    set.width = width;
    set.height = height;
    set.cell_size = config.cell_size;
    set.grid_cols = (width + config.cell_size - 1) / config.cell_size;
    set.grid_rows = (height + config.cell_size - 1) / config.cell_size;
    set.variant_count = k;
    set.seed = config.seed;
    set.rotation_offset = config.rotation_offset;
    set.channel_order = channel_rotation(config.seed);

    struct Candidate {
        Region region;
        int n;
    };
    std::vector<Candidate> matched;
    for (const auto& region : original_regions) {
        int n = 0;
        for (const auto& regions : pset.variant_regions) {
            const bool hit = std::any_of(regions.begin(), regions.end(),
                                         [&](const Region& r) { return iou(region, r) >= config.iou_match; });
            n += hit ? 1 : 0;
        }
        if (n >= 1) matched.push_back({region, n});
    }

    std::vector<Region> boxes;
    boxes.reserve(matched.size());
    for (const auto& m : matched) boxes.push_back(m.region);
    const auto survivors = nms(boxes, config.nms_threshold);

    std::vector<Candidate> ranked;
    for (const auto& s : survivors) {
        const auto it = std::find_if(matched.begin(), matched.end(), [&](const Candidate& c) { return c.region == s; });
        ranked.push_back(*it);
    }
    // Most stable first; survivors are already in score order.
    std::stable_sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) { return a.n > b.n; });

    auto append = [&](const Region& box, int n) {
        Nmp nmp;
        nmp.region = box;
        nmp.n = n;
        nmp.stability = 1.0 - static_cast<double>(n) / k;
        nmp.strength = strength_for_count(n);
        nmp.channel = set.next_channel();
        set.nmps.push_back(nmp);
    };

    for (const auto& c : ranked) {
        if (static_cast<int>(set.nmps.size()) >= config.max_nmps) break;
        const Region box = fit_to_patch_grid(c.region, width, height, config.cell_size, config.footprints);
        const bool clash = std::any_of(set.nmps.begin(), set.nmps.end(),
                                       [&](const Nmp& kept) { return overlaps(kept.region, box); });
        if (!clash) append(box, c.n);
    }

    if (set.nmps.empty()) {
        const Region box = fit_to_patch_grid(default_box(width, height), width, height, config.cell_size,
                                       config.footprints);
        append(box, 1);
    }
    return set;
}

NmpSet add_random_patch(NmpSet set, std::uint64_t seed) {
    if (set.nmps.empty()) throw ConfigError("random patching needs at least one NMP");
    const auto smallest = std::min_element(set.nmps.begin(), set.nmps.end(), [](const Nmp& a, const Nmp& b) {
        return a.region.area() < b.region.area();
    });
    const int w = smallest->region.w;
    const int h = smallest->region.h;
    const int cell = std::max(1, set.cell_size);
    if (w > set.width || h > set.height) {
        set.warnings.emplace_back("random patch larger than the image");
        return set;
    }
    const auto cols = static_cast<std::uint64_t>((set.width - w) / cell + 1);
    const auto rows = static_cast<std::uint64_t>((set.height - h) / cell + 1);

    Rng rng(seed);
    for (int draw = 0; draw < kRandomPatchDraws; ++draw) {
        const Region box{static_cast<int>(rng.below(cols)) * cell, static_cast<int>(rng.below(rows)) * cell, w, h,
                         0.0};
        const bool clash = std::any_of(set.nmps.begin(), set.nmps.end(),
                                       [&](const Nmp& n) { return overlaps(n.region, box); });
        if (clash) continue;
        Nmp patch;
        patch.region = box;
        patch.n = 1;
        patch.stability = set.variant_count > 0 ? 1.0 - 1.0 / set.variant_count : 0.0;
        patch.strength = 1.0;
        patch.channel = set.next_channel();
        patch.is_random_patch = true;
        set.nmps.push_back(patch);
        return set;
    }
    spdlog::warn("random patch: no free placement after {} draws", kRandomPatchDraws);
    set.warnings.emplace_back(fmt::format("random patch: no free placement after {} draws", kRandomPatchDraws));
    return set;
}

void save_nmp_set(const NmpSet& set, const std::filesystem::path& path) {
    nlohmann::json nmps = nlohmann::json::array();
    for (const auto& n : set.nmps) {
        nmps.push_back({{"x", n.region.x},
                        {"y", n.region.y},
                        {"w", n.region.w},
                        {"h", n.region.h},
                        {"score", n.region.score},
                        {"n", n.n},
                        {"stability", n.stability},
                        {"strength", n.strength},
                        {"channel", static_cast<int>(n.channel)},
                        {"is_random", n.is_random_patch}});
    }
    const nlohmann::json doc = {{"version", 1},
                                {"width", set.width},
                                {"height", set.height},
                                {"grid_size", {set.grid_cols, set.grid_rows}},
                                {"cell_size", set.cell_size},
                                {"variant_count", set.variant_count},
                                {"seed", set.seed},
                                {"rotation_offset", set.rotation_offset},
                                {"channel_order", set.channel_order},
                                {"warnings", set.warnings},
                                {"nmps", nmps}};
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("could not write {}", path.string()));
    out << doc.dump(2) << '\n';
}

NmpSet load_nmp_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("could not open {}", path.string()));
    try {
        const auto doc = nlohmann::json::parse(in);
        if (doc.at("version").get<int>() != 1) throw FormatError("unsupported NMP file version");
        NmpSet set;
        set.width = doc.at("width").get<int>();
        set.height = doc.at("height").get<int>();
        set.grid_cols = doc.at("grid_size").at(0).get<int>();
        set.grid_rows = doc.at("grid_size").at(1).get<int>();
        set.cell_size = doc.at("cell_size").get<int>();
        set.variant_count = doc.value("variant_count", 0);
        set.seed = doc.at("seed").get<std::uint64_t>();
        set.rotation_offset = doc.value("rotation_offset", 0);
        set.channel_order = doc.value("channel_order", std::array<int, kChannelCount>{0, 1, 2, 3});
        set.warnings = doc.value("warnings", std::vector<std::string>{});
        for (const auto& item : doc.at("nmps")) {
            Nmp n;
            n.region = {item.at("x").get<int>(), item.at("y").get<int>(), item.at("w").get<int>(),
                        item.at("h").get<int>(), item.value("score", 0.0)};
            n.n = item.at("n").get<int>();
            n.stability = item.at("stability").get<double>();
            n.strength = item.at("strength").get<double>();
            n.channel = channel_from_index(item.at("channel").get<int>());
            n.is_random_patch = item.at("is_random").get<bool>();
            set.nmps.push_back(n);
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

}  // namespace peccavi
