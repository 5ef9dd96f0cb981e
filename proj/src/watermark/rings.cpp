#include "peccavi/error.hpp"
#include "peccavi/rng.hpp"
#include "peccavi/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace peccavi {

namespace {

constexpr std::uint64_t kRingTag = 0x72696e67ULL;  // "ring"

}  // namespace

double ring_spacing(double strength) noexcept { return 1.0 - 0.5 * strength; }

RingSpec make_ring_spec(double strength, int transform_size) {
    if (!(strength > 0.0 && strength <= 1.0)) {
        throw ConfigError(fmt::format("strength must lie in (0,1], got {}", strength));
    }
    if (transform_size < 8) throw ConfigError("transform size must be >= 8");
    RingSpec spec;
    spec.strength = strength;
    spec.spacing = ring_spacing(strength);
    spec.transform_size = transform_size;
    const double step = spec.spacing * kRadialUnit;
    const int count = static_cast<int>(std::floor((kMaxRingRadius - kRadialUnit) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) spec.radii.push_back(kRadialUnit + i * step);
    return spec;
}

std::vector<int> RingSpec::coefficient_radii() const {
    std::vector<int> out;
    const double nyquist = transform_size / 2.0;
    for (double r : radii) {
        const int k = static_cast<int>(std::lround(r * nyquist));
        if (k >= 1 && (out.empty() || out.back() != k)) out.push_back(k);
    }
    return out;
}

Spectrum RingPattern::as_spectrum() const {
    Spectrum out(size);
    for (const auto& ring : rings) {
        for (std::size_t i = 0; i < ring.indices.size(); ++i) out.coeffs()[ring.indices[i]] = ring.values[i];
    }
    return out;
}

std::size_t RingPattern::coefficient_count() const noexcept {
    std::size_t total = 0;
    for (const auto& ring : rings) total += ring.indices.size();
    return total;
}

RingPattern make_ring_pattern(const WatermarkKey& key, const RingSpec& spec) {
    const int size = spec.transform_size;
    RingPattern pattern;
    pattern.size = size;
    pattern.strength = spec.strength;

    const Spectrum layout(size);
    const int c0 = layout.center();
    for (int radius : spec.coefficient_radii()) {
        RingPattern::Ring ring;
        ring.radius = radius;
        Rng rng(derive_seed(key.seed, kRingTag ^ (static_cast<std::uint64_t>(radius) << 32)));

        std::vector<std::complex<double>> by_index(static_cast<std::size_t>(size) * size);
        for (int r = 0; r < size; ++r) {
            for (int c = 0; c < size; ++c) {
                const int du = r - c0;
                const int dv = c - c0;
                if (std::lround(std::hypot(du, dv)) != radius) continue;
                const auto [mr, mc] = layout.mirror(r, c);
                const int self = r * size + c;
                const int twin = mr * size + mc;
                if (twin < self) {
                    by_index[self] = std::conj(by_index[twin]);
                } else if (twin == self) {
                    by_index[self] = {rng.normal(), 0.0};
                } else {
                    const double re = rng.normal();
                    const double im = rng.normal();
                    by_index[self] = {re, im};
                }
                ring.indices.push_back(self);
            }
        }
        double energy = 0.0;
        for (int idx : ring.indices) energy += std::norm(by_index[idx]);
        const double rms = std::sqrt(energy / static_cast<double>(ring.indices.size()));
        for (int idx : ring.indices) ring.values.push_back(by_index[idx] / rms);
        pattern.rings.push_back(std::move(ring));
    }
    return pattern;
}

double pattern_correlation(const RingPattern& a, const RingPattern& b) {
    if (a.size != b.size) throw DimensionError("patterns differ in transform size");
    const Spectrum sa = a.as_spectrum();
    const Spectrum sb = b.as_spectrum();
    double num = 0.0, ea = 0.0, eb = 0.0;
    for (std::size_t i = 0; i < sa.coeffs().size(); ++i) {
        num += (sa.coeffs()[i] * std::conj(sb.coeffs()[i])).real();
        ea += std::norm(sa.coeffs()[i]);
        eb += std::norm(sb.coeffs()[i]);
    }
    return (ea > 0.0 && eb > 0.0) ? num / std::sqrt(ea * eb) : 0.0;
}

}  // namespace peccavi
