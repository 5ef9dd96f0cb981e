#include "peccavi/error.hpp"
#include "peccavi/watermark.hpp"

#include <fmt/format.h>

namespace peccavi {

ImageBuffer embed(const ImageBuffer& image, const NmpSet& nmps, const WatermarkKey& key) {
    if (image.empty()) throw DimensionError("cannot embed into an empty image");
    if (nmps.nmps.empty()) throw ConfigError("cannot embed without at least one NMP");
    const int size = key.transform_size;
    const cv::Rect bounds(0, 0, image.width(), image.height());

    ImageBuffer marked = image;
    for (const auto& nmp : nmps.nmps) {
        const cv::Rect rect = nmp.region.rect();
        if (rect.empty() || (rect & bounds) != rect) {
            throw DimensionError(fmt::format("NMP ({},{},{},{}) lies outside the {}x{} image", rect.x, rect.y,
                                             rect.width, rect.height, image.width(), image.height()));
        }
        const Channel channel = effective_channel(marked, nmp.channel);
        const RingPattern pattern = make_ring_pattern(key, make_ring_spec(nmp.strength, size));

        Plane plane = extract_channel(marked, channel);
        const Plane patch = resample(crop(plane, rect), size, size);
        Spectrum spectrum = forward_spectrum(patch);
        for (const auto& ring : pattern.rings) {
            for (std::size_t i = 0; i < ring.indices.size(); ++i) {
                spectrum.coeffs()[ring.indices[i]] = key.ring_value_scale * ring.values[i];
            }
        }
        symmetrize(spectrum);
        const Plane delta = inverse_spectrum(spectrum) - patch;
        Plane window = plane(rect);
        window += resample(delta, rect.width, rect.height);
        marked = insert_channel(marked, channel, plane);
    }
    return marked;
}

}  // namespace peccavi
