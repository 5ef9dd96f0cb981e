#include "peccavi/image.hpp"

#include "peccavi/error.hpp"

#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace peccavi {

namespace {

void check_shape(int width, int height, int channels) {
    if (width <= 0 || height <= 0) {
        throw DimensionError(fmt::format("image must be non-empty, got {}x{}", width, height));
    }
    if (channels != 1 && channels != 3) {
        throw DimensionError(fmt::format("image must have 1 or 3 channels, got {}", channels));
    }
}

constexpr double kKr = 0.299;
constexpr double kKg = 0.587;
constexpr double kKb = 0.114;
constexpr double kCbScale = 0.5 / (1.0 - kKb);
constexpr double kCrScale = 0.5 / (1.0 - kKr);

Plane highpass_of(const Plane& y) {
    Plane blurred;
    cv::blur(y, blurred, cv::Size(5, 5), cv::Point(-1, -1), cv::BORDER_REFLECT_101);
    Plane out = 0.5 + 0.5 * (y - blurred);
    return out;
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    check_shape(width, height, channels);
    if (!std::isfinite(fill)) throw Error("image fill value must be finite");
    data_.assign(static_cast<std::size_t>(width) * height * channels, std::clamp(fill, 0.0, 1.0));
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_shape(width, height, channels);
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw DimensionError(fmt::format("image data holds {} samples, expected {}x{}x{}", data_.size(), width,
                                         height, channels));
    }
    for (double& v : data_) {
        if (!std::isfinite(v)) throw Error("image samples must be finite");
        v = std::clamp(v, 0.0, 1.0);
    }
}

ImageBuffer ImageBuffer::from_mat(const cv::Mat& mat) {
    if (mat.empty()) throw DimensionError("cannot build an image from an empty matrix");
    if (mat.depth() != CV_64F) throw DimensionError("expected a 64-bit floating point matrix");
    cv::Mat contiguous = mat.isContinuous() ? mat : mat.clone();
    const auto* begin = contiguous.ptr<double>();
    std::vector<double> data(begin, begin + contiguous.total() * contiguous.channels());
    return ImageBuffer(mat.cols, mat.rows, mat.channels(), std::move(data));
}

ImageBuffer ImageBuffer::from_planes(std::span<const Plane> planes) {
    if (planes.size() != 1 && planes.size() != 3) {
        throw DimensionError(fmt::format("expected 1 or 3 planes, got {}", planes.size()));
    }
    for (const auto& p : planes) {
        if (p.size() != planes[0].size()) throw DimensionError("planes differ in size");
    }
    cv::Mat merged;
    cv::merge(std::vector<cv::Mat>(planes.begin(), planes.end()), merged);
    return from_mat(merged);
}

cv::Mat ImageBuffer::to_mat() const {
    cv::Mat mat(height_, width_, CV_MAKETYPE(CV_64F, channels_));
    std::copy(data_.begin(), data_.end(), mat.ptr<double>());
    return mat;
}

Plane ImageBuffer::plane(int channel) const {
    if (channel < 0 || channel >= channels_) {
        throw ChannelError(fmt::format("plane {} out of range for {}-channel image", channel, channels_));
    }
    Plane out(height_, width_);
    for (int y = 0; y < height_; ++y) {
        auto* row = out.ptr<double>(y);
        for (int x = 0; x < width_; ++x) row[x] = at(x, y, channel);
    }
    return out;
}

std::vector<Plane> ImageBuffer::planes() const {
    std::vector<Plane> out;
    out.reserve(channels_);
    for (int c = 0; c < channels_; ++c) out.push_back(plane(c));
    return out;
}

const char* channel_name(Channel channel) noexcept {
    switch (channel) {
        case Channel::Y: return "Y";
        case Channel::Cb: return "Cb";
        case Channel::Cr: return "Cr";
        case Channel::YHighpass: return "Y-highpass";
    }
    return "?";
}

Channel channel_from_index(int index) {
    if (index < 0 || index >= kChannelCount) throw ChannelError(fmt::format("invalid channel id {}", index));
    return static_cast<Channel>(index);
}

bool channel_available(const ImageBuffer& image, Channel channel) noexcept {
    return image.channels() == 3 || channel == Channel::Y || channel == Channel::YHighpass;
}

Channel effective_channel(const ImageBuffer& image, Channel channel) noexcept {
    if (image.channels() == 3) return channel;
    if (channel == Channel::Cb) return Channel::Y;
    if (channel == Channel::Cr) return Channel::YHighpass;
    return channel;
}

std::vector<Plane> rgb_to_ycbcr(std::span<const Plane> rgb) {
    if (rgb.size() != 3) throw DimensionError("RGB conversion needs three planes");
    Plane y = kKr * rgb[0] + kKg * rgb[1] + kKb * rgb[2];
    Plane cb = 0.5 + kCbScale * (rgb[2] - y);
    Plane cr = 0.5 + kCrScale * (rgb[0] - y);
    return {y, cb, cr};
}

std::vector<Plane> ycbcr_to_rgb(std::span<const Plane> ycbcr) {
    if (ycbcr.size() != 3) throw DimensionError("YCbCr conversion needs three planes");
    const Plane& y = ycbcr[0];
    Plane r = y + (ycbcr[2] - 0.5) / kCrScale;
    Plane b = y + (ycbcr[1] - 0.5) / kCbScale;
    Plane g = (y - kKr * r - kKb * b) / kKg;
    return {r, g, b};
}

Plane luma(const ImageBuffer& image) {
    if (image.channels() == 1) return image.plane(0);
    const auto rgb = image.planes();
    return rgb_to_ycbcr(rgb)[0];
}

Plane extract_channel(const ImageBuffer& image, Channel channel) {
    if (image.empty()) throw DimensionError("cannot extract a channel from an empty image");
    if (static_cast<int>(channel) < 0 || static_cast<int>(channel) >= kChannelCount) {
        throw ChannelError(fmt::format("invalid channel id {}", static_cast<int>(channel)));
    }
    if (!channel_available(image, channel)) {
        throw ChannelError(fmt::format("channel {} unavailable on a gray image", channel_name(channel)));
    }
    if (image.channels() == 1) {
        Plane y = image.plane(0);
        return channel == Channel::Y ? y : highpass_of(y);
    }
    const auto ycc = rgb_to_ycbcr(image.planes());
    switch (channel) {
        case Channel::Y: return ycc[0];
        case Channel::Cb: return ycc[1];
        case Channel::Cr: return ycc[2];
        case Channel::YHighpass: return highpass_of(ycc[0]);
    }
    throw ChannelError("unreachable channel");
}

ImageBuffer insert_channel(const ImageBuffer& image, Channel channel, const Plane& plane) {
    if (plane.rows != image.height() || plane.cols != image.width()) {
        throw DimensionError(fmt::format("plane {}x{} does not match image {}x{}", plane.cols, plane.rows,
                                         image.width(), image.height()));
    }
    if (!channel_available(image, channel)) {
        throw ChannelError(fmt::format("channel {} unavailable on a gray image", channel_name(channel)));
    }
    if (image.channels() == 1) {
        Plane y = image.plane(0);
        if (channel == Channel::Y) {
            y = plane.clone();
        } else {
            y += 2.0 * (plane - highpass_of(y));
        }
        return ImageBuffer::from_planes(std::span<const Plane>(&y, 1));
    }
    auto ycc = rgb_to_ycbcr(image.planes());
    switch (channel) {
        case Channel::Y: ycc[0] = plane.clone(); break;
        case Channel::Cb: ycc[1] = plane.clone(); break;
        case Channel::Cr: ycc[2] = plane.clone(); break;
        case Channel::YHighpass: ycc[0] += 2.0 * (plane - highpass_of(ycc[0])); break;
    }
    const auto rgb = ycbcr_to_rgb(ycc);
    return ImageBuffer::from_planes(rgb);
}

Plane resample(const Plane& plane, int width, int height) {
    if (width <= 0 || height <= 0 || plane.empty()) throw DimensionError("resample needs non-empty sizes");
    if (plane.cols == width && plane.rows == height) return plane.clone();
    Plane out;
    cv::resize(plane, out, cv::Size(width, height), 0, 0, cv::INTER_LINEAR);
    return out;
}

ImageBuffer resize_image(const ImageBuffer& image, int width, int height) {
    if (image.width() == width && image.height() == height) return image;
    std::vector<Plane> planes = image.planes();
    for (auto& p : planes) p = resample(p, width, height);
    return ImageBuffer::from_planes(planes);
}

Plane crop(const Plane& plane, const cv::Rect& rect) {
    if ((rect & cv::Rect(0, 0, plane.cols, plane.rows)) != rect || rect.empty()) {
        throw DimensionError(fmt::format("crop window ({},{},{},{}) outside {}x{} plane", rect.x, rect.y,
                                         rect.width, rect.height, plane.cols, plane.rows));
    }
    return plane(rect).clone();
}

ImageBuffer blend(const ImageBuffer& from, const ImageBuffer& to, double t) {
    if (!from.same_shape(to)) throw DimensionError("blend needs images of identical shape");
    std::vector<double> out(from.size());
    const auto a = from.data();
    const auto b = to.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::lerp(a[i], b[i], t);
    return ImageBuffer(from.width(), from.height(), from.channels(), std::move(out));
}

}  // namespace peccavi
