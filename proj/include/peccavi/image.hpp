#pragma once

#include <opencv2/core.hpp>

#include <span>
#include <vector>

namespace peccavi {

// Single-channel 64-bit plane. Values are unconstrained; only ImageBuffer
// enforces the [0,1] range.
using Plane = cv::Mat1d;

/// H x W x C image with samples in [0,1], stored row-major and interleaved.
///
/// Channels are 1 (gray) or 3 (RGB). Construction clamps every sample into
/// [0,1] and rejects non-finite values, so any ImageBuffer a caller can hold
/// satisfies the range invariant.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels, double fill = 0.0);
    ImageBuffer(int width, int height, int channels, std::vector<double> data);

    // Copies a CV_64FC1 or CV_64FC3 matrix (RGB order for 3 channels).
    static ImageBuffer from_mat(const cv::Mat& mat);
    // Builds a gray or RGB image from per-channel planes.
    static ImageBuffer from_planes(std::span<const Plane> planes);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t size() const noexcept { return data_.size(); }

    double at(int x, int y, int c = 0) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::span<const double> data() const noexcept { return data_; }

    // Deep copy as CV_64FC1 / CV_64FC3.
    cv::Mat to_mat() const;
    Plane plane(int channel) const;
    std::vector<Plane> planes() const;

    bool same_shape(const ImageBuffer& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

// Logical carriers available for embedding. Cb/Cr are offset into [0,1];
// YHighpass is 0.5 + 0.5 * (Y - box5(Y)).
enum class Channel : int { Y = 0, Cb = 1, Cr = 2, YHighpass = 3 };

inline constexpr int kChannelCount = 4;

const char* channel_name(Channel channel) noexcept;
Channel channel_from_index(int index);

// True when `channel` can be extracted from `image` (gray images only carry
// Y and YHighpass).
bool channel_available(const ImageBuffer& image, Channel channel) noexcept;

// Gray images have no chroma; Cb and Cr fold onto Y and YHighpass.
Channel effective_channel(const ImageBuffer& image, Channel channel) noexcept;

Plane extract_channel(const ImageBuffer& image, Channel channel);

// Replaces one logical channel and converts back to the image's native
// space; the result is clamped into [0,1].
ImageBuffer insert_channel(const ImageBuffer& image, Channel channel, const Plane& plane);

// Full-range BT.601 conversions on planes; chroma is offset by 0.5.
std::vector<Plane> rgb_to_ycbcr(std::span<const Plane> rgb);
std::vector<Plane> ycbcr_to_rgb(std::span<const Plane> ycbcr);

Plane luma(const ImageBuffer& image);

// Bilinear resampling to an exact size.
Plane resample(const Plane& plane, int width, int height);

// Bilinear resize of every channel.
ImageBuffer resize_image(const ImageBuffer& image, int width, int height);

// Copies a rectangular window.
Plane crop(const Plane& plane, const cv::Rect& rect);

// from + t (to - from), exact at t = 0 and t = 1.
ImageBuffer blend(const ImageBuffer& from, const ImageBuffer& to, double t);

}  // namespace peccavi
