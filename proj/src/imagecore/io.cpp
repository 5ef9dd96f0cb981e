#include "peccavi/io.hpp"

#include "peccavi/error.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace peccavi {

namespace {

ImageBuffer from_8bit(const cv::Mat& decoded) {
    cv::Mat rgb;
    if (decoded.channels() == 1) {
        rgb = decoded;
    } else if (decoded.channels() == 3) {
        cv::cvtColor(decoded, rgb, cv::COLOR_BGR2RGB);
    } else if (decoded.channels() == 4) {
        cv::cvtColor(decoded, rgb, cv::COLOR_BGRA2RGB);
    } else {
        throw FormatError(fmt::format("unsupported channel count {}", decoded.channels()));
    }
    const double full_scale = rgb.depth() == CV_16U ? 65535.0 : 255.0;
    cv::Mat as_double;
    rgb.reshape(1).convertTo(as_double, CV_64F);
    // Divide rather than multiply by the reciprocal so that decoded levels
    // equal quantize_8bit's output exactly.
    std::vector<double> samples(as_double.begin<double>(), as_double.end<double>());
    for (double& v : samples) v /= full_scale;
    return ImageBuffer(rgb.cols, rgb.rows, rgb.channels(), std::move(samples));
}

unsigned char to_level(double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

cv::Mat to_8bit_bgr(const ImageBuffer& image) {
    std::vector<unsigned char> levels(image.size());
    std::transform(image.data().begin(), image.data().end(), levels.begin(), to_level);
    cv::Mat as_u8(image.height(), image.width(), CV_8UC(image.channels()), levels.data());
    as_u8 = as_u8.clone();
    if (image.channels() == 3) cv::cvtColor(as_u8, as_u8, cv::COLOR_RGB2BGR);
    return as_u8;
}

}  // namespace

ImageBuffer read_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError(fmt::format("no such file: {}", path.string()));
    const cv::Mat decoded = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (decoded.empty()) throw IoError(fmt::format("could not decode image: {}", path.string()));
    return from_8bit(decoded);
}

void write_png(const ImageBuffer& image, const std::filesystem::path& path) {
    if (image.empty()) throw DimensionError("cannot write an empty image");
    if (!cv::imwrite(path.string(), to_8bit_bgr(image), {cv::IMWRITE_PNG_COMPRESSION, 6})) {
        throw IoError(fmt::format("could not write PNG: {}", path.string()));
    }
}

std::vector<unsigned char> encode_jpeg(const ImageBuffer& image, int quality) {
    if (quality < 1 || quality > 100) throw ConfigError(fmt::format("JPEG quality {} outside [1,100]", quality));
    std::vector<unsigned char> bytes;
    if (!cv::imencode(".jpg", to_8bit_bgr(image), bytes, {cv::IMWRITE_JPEG_QUALITY, quality})) {
        throw IoError("JPEG encoding failed");
    }
    return bytes;
}

ImageBuffer decode_image(const std::vector<unsigned char>& bytes) {
    const cv::Mat decoded = cv::imdecode(bytes, cv::IMREAD_UNCHANGED);
    if (decoded.empty()) throw IoError("could not decode image bytes");
    return from_8bit(decoded);
}

ImageBuffer quantize_8bit(const ImageBuffer& image) {
    std::vector<double> out(image.data().begin(), image.data().end());
    for (double& v : out) v = static_cast<double>(to_level(v)) / 255.0;
    return ImageBuffer(image.width(), image.height(), image.channels(), std::move(out));
}

}  // namespace peccavi
