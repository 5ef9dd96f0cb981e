#include "peccavi/error.hpp"
#include "peccavi/saliency.hpp"

#include <opencv2/imgproc.hpp>

#include <cmath>

namespace peccavi {

namespace {

constexpr int kThumbnail = 64;
constexpr double kBlurSigma = 2.5;

}  // namespace

SaliencyMap spectral_residual_saliency(const ImageBuffer& image) {
    if (image.empty()) throw DimensionError("saliency needs a non-empty image");

    SaliencyMap map;
    map.values = Plane::zeros(image.height(), image.width());

    const Plane y = luma(image);
    double y_lo = 0.0, y_hi = 0.0;
    cv::minMaxLoc(y, &y_lo, &y_hi);
    if (y_hi - y_lo < 1e-9) return map;

    Plane thumb;
    cv::resize(y, thumb, cv::Size(kThumbnail, kThumbnail), 0, 0, cv::INTER_AREA);

    cv::Mat2d freq;
    cv::dft(thumb, freq, cv::DFT_COMPLEX_OUTPUT);
    std::vector<cv::Mat1d> parts;
    cv::split(freq, parts);
    Plane magnitude, phase;
    cv::cartToPolar(parts[0], parts[1], magnitude, phase);

    // log(1 + |F|) keeps exact spectral zeros of flat synthetic content
    // from dominating the residual.
    Plane log_amplitude;
    cv::log(magnitude + 1.0, log_amplitude);
    Plane smoothed;
    cv::blur(log_amplitude, smoothed, cv::Size(3, 3), cv::Point(-1, -1), cv::BORDER_REPLICATE);
    Plane residual_amplitude;
    cv::exp(log_amplitude - smoothed, residual_amplitude);

    Plane re, im;
    cv::polarToCart(residual_amplitude, phase, re, im);
    cv::Mat2d residual_freq;
    cv::merge(std::vector<cv::Mat1d>{re, im}, residual_freq);
    cv::Mat2d spatial;
    cv::dft(residual_freq, spatial, cv::DFT_INVERSE | cv::DFT_SCALE | cv::DFT_COMPLEX_OUTPUT);
    cv::split(spatial, parts);
    Plane energy = parts[0].mul(parts[0]) + parts[1].mul(parts[1]);

    cv::GaussianBlur(energy, energy, cv::Size(0, 0), kBlurSigma, kBlurSigma, cv::BORDER_REPLICATE);

    Plane full;
    cv::resize(energy, full, image.width() == kThumbnail && image.height() == kThumbnail
                                 ? energy.size()
                                 : cv::Size(image.width(), image.height()),
               0, 0, cv::INTER_LINEAR);

    double lo = 0.0, hi = 0.0;
    cv::minMaxLoc(full, &lo, &hi);
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) return map;
    map.values = (full - lo) / (hi - lo);
    map.values = cv::min(cv::max(map.values, 0.0), 1.0);
    return map;
}

}  // namespace peccavi
