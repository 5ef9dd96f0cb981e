#include "peccavi/quality.hpp"

#include "peccavi/error.hpp"

#include <opencv2/imgproc.hpp>

#include <cmath>
#include <limits>

namespace peccavi {

namespace {

constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

// Mean SSIM over the valid region of one channel.
double ssim_plane(const Plane& a, const Plane& b, int window, double sigma) {
    const double c1 = (kK1 * 1.0) * (kK1 * 1.0);
    const double c2 = (kK2 * 1.0) * (kK2 * 1.0);

    const cv::Mat1d kernel_1d = cv::getGaussianKernel(window, sigma, CV_64F);
    const cv::Mat1d kernel = kernel_1d * kernel_1d.t();
    auto filter = [&](const Plane& src) {
        Plane dst;
        cv::filter2D(src, dst, CV_64F, kernel, cv::Point(-1, -1), 0, cv::BORDER_REFLECT_101);
        const int half = window / 2;
        return Plane(dst(cv::Rect(half, half, src.cols - 2 * half, src.rows - 2 * half)));
    };

    const Plane mu_a = filter(a);
    const Plane mu_b = filter(b);
    const Plane var_a = filter(a.mul(a)) - mu_a.mul(mu_a);
    const Plane var_b = filter(b.mul(b)) - mu_b.mul(mu_b);
    const Plane cov = filter(a.mul(b)) - mu_a.mul(mu_b);

    const Plane num = (2.0 * mu_a.mul(mu_b) + c1).mul(2.0 * cov + c2);
    const Plane den = (mu_a.mul(mu_a) + mu_b.mul(mu_b) + c1).mul(var_a + var_b + c2);
    Plane map;
    cv::divide(num, den, map);
    return cv::mean(map)[0];
}

void check_pair(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.empty() || b.empty()) throw DimensionError("quality metrics need non-empty images");
    if (!a.same_shape(b)) throw DimensionError("quality metrics need images of identical shape");
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    check_pair(a, b);
    const auto da = a.data();
    const auto db = b.data();
    double sse = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = da[i] - db[i];
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / (sse / static_cast<double>(da.size())));
}

SsimResult ssim_detailed(const ImageBuffer& a, const ImageBuffer& b) {
    check_pair(a, b);
    SsimResult result;
    const int smallest = std::min(a.width(), a.height());
    if (smallest < kWindow) {
        result.reduced_window = true;
        result.window = smallest % 2 == 1 ? smallest : smallest - 1;
        if (result.window < 1) result.window = 1;
    }
    const double sigma = kSigma * result.window / kWindow;

    double total = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        total += ssim_plane(a.plane(c), b.plane(c), result.window, sigma);
    }
    result.value = total / a.channels();
    return result;
}

}  // namespace peccavi
