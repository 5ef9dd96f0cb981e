#include "peccavi/synthetic.hpp"

#include "peccavi/io.hpp"
#include "peccavi/rng.hpp"

#include <opencv2/imgproc.hpp>

#include <array>
#include <cmath>
#include <numbers>

namespace peccavi {

namespace {

Plane smooth_noise(int width, int height, double sigma, Rng& rng) {
    Plane field(height, width);
    for (int y = 0; y < height; ++y) {
        auto* row = field.ptr<double>(y);
        for (int x = 0; x < width; ++x) row[x] = rng.normal();
    }
    cv::GaussianBlur(field, field, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT_101);
    cv::Scalar mean, stddev;
    cv::meanStdDev(field, mean, stddev);
    return (field - mean[0]) / std::max(stddev[0], 1e-12);
}

std::array<double, 3> random_colour(Rng& rng) { return {rng.uniform(), rng.uniform(), rng.uniform()}; }

}  // namespace

ImageBuffer synthetic_scene(std::uint64_t seed, int width, int height) {
    Rng rng(derive_seed(seed, 0x7363656e65ULL));

    // Background: two-colour gradient with low-frequency shading and grain.
    const auto c0 = random_colour(rng);
    const auto c1 = random_colour(rng);
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Plane shading = smooth_noise(width, height, 24.0, rng);
    const Plane grain = smooth_noise(width, height, 1.5, rng);
    std::array<Plane, 3> rgb;
    for (auto& p : rgb) p.create(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = 0.5 + ((x - width / 2.0) * std::cos(angle) + (y - height / 2.0) * std::sin(angle)) /
                                       (1.5 * std::max(width, height));
            for (int c = 0; c < 3; ++c) {
                rgb[c](y, x) = 0.15 + 0.7 * (c0[c] * (1.0 - u) + c1[c] * u) + 0.08 * shading(y, x) +
                               0.03 * grain(y, x);
            }
        }
    }

    // Foreground objects: ellipses and rotated boxes with their own texture.
    const int objects = 2 + static_cast<int>(rng.below(3));
    const int side = std::min(width, height);
    for (int i = 0; i < objects; ++i) {
        cv::Mat1b mask = cv::Mat1b::zeros(height, width);
        const cv::Point2f centre(static_cast<float>(rng.uniform(0.15, 0.85) * width),
                                 static_cast<float>(rng.uniform(0.15, 0.85) * height));
        const cv::Size2f axes(static_cast<float>(rng.uniform(0.06, 0.18) * side),
                              static_cast<float>(rng.uniform(0.06, 0.18) * side));
        const float rotation = static_cast<float>(rng.uniform(0.0, 180.0));
        if (rng.below(2) == 0) {
            cv::ellipse(mask, cv::RotatedRect(centre, axes * 2.0f, rotation), cv::Scalar(255), cv::FILLED,
                        cv::LINE_AA);
        } else {
            cv::Point2f corners[4];
            cv::RotatedRect(centre, axes * 2.0f, rotation).points(corners);
            std::vector<cv::Point> poly;
            for (const auto& p : corners) poly.emplace_back(cvRound(p.x), cvRound(p.y));
            cv::fillConvexPoly(mask, poly, cv::Scalar(255), cv::LINE_AA);
        }
        Plane alpha;
        mask.convertTo(alpha, CV_64F, 1.0 / 255.0);
        cv::GaussianBlur(alpha, alpha, cv::Size(0, 0), 1.0);

        const auto colour = random_colour(rng);
        const double freq = rng.uniform(0.03, 0.15);
        const double theta = rng.uniform(0.0, std::numbers::pi);
        const double stripe_depth = rng.uniform(0.0, 0.12);
        const Plane texture = smooth_noise(width, height, rng.uniform(1.0, 4.0), rng);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double a = alpha(y, x);
                if (a <= 0.0) continue;
                const double stripes =
                    std::sin(2.0 * std::numbers::pi * freq * (x * std::cos(theta) + y * std::sin(theta)));
                for (int c = 0; c < 3; ++c) {
                    const double fg = 0.1 + 0.8 * colour[c] + stripe_depth * stripes + 0.05 * texture(y, x);
                    rgb[c](y, x) = (1.0 - a) * rgb[c](y, x) + a * fg;
                }
            }
        }
    }

    Plane sensor = smooth_noise(width, height, 0.5, rng);
    for (auto& p : rgb) p += 0.01 * sensor;
    return quantize_8bit(ImageBuffer::from_planes(rgb));
}

std::vector<ImageBuffer> synthetic_corpus(std::uint64_t seed, int count, int width, int height) {
    std::vector<ImageBuffer> corpus;
    corpus.reserve(count);
    for (int i = 0; i < count; ++i) corpus.push_back(synthetic_scene(derive_seed(seed, i), width, height));
    return corpus;
}

}  // namespace peccavi
