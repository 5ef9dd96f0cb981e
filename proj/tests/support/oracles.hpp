#pragma once

// Slow, direct reference implementations used only as test oracles.

#include "peccavi/image.hpp"
#include "peccavi/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

// O(N^4) DFT, unshifted: X(u,v) = sum x(r,c) exp(-2 pi i (u r + v c) / N).
inline std::vector<std::complex<double>> direct_dft(const peccavi::Plane& x) {
    const int n = x.rows;
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n) * n);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            std::complex<double> acc{0.0, 0.0};
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) {
                    const double angle = -2.0 * std::numbers::pi * (static_cast<double>(u * r + v * c)) / n;
                    acc += x(r, c) * std::complex<double>(std::cos(angle), std::sin(angle));
                }
            }
            out[static_cast<std::size_t>(u) * n + v] = acc;
        }
    }
    return out;
}

// SSIM computed window by window with explicit Gaussian weights.
inline double ssim_plane(const peccavi::Plane& a, const peccavi::Plane& b) {
    constexpr int window = 11;
    constexpr int half = window / 2;
    constexpr double sigma = 1.5;
    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    double weights[window][window];
    double total = 0.0;
    for (int i = 0; i < window; ++i) {
        for (int j = 0; j < window; ++j) {
            const double di = i - half;
            const double dj = j - half;
            weights[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
            total += weights[i][j];
        }
    }
    double sum = 0.0;
    int count = 0;
    for (int y = half; y < a.rows - half; ++y) {
        for (int x = half; x < a.cols - half; ++x) {
            double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
            for (int i = 0; i < window; ++i) {
                for (int j = 0; j < window; ++j) {
                    const double w = weights[i][j] / total;
                    const double va = a(y + i - half, x + j - half);
                    const double vb = b(y + i - half, x + j - half);
                    ma += w * va;
                    mb += w * vb;
                    saa += w * va * va;
                    sbb += w * vb * vb;
                    sab += w * va * vb;
                }
            }
            const double var_a = saa - ma * ma;
            const double var_b = sbb - mb * mb;
            const double cov = sab - ma * mb;
            sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
            ++count;
        }
    }
    return sum / count;
}

inline double ssim(const peccavi::ImageBuffer& a, const peccavi::ImageBuffer& b) {
    double total = 0.0;
    for (int c = 0; c < a.channels(); ++c) total += ssim_plane(a.plane(c), b.plane(c));
    return total / a.channels();
}

// Intersection over union from pixel counting.
inline double iou_by_pixels(const peccavi::Region& a, const peccavi::Region& b) {
    const int x0 = std::min(a.x, b.x);
    const int y0 = std::min(a.y, b.y);
    const int x1 = std::max(a.x + a.w, b.x + b.w);
    const int y1 = std::max(a.y + a.h, b.y + b.h);
    long inter = 0;
    long uni = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool in_a = x >= a.x && x < a.x + a.w && y >= a.y && y < a.y + a.h;
            const bool in_b = x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Box b survives iff no box that precedes it in the visiting order and
// itself survives overlaps it above the threshold. Evaluated by repeatedly
// scanning all pairs until the kept set stops changing.
inline std::vector<peccavi::Region> brute_force_nms(const std::vector<peccavi::Region>& boxes, double threshold) {
    const std::size_t n = boxes.size();
    auto before = [&](std::size_t i, std::size_t j) {
        const auto& a = boxes[i];
        const auto& b = boxes[j];
        if (a.score != b.score) return a.score > b.score;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return i < j;
    };
    std::vector<int> state(n, -1);  // -1 unknown, 0 dropped, 1 kept
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (state[j] != -1) continue;
            bool decided = true;
            bool suppressed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == j || !before(i, j)) continue;
                if (state[i] == -1) {
                    decided = false;
                } else if (state[i] == 1 && oracle::iou_by_pixels(boxes[i], boxes[j]) > threshold) {
                    suppressed = true;
                }
            }
            if (suppressed) {
                state[j] = 0;
                changed = true;
            } else if (decided) {
                state[j] = 1;
                changed = true;
            }
        }
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        if (state[i] == 1) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), before);
    std::vector<peccavi::Region> kept;
    for (auto i : order) kept.push_back(boxes[i]);
    return kept;
}

}  // namespace oracle
