#pragma once

#include "peccavi/image.hpp"

namespace peccavi {

// PSNR in dB with data range 1.0; +infinity for identical images.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

struct SsimResult {
    double value = 1.0;
    // Set when the image was smaller than the 11x11 window and a shrunken
    // window was used instead.
    bool reduced_window = false;
    int window = 11;
};

// Mean local SSIM (Gaussian 11x11 window, sigma 1.5, K1 0.01, K2 0.03,
// valid region only), averaged over channels.
SsimResult ssim_detailed(const ImageBuffer& a, const ImageBuffer& b);

inline double ssim(const ImageBuffer& a, const ImageBuffer& b) { return ssim_detailed(a, b).value; }

}  // namespace peccavi
