#include "peccavi/spectrum.hpp"

#include "peccavi/error.hpp"

#include <cmath>
#include <fmt/format.h>

namespace peccavi {

Spectrum::Spectrum(int size) : size_(size) {
    if (size <= 0) throw DimensionError(fmt::format("spectrum size must be positive, got {}", size));
    coeffs_.assign(static_cast<std::size_t>(size) * size, value_type{});
}

double Spectrum::max_asymmetry() const noexcept {
    double worst = 0.0;
    for (int r = 0; r < size_; ++r) {
        for (int c = 0; c < size_; ++c) {
            const auto [mr, mc] = mirror(r, c);
            worst = std::max(worst, std::abs(at(r, c) - std::conj(at(mr, mc))));
        }
    }
    return worst;
}

Spectrum forward_spectrum(const Plane& plane) {
    if (plane.empty()) throw DimensionError("cannot transform an empty plane");
    if (plane.rows != plane.cols) {
        throw DimensionError(fmt::format("spectral plane must be square, got {}x{}", plane.cols, plane.rows));
    }
    const int size = plane.rows;
    cv::Mat2d freq;
    cv::dft(plane, freq, cv::DFT_COMPLEX_OUTPUT);

    Spectrum out(size);
    const int c0 = out.center();
    for (int r = 0; r < size; ++r) {
        const int sr = (r + c0) % size;
        const auto* row = freq.ptr<cv::Vec2d>(r);
        for (int c = 0; c < size; ++c) {
            out.at(sr, (c + c0) % size) = {row[c][0], row[c][1]};
        }
    }
    return out;
}

Plane inverse_spectrum(const Spectrum& spectrum, double tolerance) {
    const int size = spectrum.size();
    if (size <= 0) throw DimensionError("cannot invert an empty spectrum");
    const int c0 = spectrum.center();
    cv::Mat2d freq(size, size);
    for (int r = 0; r < size; ++r) {
        const int sr = (r + c0) % size;
        auto* row = freq.ptr<cv::Vec2d>(r);
        for (int c = 0; c < size; ++c) {
            const auto& v = spectrum.at(sr, (c + c0) % size);
            row[c] = {v.real(), v.imag()};
        }
    }
    cv::Mat2d spatial;
    cv::dft(freq, spatial, cv::DFT_INVERSE | cv::DFT_SCALE | cv::DFT_COMPLEX_OUTPUT);

    Plane out(size, size);
    double imag_energy = 0.0;
    for (int r = 0; r < size; ++r) {
        const auto* src = spatial.ptr<cv::Vec2d>(r);
        auto* dst = out.ptr<double>(r);
        for (int c = 0; c < size; ++c) {
            dst[c] = src[c][0];
            imag_energy += src[c][1] * src[c][1];
        }
    }
    const double imag_rms = std::sqrt(imag_energy / (static_cast<double>(size) * size));
    if (imag_rms > tolerance) {
        throw SymmetryError(fmt::format("spectrum is not conjugate symmetric (imaginary RMS {:.3g})", imag_rms));
    }
    return out;
}

void symmetrize(Spectrum& spectrum) noexcept {
    const int size = spectrum.size();
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const auto [mr, mc] = spectrum.mirror(r, c);
            // Visit each pair once; self-mirrored entries become real.
            if (mr * size + mc < r * size + c) continue;
            const auto avg = 0.5 * (spectrum.at(r, c) + std::conj(spectrum.at(mr, mc)));
            spectrum.at(r, c) = avg;
            spectrum.at(mr, mc) = std::conj(avg);
        }
    }
}

}  // namespace peccavi
