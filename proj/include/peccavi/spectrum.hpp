#pragma once

#include "peccavi/image.hpp"

#include <complex>
#include <vector>

namespace peccavi {

/// Center-shifted 2-D spectrum of an S x S real plane.
///
/// Storage is row-major over shifted indices: DC sits at (S/2, S/2).
/// Offsets (du, dv) address coefficients relative to DC, with du the
/// vertical frequency and dv the horizontal one.
class Spectrum {
public:
    using value_type = std::complex<double>;

    Spectrum() = default;
    explicit Spectrum(int size);

    int size() const noexcept { return size_; }
    int center() const noexcept { return size_ / 2; }

    value_type& at(int row, int col) noexcept { return coeffs_[static_cast<std::size_t>(row) * size_ + col]; }
    const value_type& at(int row, int col) const noexcept {
        return coeffs_[static_cast<std::size_t>(row) * size_ + col];
    }
    value_type& at_offset(int du, int dv) noexcept { return at(wrap(du + center()), wrap(dv + center())); }
    const value_type& at_offset(int du, int dv) const noexcept {
        return at(wrap(du + center()), wrap(dv + center()));
    }

    // Shifted index of the coefficient mirrored through DC.
    std::pair<int, int> mirror(int row, int col) const noexcept {
        return {wrap(2 * center() - row), wrap(2 * center() - col)};
    }

    const std::vector<value_type>& coeffs() const noexcept { return coeffs_; }
    std::vector<value_type>& coeffs() noexcept { return coeffs_; }

    // Largest |X(k) - conj(X(-k))| over all coefficients.
    double max_asymmetry() const noexcept;

private:
    int wrap(int index) const noexcept { return ((index % size_) + size_) % size_; }

    int size_ = 0;
    std::vector<value_type> coeffs_;
};

// Unnormalized forward DFT (sum over pixels), center-shifted.
// Throws DimensionError for empty or non-square planes.
Spectrum forward_spectrum(const Plane& plane);

// Inverse of forward_spectrum. The imaginary residual of the inverse must
// stay below `tolerance` RMS, otherwise SymmetryError is thrown.
Plane inverse_spectrum(const Spectrum& spectrum, double tolerance = 1e-6);

// Projects onto the Hermitian subspace: X(k) <- (X(k) + conj(X(-k))) / 2.
void symmetrize(Spectrum& spectrum) noexcept;

}  // namespace peccavi
