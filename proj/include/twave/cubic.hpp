#pragma once

#include <array>
#include <complex>

namespace twave {

using cplx = std::complex<double>;

/// Monic cubic mu^3 + c2 mu^2 + c1 mu + c0.
struct MonicCubic {
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    cplx operator()(cplx mu) const { return ((mu + c2) * mu + c1) * mu + c0; }
    /// Discriminant; > 0 three distinct real roots, < 0 one real root and a complex pair.
    double discriminant() const;
    double max_coefficient() const;
};

/// Roots of a monic cubic via the trigonometric (three real roots) or Cardano
/// (one real root) formula, each refined by Newton steps in complex arithmetic.
/// Real roots come first in ascending order; a complex pair is stored with the
/// positive-imaginary member first and its exact conjugate second.
std::array<cplx, 3> solve_cubic(const MonicCubic& p);

}  // namespace twave
