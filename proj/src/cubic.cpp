#include "twave/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace twave {

double MonicCubic::discriminant() const {
    const double b = c2, c = c1, d = c0;
    return 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d;
}

double MonicCubic::max_coefficient() const {
    return std::max({1.0, std::abs(c2), std::abs(c1), std::abs(c0)});
}

namespace {

cplx polish(const MonicCubic& p, cplx z) {
    for (int it = 0; it < 3; ++it) {
        const cplx f = p(z);
        const cplx df = (3.0 * z + 2.0 * p.c2) * z + p.c1;
        if (std::abs(df) == 0.0) {
            break;
        }
        const cplx step = f / df;
        const cplx next = z - step;
        if (std::abs(p(next)) >= std::abs(f)) {
            break;
        }
        z = next;
    }
    return z;
}

double polish_real(const MonicCubic& p, double x) {
    return polish(p, cplx(x, 0.0)).real();
}

}  // namespace

std::array<cplx, 3> solve_cubic(const MonicCubic& p) {
    // Depressed cubic t^3 + q t + r with mu = t - c2/3.
    const double shift = p.c2 / 3.0;
    const double q = p.c1 - p.c2 * p.c2 / 3.0;
    const double r = 2.0 * p.c2 * p.c2 * p.c2 / 27.0 - p.c2 * p.c1 / 3.0 + p.c0;
    const double half_r = r / 2.0;
    const double third_q = q / 3.0;
    const double h = half_r * half_r + third_q * third_q * third_q;

    std::array<cplx, 3> roots;
    if (h <= 0.0) {
        // Three real roots (possibly repeated).
        if (third_q == 0.0) {
            roots = {cplx(-shift), cplx(-shift), cplx(-shift)};
        } else {
            const double m = 2.0 * std::sqrt(-third_q);
            const double arg = std::clamp(3.0 * r / (q * m), -1.0, 1.0);
            const double theta = std::acos(arg) / 3.0;
            std::array<double, 3> t;
            for (int k = 0; k < 3; ++k) {
                t[k] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift;
            }
            std::sort(t.begin(), t.end());
            for (int k = 0; k < 3; ++k) {
                roots[k] = cplx(polish_real(p, t[k]), 0.0);
            }
        }
    } else {
        const double s = std::sqrt(h);
        const double a = std::cbrt(-half_r + s);
        const double b = std::cbrt(-half_r - s);
        const double real_root = polish_real(p, a + b - shift);
        // Remaining quadratic from deflation: mu^2 + (c2 + x) mu + (c1 + x (c2 + x)).
        const double bq = p.c2 + real_root;
        const double cq = p.c1 + real_root * bq;
        const double disc = bq * bq - 4.0 * cq;
        if (disc >= 0.0) {
            // Happens only at the boundary where h is rounding-level positive.
            const double sq = std::sqrt(disc);
            const double x1 = polish_real(p, (-bq - sq) / 2.0);
            const double x2 = polish_real(p, (-bq + sq) / 2.0);
            std::array<double, 3> t{real_root, x1, x2};
            std::sort(t.begin(), t.end());
            roots = {cplx(t[0]), cplx(t[1]), cplx(t[2])};
        } else {
            cplx z = polish(p, cplx(-bq / 2.0, std::sqrt(-disc) / 2.0));
            if (z.imag() < 0.0) {
                z = std::conj(z);
            }
            roots = {cplx(real_root, 0.0), z, std::conj(z)};
        }
    }
    return roots;
}

}  // namespace twave
