#include "twave/twode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twave/errors.hpp"
#include "twave/model.hpp"

namespace twave {

namespace {

double singular_factor(double c) {
    const double d = 1.0 - c * c;
    if (d == 0.0) {
        throw SingularSpeedError("wave speed |c| = 1 is singular for the slow flow");
    }
    return 1.0 / d;
}

void require_diffusion(double a) {
    if (!(a > 0.0)) {
        throw DomainError("traveling-wave system with diffusion needs a > 0 (use hyperbolic_rhs for a = 0)");
    }
}

}  // namespace

Vec2 hyperbolic_rhs(double U, double W, double c, double beta) {
    const double s = singular_factor(c) * alignment(U, W, beta);
    return {s, c * s};
}

FullState full_rhs(const FullState& s, const WaveSpec& spec) {
    require_diffusion(spec.a);
    const double f = alignment(s.U, s.W, spec.beta);
    return {s.Z, s.V, (s.V - spec.c * s.Z) / spec.a, (s.Z - spec.c * s.V - f) / spec.a};
}

ReducedState reduced_rhs(const ReducedState& s, const WaveSpec& spec) {
    require_diffusion(spec.a);
    const double f = alignment(s.U, s.W, spec.beta);
    const double q = (-spec.c * s.U + s.W + spec.C1) / spec.a;
    return {q, s.V, q / spec.a - spec.c * s.V / spec.a - f / spec.a};
}

Vec2 slow_manifold_lift(double U, double W, double c, double beta) {
    return hyperbolic_rhs(U, W, c, beta);
}

Vec2 layer_equilibrium(double Ubar, double Wbar, double c, double beta) {
    // Z = f / (1 - c^2), V = c f / (1 - c^2)
    const double f = alignment(Ubar, Wbar, beta);
    const double k = singular_factor(c);
    return {f * k, c * f * k};
}

Vec2 layer_eigenvalues(double c) { return {1.0 - c, -1.0 - c}; }

CubicSpec characteristic_cubic(double c, double a, double f_U, double f_W) {
    // mu (mu + c)^2 + (a f_W - 1)(mu + c) + c + a f_U
    //   = mu^3 + 2c mu^2 + (c^2 + a f_W - 1) mu + c (a f_W - 1) + c + a f_U
    CubicSpec spec{c, a, f_U, f_W, {}};
    spec.poly.c2 = 2.0 * c;
    spec.poly.c1 = c * c + a * f_W - 1.0;
    spec.poly.c0 = c * a * f_W + a * f_U;
    return spec;
}

std::string EigenSet::sign_pattern() const {
    auto sym = [](int s) { return s > 0 ? std::string("+") : s < 0 ? std::string("-") : std::string("0"); };
    if (region == EigenRegion::ComplexPair) {
        return sym(re_sign[0]) + ",(" + sym(re_sign[1]) + "," + sym(re_sign[2]) + ")";
    }
    return sym(re_sign[0]) + "," + sym(re_sign[1]) + "," + sym(re_sign[2]);
}

EigenSet make_eigen_set(const std::array<cplx, 3>& roots, double zero_tol) {
    EigenSet e;
    e.mu = roots;
    e.region = roots[1].imag() != 0.0 ? EigenRegion::ComplexPair : EigenRegion::AllReal;
    for (int k = 0; k < 3; ++k) {
        const double re = roots[k].real();
        e.re_sign[k] = std::abs(re) <= zero_tol ? 0 : (re > 0.0 ? 1 : -1);
    }
    return e;
}

EigenSet eigen_set(const CubicSpec& cubic) {
    const auto roots = solve_cubic(cubic.poly);
    return make_eigen_set(roots, 1e-9 * cubic.poly.max_coefficient());
}

std::array<double, 3> outer_eigenvalues(double c, double a, double U, double beta, PolarizedSide side) {
    if (!(U > 0.0)) {
        throw DomainError("outer_eigenvalues needs U > 0");
    }
    require_diffusion(a);
    const double g8 = 8.0 * a * crowding(U, beta);
    if (side == PolarizedSide::Plus) {
        const double b = 1.0 + c;
        const double s = std::sqrt(b * b + g8);
        return {1.0 - c, -0.5 * (b - s), -0.5 * (b + s)};
    }
    const double b = 1.0 - c;
    const double s = std::sqrt(b * b + g8);
    return {-(1.0 + c), 0.5 * (b + s), 0.5 * (b - s)};
}

EigenSet classify_equilibrium(double c, double ag) {
    if (c == 0.0 || c == 1.0 || c == -1.0) {
        throw SingularSpeedError("equilibrium classification is undefined for c in {-1, 0, 1}");
    }
    if (ag < 0.0) {
        throw DomainError("classify_equilibrium needs ag >= 0");
    }
    // At W = 0: f_U = 0, f_W = g, so a f_W = ag.
    return eigen_set(characteristic_cubic(c, ag, 0.0, 1.0));
}

namespace {

// True when every root of the W = 0 cubic is real. Uses the discriminant sign and
// falls back to the imaginary parts of the roots when it is at rounding level.
bool all_real(double c, double ag) {
    const auto cubic = characteristic_cubic(c, ag, 0.0, 1.0).poly;
    const double disc = cubic.discriminant();
    const double scale = std::pow(cubic.max_coefficient(), 4);
    if (std::abs(disc) > 1e-14 * scale) {
        return disc > 0.0;
    }
    const auto roots = solve_cubic(cubic);
    double im = 0.0;
    for (const auto& r : roots) {
        im += std::abs(r.imag());
    }
    return im <= 1e-12 * cubic.max_coefficient();
}

// Bisection for the transition between `lo` (all_real == want_lo) and `hi`.
double bisect_transition(double lo, double hi, double ag, bool real_at_lo) {
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (all_real(mid, ag) == real_at_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

CriticalSpeeds critical_speeds(double ag) {
    if (!(ag > 0.0) || !std::isfinite(ag)) {
        throw DomainError("critical_speeds needs ag > 0 (the ag -> 0 limit is (1, 1))");
    }
    CriticalSpeeds out;

    // Upper speed: the roots are real for all large c. Scan downward from a safe
    // upper bound to the last all-real sample, then bisect.
    double c_hi = 2.0 + 4.0 * std::sqrt(ag) + 2.0 * ag;
    while (!all_real(c_hi, ag)) {
        c_hi *= 2.0;
    }
    constexpr int kScan = 4000;
    double prev = c_hi;
    bool found = false;
    for (int k = 1; k <= kScan; ++k) {
        const double c = c_hi - (c_hi - 1.0) * k / kScan;
        if (c <= 1.0) {
            break;
        }
        if (!all_real(c, ag)) {
            out.upper = bisect_transition(c, prev, ag, false);
            found = true;
            break;
        }
        prev = c;
    }
    if (!found) {
        out.upper = bisect_transition(1.0, prev, ag, false);
    }

    // Lower speed: the all-real band (0, c_*] next to c = 0 exists only for ag < 1.
    const double c_small = 1e-9;
    if (all_real(c_small, ag)) {
        double last_real = c_small;
        bool complex_seen = false;
        for (int k = 1; k < kScan; ++k) {
            const double c = c_small + (1.0 - c_small) * k / kScan;
            if (!all_real(c, ag)) {
                out.lower = bisect_transition(last_real, c, ag, true);
                complex_seen = true;
                break;
            }
            last_real = c;
        }
        if (!complex_seen) {
            out.lower = 1.0;
        }
    }
    return out;
}

HopfPoint hopf_locus(double c) {
    if (!(c > 0.0 && c < 1.0)) {
        throw DomainError("hopf_locus needs 0 < c < 1");
    }
    return {2.0 * (1.0 - c * c), std::sqrt(1.0 - c * c)};
}

ConnectionCase expected_connection(double c) {
    if (c == 0.0 || c == 1.0 || c == -1.0 || !std::isfinite(c)) {
        throw SingularSpeedError("no connection is predicted for c in {-1, 0, 1}");
    }
    if (c < -1.0) return ConnectionCase::ZeroToPlus;
    if (c < 0.0) return ConnectionCase::PlusToZero;
    if (c < 1.0) return ConnectionCase::ZeroToMinus;
    return ConnectionCase::MinusToZero;
}

std::string to_string(ConnectionCase k) {
    switch (k) {
        case ConnectionCase::ZeroToPlus: return "(i) W=0 -> W=U";
        case ConnectionCase::PlusToZero: return "(ii) W=U -> W=0";
        case ConnectionCase::ZeroToMinus: return "(iii) W=0 -> W=-U";
        case ConnectionCase::MinusToZero: return "(iv) W=-U -> W=0";
    }
    return "?";
}

PlateauDensities plateau_relations(double c, double U1) {
    if (!(c > 1.0)) {
        throw DomainError("plateau_relations covers fast fronts c > 1; slow fronts use U2 = U1 c/(c+1)");
    }
    if (!(U1 > 0.0)) {
        throw DomainError("plateau_relations needs U1 > 0");
    }
    if (std::isinf(c)) {
        return {U1, U1};
    }
    return {U1 * c / (c + 1.0), U1 * c / (c - 1.0)};
}

double inversion_relation(double ctilde, double U2) {
    if (!(ctilde > 1.0)) {
        throw DomainError("inversion_relation needs ctilde > 1");
    }
    if (!(U2 > 0.0)) {
        throw DomainError("inversion_relation needs U2 > 0");
    }
    return U2 * (ctilde - 1.0) / (ctilde + 1.0);
}

}  // namespace twave
