#pragma once

// Traveling-wave ODE structure of the rescaled system: with xi = x - c t the
// profiles (U, W) satisfy
//   -c U' + W' = a U'',   -c W' + U' = a W'' + f0(U, W).

#include <array>
#include <optional>
#include <string>

#include "twave/cubic.hpp"

namespace twave {

struct FullState {
    double U = 0.0;
    double W = 0.0;
    double Z = 0.0;  // U'
    double V = 0.0;  // W'
};

struct ReducedState {
    double U = 0.0;
    double W = 0.0;
    double V = 0.0;  // W'
};

/// Wave speed, diffusion and the integration constant of the invariant
/// hyperplane a Z + c U - W = C1.
struct WaveSpec {
    double c = 0.0;
    double a = 0.0;
    double C1 = 0.0;
    double beta = 0.0;

    /// Gauge fixed by the density U1 of the non-polarized state: C1 = c U1.
    static WaveSpec with_density(double c, double a, double U1, double beta = 0.0) {
        return {c, a, c * U1, beta};
    }
};

struct Vec2 {
    double first = 0.0;
    double second = 0.0;
};

// --- hyperbolic limit and singular perturbation structure -------------------

/// Slow flow of the a = 0 limit: (U', W') = f0 / (1 - c^2) * (1, c).
Vec2 hyperbolic_rhs(double U, double W, double c, double beta);

/// First-order four-dimensional system (U, W, Z, V).
FullState full_rhs(const FullState& s, const WaveSpec& spec);

/// Three-dimensional system restricted to the invariant hyperplane.
ReducedState reduced_rhs(const ReducedState& s, const WaveSpec& spec);

/// Point (Z, V) of the critical manifold above (U, W).
Vec2 slow_manifold_lift(double U, double W, double c, double beta);

/// Equilibrium of the layer problem with frozen (Ubar, Wbar); lies on the critical manifold.
Vec2 layer_equilibrium(double Ubar, double Wbar, double c, double beta);

/// Eigenvalues (1 - c, -1 - c) of the layer problem.
Vec2 layer_eigenvalues(double c);

// --- linearization about equilibria -----------------------------------------

/// Characteristic polynomial of the reduced-system Jacobian scaled by a, in mu = a*lambda:
///   mu (mu + c)^2 + (a f_W - 1)(mu + c) + c + a f_U = 0.
struct CubicSpec {
    double c = 0.0;
    double a = 0.0;
    double f_U = 0.0;
    double f_W = 0.0;
    MonicCubic poly;
};

CubicSpec characteristic_cubic(double c, double a, double f_U, double f_W);

enum class EigenRegion { AllReal, ComplexPair };

struct EigenSet {
    std::array<cplx, 3> mu{};  // scaled eigenvalues a*lambda
    EigenRegion region = EigenRegion::AllReal;
    std::array<int, 3> re_sign{};  // sign of Re(mu) per root, 0 when |Re| is at rounding level

    /// Signs in the notation of the bifurcation diagram, e.g. "(-,-),+" or "-,-,+".
    std::string sign_pattern() const;
};

/// Build an EigenSet from the roots of a cubic. `zero_tol` decides when a real
/// part counts as zero.
EigenSet make_eigen_set(const std::array<cplx, 3>& roots, double zero_tol);

EigenSet eigen_set(const CubicSpec& cubic);

enum class PolarizedSide { Plus, Minus };  // W = +U or W = -U

/// Closed-form scaled eigenvalues at the fully polarized equilibria, ordered
/// (lambda_1, lambda_2, lambda_3) with lambda_2 > lambda_3.
std::array<double, 3> outer_eigenvalues(double c, double a, double U, double beta, PolarizedSide side);

/// Classification of the non-polarized equilibrium W = 0 by the effective
/// diffusion ag = a exp(-beta^2 U1^2).
EigenSet classify_equilibrium(double c, double ag);

struct CriticalSpeeds {
    std::optional<double> lower;  // c_* in (0, 1); absent when no all-real band exists below 1
    double upper = 1.0;           // c^* > 1
};

/// Critical speeds bounding the complex-eigenvalue band of W = 0, by bisection on the
/// sign of the cubic discriminant. Throws DomainError for ag <= 0.
CriticalSpeeds critical_speeds(double ag);

struct HopfPoint {
    double a = 0.0;
    double omega = 0.0;  // imaginary part of the scaled eigenvalue pair
};

/// Locus a = 2 (1 - c^2) where W = 0 (with ag = a) has a purely imaginary pair +-i omega.
HopfPoint hopf_locus(double c);

enum class ConnectionCase {
    ZeroToPlus,   // (i)   W=0  -> W=U   for c < -1
    PlusToZero,   // (ii)  W=U  -> W=0   for -1 < c < 0
    ZeroToMinus,  // (iii) W=0  -> W=-U  for 0 < c < 1
    MinusToZero,  // (iv)  W=-U -> W=0   for c > 1
};

ConnectionCase expected_connection(double c);
std::string to_string(ConnectionCase k);

struct PlateauDensities {
    double U2 = 0.0;  // W = -U state, U1 c / (c + 1)
    double U3 = 0.0;  // W = +U state, U1 c / (c - 1)
};

/// Mass-balance plateau densities behind fast fronts (c > 1).
PlateauDensities plateau_relations(double c, double U1);

/// Density ahead of an inversion front with speed ctilde and density U2 behind:
/// U3 = U2 (ctilde - 1) / (ctilde + 1).
double inversion_relation(double ctilde, double U2);

}  // namespace twave
