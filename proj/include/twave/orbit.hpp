#pragma once

// Orbit integration of the reduced traveling-wave system and the shooting
// method for the inversion-wave speed.

#include <string>
#include <vector>

#include "twave/twode.hpp"

namespace twave {

enum class OrbitClass { SpiralIn, Escape, MonotoneIn, HitOpposite, Inconclusive };

std::string to_string(OrbitClass k);

/// Event radii and integrator controls. Radii are relative to U1 = C1 / c.
struct OrbitEvents {
    double capture_radius = 1e-3;   // ball around (U1, 0, 0)
    double opposite_radius = 1e-3;  // ball around (U2, -U2, 0); 0 disables the event
    double escape_factor = 1e3;     // escape when |state| > escape_factor * max(U1, U2, U3)
    double min_density = 1e-8;      // leaving the half space U > 0 counts as escape
    double max_xi = 5000.0;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    bool record = true;             // keep the trajectory samples
};

struct OrbitSample {
    double xi = 0.0;
    ReducedState s;
};

struct OrbitOutcome {
    OrbitClass cls = OrbitClass::Inconclusive;
    ReducedState terminal;
    double xi = 0.0;
    double min_W = 0.0;  // smallest W seen along the orbit
};

struct OrbitResult {
    std::vector<OrbitSample> trajectory;
    OrbitOutcome outcome;
};

/// Integrate reduced_rhs from `start` until one of the events fires.
/// Throws DomainError for a <= 0 or an unphysical start, StiffnessError when the
/// step size underflows.
OrbitResult integrate_orbit(const WaveSpec& spec, const ReducedState& start, const OrbitEvents& events = {});

/// Equilibrium densities (U1, U2, U3) fixed by C1 for c > 1.
PlateauDensities equilibrium_densities(const WaveSpec& spec);

/// Point on the unstable manifold of (U3, U3, 0): offset `rel_offset * |equilibrium|`
/// along the unstable eigenvector, oriented toward decreasing W.
ReducedState unstable_start(const WaveSpec& spec, double rel_offset = 1e-6);

struct ShootingOptions {
    double lower_margin = 1e-4;  // search starts at c = 1 + lower_margin
    double tolerance = 1e-7;     // final bracket width
    OrbitEvents events{.opposite_radius = 0.0, .record = false};
};

struct InversionBracket {
    double c_lo = 0.0;
    double c_hi = 0.0;
    OrbitClass lo_outcome = OrbitClass::Inconclusive;
    OrbitClass hi_outcome = OrbitClass::Inconclusive;
    int iterations = 0;

    double width() const { return c_hi - c_lo; }
    double mid() const { return 0.5 * (c_lo + c_hi); }
};

/// Bisection on c in (1, c*) for the speed at which the unstable manifold of the
/// W = U saddle switches between escaping and being captured by (U1, 0, 0).
/// Throws ConfigError when the endpoints do not show the dichotomy.
InversionBracket inversion_speed(double a, double beta, double U1 = 1.0, const ShootingOptions& opt = {});

}  // namespace twave
