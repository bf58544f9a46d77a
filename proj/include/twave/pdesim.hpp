#pragma once

// Explicit finite-volume solver for the alignment system written in the
// characteristic densities u_r = (u + w) / 2 and u_l = (u - w) / 2.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "twave/model.hpp"

namespace twave {

class Grid {
public:
    Grid() = default;
    /// Domain [-L, L] split into N cells. Throws ConfigError for N < 16 or L <= 0.
    Grid(double L, long N);

    double L() const noexcept { return L_; }
    long N() const noexcept { return N_; }
    double dx() const noexcept { return dx_; }
    /// Cell center; exactly antisymmetric, x(N - 1 - i) == -x(i).
    double x(long i) const noexcept { return (static_cast<double>(i) + 0.5 - 0.5 * static_cast<double>(N_)) * dx_; }

private:
    double L_ = 1.0;
    long N_ = 16;
    double dx_ = 0.125;
};

/// Directional densities stored as deviations from a uniform background:
/// u_r = base + dr, u_l = base + dl. Keeping the deviations avoids losing the
/// small leading-edge tails of the fronts to rounding against the background.
struct FieldPair {
    double base = 0.0;
    std::vector<double> dr;
    std::vector<double> dl;

    FieldPair() = default;
    FieldPair(long n, double base_density) : base(base_density), dr(n, 0.0), dl(n, 0.0) {}

    long size() const noexcept { return static_cast<long>(dr.size()); }
    double ur(long i) const { return base + dr[i]; }
    double ul(long i) const { return base + dl[i]; }
    double u(long i) const { return 2.0 * base + (dr[i] + dl[i]); }
    double w(long i) const { return dr[i] - dl[i]; }
};

enum class Boundary { Outflow, Periodic };
enum class Advection { Compensated, Upwind };
enum class Units { Rescaled, Physical };
enum class InitialKind { Dip, Bump };

std::string to_string(Boundary b);
std::string to_string(Advection a);
std::string to_string(Units u);
std::string to_string(InitialKind k);
Boundary parse_boundary(const std::string& s);
Advection parse_advection(const std::string& s);
Units parse_units(const std::string& s);
InitialKind parse_initial_kind(const std::string& s);

struct SolverConfig {
    ModelParams params;
    Grid grid;
    double dt = 0.0;
    double T = 0.0;
    double snapshot_every = 1.0;
    Boundary boundary = Boundary::Outflow;
    bool reaction = true;
    Advection advection = Advection::Compensated;
    Units units = Units::Rescaled;
    long guard_cells = 50;      // fronts may not enter this band next to an outflow boundary
    double guard_level = 1e-3;  // relative disturbance that counts as a front
};

struct Snapshot {
    double time = 0.0;
    FieldPair f;
};

/// dt = safety * min(dx, dx^2 / (2 D)) for unit advection speed and diffusion D.
double cfl_dt(double dx, double D, double safety);

/// Diffusion coefficient and reaction rate of the configured unit system.
double diffusion_coefficient(const SolverConfig& cfg);
double reaction_rate(const SolverConfig& cfg);

/// Stencil weights of one step. Upwind advection uses k = d + nu/2, the
/// compensated form k = d + nu^2/2 (second order in space for the advection).
struct StepCoefficients {
    double half_nu = 0.0;    // dt / (2 dx)
    double k = 0.0;          // effective diffusion number
    double half_rdt = 0.0;   // reaction weight dt * R / 2, 0 when reaction is off
    double beta = 0.0;
    bool periodic = false;
};

StepCoefficients step_coefficients(const SolverConfig& cfg);

/// Throws ConfigError when dt violates the CFL bound, the stencil has a negative
/// weight, or the time controls are inconsistent.
void validate(const SolverConfig& cfg);

/// Gaussian dip or bump of amplitude A and width sigma on the background u0, with
/// w = 0. Optional multiplicative noise of relative size `noise` from `seed`.
FieldPair make_initial(InitialKind kind, double u0, double A, double sigma, const Grid& grid, double noise = 0.0,
                       std::uint64_t seed = 0);

/// Sum of (u_r + u_l) dx.
double total_mass(const FieldPair& f, const Grid& grid);

/// One forward-Euler step. Throws ConfigError for an invalid configuration.
FieldPair step(const FieldPair& f, const SolverConfig& cfg);

struct RunResult {
    std::vector<Snapshot> snapshots;
    std::vector<double> mass;  // total mass per snapshot
    long steps = 0;
    double dt = 0.0;           // step actually used (snapshot cadence is a whole number of steps)
    double min_density = 0.0;  // smallest u_r or u_l seen
};

using SnapshotCallback = std::function<void(const Snapshot&)>;

/// Integrate to cfg.T from `initial`. Snapshots at t = 0 and every snapshot_every.
/// Throws SolverInstabilityError when a density drops below -1e-12 * max initial
/// density and BoundaryReachedError when a front enters the guard band.
RunResult run(const SolverConfig& cfg, const FieldPair& initial, const SnapshotCallback& on_snapshot = {},
              bool keep_snapshots = true);

}  // namespace twave
