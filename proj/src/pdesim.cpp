#include "twave/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "twave/errors.hpp"
#include "twave/kernels.hpp"

namespace twave {

Grid::Grid(double L, long N) : L_(L), N_(N), dx_(2.0 * L / static_cast<double>(N)) {
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw ConfigError("grid half-width L must be positive");
    }
    if (N < 16) {
        throw ConfigError("grid needs at least 16 cells");
    }
}

std::string to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "outflow"; }
std::string to_string(Advection a) { return a == Advection::Upwind ? "upwind" : "compensated"; }
std::string to_string(Units u) { return u == Units::Physical ? "physical" : "rescaled"; }
std::string to_string(InitialKind k) { return k == InitialKind::Bump ? "bump" : "dip"; }

Boundary parse_boundary(const std::string& s) {
    if (s == "outflow") return Boundary::Outflow;
    if (s == "periodic") return Boundary::Periodic;
    throw ConfigError("unknown boundary '" + s + "' (outflow|periodic)");
}

Advection parse_advection(const std::string& s) {
    if (s == "compensated") return Advection::Compensated;
    if (s == "upwind") return Advection::Upwind;
    throw ConfigError("unknown advection '" + s + "' (compensated|upwind)");
}

Units parse_units(const std::string& s) {
    if (s == "rescaled") return Units::Rescaled;
    if (s == "physical") return Units::Physical;
    throw ConfigError("unknown units '" + s + "' (rescaled|physical)");
}

InitialKind parse_initial_kind(const std::string& s) {
    if (s == "dip") return InitialKind::Dip;
    if (s == "bump") return InitialKind::Bump;
    throw ConfigError("unknown initial kind '" + s + "' (dip|bump)");
}

double cfl_dt(double dx, double D, double safety) {
    if (!(dx > 0.0)) {
        throw ConfigError("cfl_dt needs dx > 0");
    }
    if (!(D >= 0.0)) {
        throw ConfigError("cfl_dt needs a non-negative diffusion coefficient");
    }
    double dt = dx;
    if (D > 0.0) {
        dt = std::min(dt, dx * dx / (2.0 * D));
    }
    return safety * dt;
}

double diffusion_coefficient(const SolverConfig& cfg) {
    return cfg.units == Units::Physical ? cfg.params.epsilon() : cfg.params.a();
}

double reaction_rate(const SolverConfig& cfg) { return cfg.units == Units::Physical ? cfg.params.alpha() : 1.0; }

StepCoefficients step_coefficients(const SolverConfig& cfg) {
    const double dx = cfg.grid.dx();
    const double nu = cfg.dt / dx;
    const double d = diffusion_coefficient(cfg) * cfg.dt / (dx * dx);
    StepCoefficients c;
    c.half_nu = 0.5 * nu;
    c.k = cfg.advection == Advection::Upwind ? d + 0.5 * nu : d + 0.5 * nu * nu;
    c.half_rdt = cfg.reaction ? 0.5 * cfg.dt * reaction_rate(cfg) : 0.0;
    c.beta = cfg.params.beta();
    c.periodic = cfg.boundary == Boundary::Periodic;
    return c;
}

void validate(const SolverConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
        throw ConfigError("time step must be positive");
    }
    if (!(cfg.T >= 0.0) || !std::isfinite(cfg.T)) {
        throw ConfigError("final time must be non-negative");
    }
    if (!(cfg.snapshot_every > 0.0)) {
        throw ConfigError("snapshot interval must be positive");
    }
    const double dx = cfg.grid.dx();
    const double limit = cfl_dt(dx, diffusion_coefficient(cfg), 1.0);
    if (cfg.dt > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt = " << cfg.dt << " exceeds the CFL bound " << limit << " for dx = " << dx;
        throw ConfigError(msg.str());
    }
    const auto c = step_coefficients(cfg);
    if (1.0 - 2.0 * c.k < 0.0 || c.k < c.half_nu) {
        std::ostringstream msg;
        msg << "stencil has a negative weight (k = " << c.k << ", nu/2 = " << c.half_nu
            << "); refine dx relative to the diffusion, lower the safety factor or use upwind advection";
        throw ConfigError(msg.str());
    }
    if (cfg.boundary == Boundary::Outflow && 2 * cfg.guard_cells >= cfg.grid.N()) {
        throw ConfigError("guard band covers the whole grid");
    }
}

FieldPair make_initial(InitialKind kind, double u0, double A, double sigma, const Grid& grid, double noise,
                       std::uint64_t seed) {
    if (!(u0 > 0.0)) {
        throw DomainError("background density u0 must be positive");
    }
    if (!(A >= 0.0)) {
        throw DomainError("amplitude must be non-negative");
    }
    if (kind == InitialKind::Dip && A >= u0) {
        throw DomainError("dip amplitude must stay below u0 (nonpositive density)");
    }
    if (!(sigma > 0.0)) {
        throw ConfigError("initial width sigma must be positive");
    }
    if (!(noise >= 0.0 && noise < 1.0)) {
        throw ConfigError("noise must lie in [0, 1)");
    }
    FieldPair f(grid.N(), 0.5 * u0);
    const double sgn = kind == InitialKind::Dip ? -1.0 : 1.0;
    for (long i = 0; i < grid.N(); ++i) {
        const double x = grid.x(i);
        const double half = 0.5 * sgn * A * std::exp(-x * x / (2.0 * sigma * sigma));
        f.dr[i] = half;
        f.dl[i] = half;
    }
    if (noise > 0.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> xi(-1.0, 1.0);
        for (long i = 0; i < grid.N(); ++i) {
            const double du = noise * f.u(i) * xi(rng);
            f.dr[i] += 0.5 * du;
            f.dl[i] += 0.5 * du;
        }
    }
    return f;
}

double total_mass(const FieldPair& f, const Grid& grid) {
    double s = 0.0;
    for (long i = 0; i < f.size(); ++i) {
        s += f.dr[i] + f.dl[i];
    }
    return (2.0 * f.base * static_cast<double>(f.size()) + s) * grid.dx();
}

FieldPair step(const FieldPair& f, const SolverConfig& cfg) {
    validate(cfg);
    if (f.size() != cfg.grid.N()) {
        throw ConfigError("field size does not match the grid");
    }
    FieldPair out(f.size(), f.base);
    step_parallel(f, out, step_coefficients(cfg));
    return out;
}

namespace {

double max_density(const FieldPair& f) {
    double m = 0.0;
    for (long i = 0; i < f.size(); ++i) {
        m = std::max(m, f.u(i));
    }
    return m;
}

void check_guard(const FieldPair& f, const SolverConfig& cfg, double level, double t) {
    const long n = f.size();
    auto disturbed = [&](long i) {
        return std::abs(f.dr[i] + f.dl[i]) > level || std::abs(f.dr[i] - f.dl[i]) > level;
    };
    for (long j = 0; j < cfg.guard_cells; ++j) {
        if (disturbed(j) || disturbed(n - 1 - j)) {
            std::ostringstream msg;
            msg << "front reached the boundary guard band (" << cfg.guard_cells << " cells) at t = " << t
                << "; enlarge L or shorten T";
            throw BoundaryReachedError(msg.str(), t);
        }
    }
}

}  // namespace

RunResult run(const SolverConfig& cfg_in, const FieldPair& initial, const SnapshotCallback& on_snapshot,
              bool keep_snapshots) {
    validate(cfg_in);
    if (initial.size() != cfg_in.grid.N()) {
        throw ConfigError("initial field size does not match the grid");
    }
    SolverConfig cfg = cfg_in;
    const long per_snap = std::max(1L, static_cast<long>(std::ceil(cfg.snapshot_every / cfg.dt - 1e-9)));
    cfg.dt = cfg.snapshot_every / static_cast<double>(per_snap);
    const long total = static_cast<long>(std::llround(cfg.T / cfg.dt));
    const auto coeff = step_coefficients(cfg);

    const double tol_pos = 1e-12 * max_density(initial);
    const double level = cfg.guard_level * (initial.base > 0.0 ? 2.0 * initial.base : max_density(initial));

    RunResult res;
    res.dt = cfg.dt;
    FieldPair cur = initial;
    FieldPair next(cur.size(), cur.base);
    res.min_density = std::numeric_limits<double>::infinity();
    for (long i = 0; i < cur.size(); ++i) {
        res.min_density = std::min({res.min_density, cur.ur(i), cur.ul(i)});
    }

    auto emit = [&](long n) {
        Snapshot s{static_cast<double>(n) * cfg.dt, cur};
        res.mass.push_back(total_mass(cur, cfg.grid));
        if (on_snapshot) {
            on_snapshot(s);
        }
        if (keep_snapshots) {
            res.snapshots.push_back(std::move(s));
        }
    };
    emit(0);
    for (long n = 1; n <= total; ++n) {
        const auto st = step_parallel(cur, next, coeff);
        std::swap(cur, next);
        const double t = static_cast<double>(n) * cfg.dt;
        res.min_density = std::min(res.min_density, st.min_density);
        if (!(st.min_density >= -tol_pos)) {
            std::ostringstream msg;
            msg << "density " << st.min_density << " below -" << tol_pos << " in cell " << st.min_cell
                << " at t = " << t;
            throw SolverInstabilityError(msg.str(), st.min_cell, t);
        }
        if (cfg.boundary == Boundary::Outflow) {
            check_guard(cur, cfg, level, t);
        }
        if (n % per_snap == 0 || n == total) {
            emit(n);
        }
    }
    res.steps = total;
    return res;
}

}  // namespace twave
