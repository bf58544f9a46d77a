#include "twave/orbit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "twave/errors.hpp"
#include "twave/model.hpp"

namespace twave {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 3>;

struct LeftHalfSpace {};

double norm3(const State& s) { return std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]); }

double dist(const State& s, double U, double W) {
    const double dU = s[0] - U;
    const double dW = s[1] - W;
    return std::sqrt(dU * dU + dW * dW + s[2] * s[2]);
}

ReducedState to_reduced(const State& s) { return {s[0], s[1], s[2]}; }

}  // namespace

std::string to_string(OrbitClass k) {
    switch (k) {
        case OrbitClass::SpiralIn: return "SpiralIn";
        case OrbitClass::Escape: return "Escape";
        case OrbitClass::MonotoneIn: return "MonotoneIn";
        case OrbitClass::HitOpposite: return "HitOpposite";
        case OrbitClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

PlateauDensities equilibrium_densities(const WaveSpec& spec) {
    if (!(spec.c > 1.0)) {
        throw DomainError("equilibrium densities of the reduced system need c > 1");
    }
    return {spec.C1 / (spec.c + 1.0), spec.C1 / (spec.c - 1.0)};
}

ReducedState unstable_start(const WaveSpec& spec, double rel_offset) {
    const double U3 = equilibrium_densities(spec).U3;
    const auto ev = outer_eigenvalues(spec.c, spec.a, U3, spec.beta, PolarizedSide::Plus);
    const double mu = ev[1];  // the positive root
    const double lambda = mu / spec.a;
    double v[3] = {1.0, spec.c + mu, lambda * (spec.c + mu)};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    const double sgn = v[1] > 0.0 ? -1.0 : 1.0;
    const double h = rel_offset * std::sqrt(2.0) * U3 * sgn / n;
    return {U3 + h * v[0], U3 + h * v[1], h * v[2]};
}

OrbitResult integrate_orbit(const WaveSpec& spec, const ReducedState& start, const OrbitEvents& ev) {
    if (!(spec.a > 0.0)) {
        throw DomainError("integrate_orbit needs a > 0");
    }
    if (!(start.U > 0.0) || std::abs(start.W) > start.U * (1.0 + 1e-9)) {
        throw DomainError("orbit start must satisfy U > 0 and |W| <= U");
    }
    const double U1 = spec.C1 / spec.c;
    const auto dens = equilibrium_densities(spec);
    const double Umax = std::max({U1, dens.U2, dens.U3});
    const double r_cap = ev.capture_radius * U1;
    const double r_opp = ev.opposite_radius * U1;
    const double r_esc = ev.escape_factor * Umax;
    const double u_min = ev.min_density * U1;

    auto rhs = [&spec, u_min](const State& x, State& dxdt, double) {
        if (!(x[0] > u_min)) {
            throw LeftHalfSpace{};
        }
        const auto d = reduced_rhs({x[0], x[1], x[2]}, spec);
        dxdt = {d.U, d.W, d.V};
    };

    OrbitResult res;
    State x{start.U, start.W, start.V};
    double xi = 0.0;
    double min_W = x[1];
    if (ev.record) {
        res.trajectory.push_back({xi, start});
    }
    auto finish = [&](OrbitClass cls) {
        res.outcome = {cls, to_reduced(x), xi, min_W};
        return res;
    };

    auto stepper = odeint::make_dense_output(ev.abs_tol, ev.rel_tol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(x, 0.0, 1e-3 * std::min(1.0, spec.a));
    // The orbit starts next to the saddle; the capture ball is armed only once the
    // orbit has left it.
    const double start_gap = dist(x, U1, 0.0);
    bool armed = start_gap > 2.0 * r_cap;
    try {
        while (true) {
            const auto span = stepper.do_step(rhs);
            xi = span.second;
            x = stepper.current_state();
            min_W = std::min(min_W, x[1]);
            if (ev.record) {
                res.trajectory.push_back({xi, to_reduced(x)});
            }
            if (!std::isfinite(norm3(x)) || norm3(x) > r_esc) {
                return finish(OrbitClass::Escape);
            }
            const double d1 = dist(x, U1, 0.0);
            if (!armed && d1 > 2.0 * r_cap) {
                armed = true;
            }
            if (armed && d1 < r_cap) {
                return finish(min_W < 0.0 ? OrbitClass::SpiralIn : OrbitClass::MonotoneIn);
            }
            if (r_opp > 0.0 && dist(x, dens.U2, -dens.U2) < r_opp) {
                return finish(OrbitClass::HitOpposite);
            }
            if (xi >= ev.max_xi) {
                return finish(OrbitClass::Inconclusive);
            }
            const double dt = stepper.current_time_step();
            if (dt < 1e-14 * (1.0 + std::abs(xi))) {
                std::ostringstream msg;
                msg << "orbit step size underflow at xi = " << xi;
                throw StiffnessError(msg.str());
            }
        }
    } catch (const LeftHalfSpace&) {
        return finish(OrbitClass::Escape);
    } catch (const odeint::odeint_error& e) {
        throw StiffnessError(std::string("orbit integration failed: ") + e.what());
    }
}

InversionBracket inversion_speed(double a, double beta, double U1, const ShootingOptions& opt) {
    if (!(a > 0.0)) {
        throw DomainError("inversion_speed needs a > 0");
    }
    if (!(U1 > 0.0)) {
        throw DomainError("inversion_speed needs U1 > 0");
    }
    const double ag = a * crowding(U1, beta);
    const double c_star = critical_speeds(ag).upper;

    auto shoot = [&](double c) {
        const auto spec = WaveSpec::with_density(c, a, U1, beta);
        const auto out = integrate_orbit(spec, unstable_start(spec), opt.events).outcome;
        if (out.cls == OrbitClass::Inconclusive) {
            std::ostringstream msg;
            msg << "inconclusive orbit at c = " << c << " (max xi reached)";
            throw NumericalError(msg.str());
        }
        return out.cls;
    };
    auto escapes = [](OrbitClass k) { return k == OrbitClass::Escape || k == OrbitClass::HitOpposite; };

    InversionBracket b;
    b.c_lo = 1.0 + opt.lower_margin;
    b.c_hi = c_star;
    b.lo_outcome = shoot(b.c_lo);
    b.hi_outcome = shoot(b.c_hi);
    if (!escapes(b.lo_outcome) || escapes(b.hi_outcome)) {
        std::ostringstream msg;
        msg << "no shooting dichotomy on [" << b.c_lo << ", " << b.c_hi << "]: outcomes "
            << to_string(b.lo_outcome) << " and " << to_string(b.hi_outcome);
        throw ConfigError(msg.str());
    }
    while (b.width() > opt.tolerance) {
        const double c = b.mid();
        const auto k = shoot(c);
        if (escapes(k)) {
            b.c_lo = c;
            b.lo_outcome = k;
        } else {
            b.c_hi = c;
            b.hi_outcome = k;
        }
        ++b.iterations;
    }
    return b;
}

}  // namespace twave
