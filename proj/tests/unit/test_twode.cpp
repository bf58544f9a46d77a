#include <doctest.h>

#include <cmath>
#include <random>

#include "../common/oracles.hpp"
#include "twave/cubic.hpp"
#include "twave/errors.hpp"
#include "twave/twode.hpp"

using namespace twave;

namespace {

bool has_root(const std::array<cplx, 3>& roots, cplx z, double tol) {
    for (const auto& r : roots) {
        if (std::abs(r - z) < tol) return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("twode") {
    TEST_CASE("cubic solver") {
        // (mu - 1)(mu + 2)(mu - 3)
        auto r = solve_cubic({-2.0, -5.0, 6.0});
        CHECK(r[0].real() == doctest::Approx(-2.0));
        CHECK(r[1].real() == doctest::Approx(1.0));
        CHECK(r[2].real() == doctest::Approx(3.0));
        // (mu + 1)(mu^2 + 4)
        r = solve_cubic({1.0, 4.0, 4.0});
        CHECK(r[0].real() == doctest::Approx(-1.0));
        CHECK(r[1] == std::conj(r[2]));
        CHECK(std::abs(r[1] - cplx(0.0, 2.0)) < 1e-12);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> U(-5.0, 5.0);
        for (int k = 0; k < 500; ++k) {
            MonicCubic p{U(rng), U(rng), U(rng)};
            for (const auto& z : solve_cubic(p)) {
                CHECK(std::abs(p(z)) / std::max(1.0, p.max_coefficient()) < 1e-9);
            }
        }
    }

    TEST_CASE("hyperbolic_rhs") {
        auto v = hyperbolic_rhs(1.0, 0.0, 2.0, 0.0);
        CHECK(v.first == 0.0);
        CHECK(v.second == 0.0);
        v = hyperbolic_rhs(1.0, 0.5, 2.0, 0.0);
        CHECK(v.first == doctest::Approx(-0.125));
        CHECK(v.second == doctest::Approx(-0.25));
        v = hyperbolic_rhs(1.0, 1.0, 0.5, 1.0);
        CHECK(v.first == 0.0);
        CHECK(v.second == 0.0);
        CHECK_THROWS_AS(hyperbolic_rhs(1.0, 0.5, 1.0, 0.0), SingularSpeedError);
        CHECK_THROWS_AS(hyperbolic_rhs(1.0, 0.5, -1.0, 0.0), SingularSpeedError);
    }

    TEST_CASE("hyperbolic trajectories are straight lines of slope 1/c") {
        for (double c : {-2.5, -0.5, 0.3, 1.7}) {
            double U = 1.0;
            double W = 0.3;
            const double U0 = U;
            const double W0 = W;
            const double h = 0.01;
            for (int k = 0; k < 200; ++k) {
                auto f = [&](double u, double w) { return hyperbolic_rhs(u, w, c, 0.0); };
                const auto k1 = f(U, W);
                const auto k2 = f(U + 0.5 * h * k1.first, W + 0.5 * h * k1.second);
                const auto k3 = f(U + 0.5 * h * k2.first, W + 0.5 * h * k2.second);
                const auto k4 = f(U + h * k3.first, W + h * k3.second);
                U += h / 6 * (k1.first + 2 * k2.first + 2 * k3.first + k4.first);
                W += h / 6 * (k1.second + 2 * k2.second + 2 * k3.second + k4.second);
            }
            REQUIRE(std::abs(W - W0) > 1e-3);
            CHECK((U - U0) / (W - W0) == doctest::Approx(1.0 / c).epsilon(1e-10));
        }
    }

    TEST_CASE("full_rhs") {
        const auto spec = WaveSpec{2.0, 1.0, 2.0, 0.0};
        auto d = full_rhs({1.3, 0.0, 0.0, 0.0}, WaveSpec{3.0, 0.2, 0.0, 0.7});
        CHECK(d.U == 0.0);
        CHECK(d.W == 0.0);
        CHECK(d.Z == 0.0);
        CHECK(d.V == 0.0);
        d = full_rhs({1.0, 0.5, 0.0, 0.0}, spec);
        CHECK(d.U == 0.0);
        CHECK(d.W == 0.0);
        CHECK(d.Z == 0.0);
        CHECK(d.V == doctest::Approx(-0.375));
        d = full_rhs({1.0, 1.0, 0.3, 0.6}, WaveSpec{2.0, 0.5, 0.0, 0.0});
        CHECK(d.U == doctest::Approx(0.3));
        CHECK(d.W == doctest::Approx(0.6));
        CHECK(d.Z == doctest::Approx(0.0).epsilon(1e-15));
        // (Z - c V - f) / a with f(1, 1) = 0
        CHECK(d.V == doctest::Approx((0.3 - 2.0 * 0.6) / 0.5));
        CHECK_THROWS_AS(full_rhs({1.0, 0.0, 0.0, 0.0}, WaveSpec{2.0, 0.0, 0.0, 0.0}), DomainError);
    }

    TEST_CASE("reduced_rhs") {
        auto d = reduced_rhs({1.7, 0.0, 0.0}, WaveSpec::with_density(2.5, 0.3, 1.7, 0.4));
        CHECK(d.U == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(d.W == 0.0);
        CHECK(d.V == doctest::Approx(0.0).epsilon(1e-14));
        d = reduced_rhs({1.0, 0.5, 0.0}, WaveSpec{2.0, 1.0, 2.0, 0.0});
        CHECK(d.U == doctest::Approx(0.5));
        CHECK(d.W == 0.0);
        CHECK(d.V == doctest::Approx(0.125));
        d = reduced_rhs({2.0, 2.0, 0.0}, WaveSpec{2.0, 1.0, 2.0, 0.0});
        CHECK(d.U == 0.0);
        CHECK(d.W == 0.0);
        CHECK(d.V == 0.0);
        CHECK_THROWS_AS(reduced_rhs({1.0, 0.0, 0.0}, WaveSpec{2.0, -1.0, 2.0, 0.0}), DomainError);
    }

    TEST_CASE("reduced equilibria are the mass-balance states") {
        for (double c : {1.2, 1.8, 3.0}) {
            const auto spec = WaveSpec::with_density(c, 0.15, 1.4, 0.3);
            const double U2 = 1.4 * c / (c + 1.0);
            const double U3 = 1.4 * c / (c - 1.0);
            for (const auto& s : {ReducedState{1.4, 0.0, 0.0}, ReducedState{U2, -U2, 0.0}, ReducedState{U3, U3, 0.0}}) {
                const auto d = reduced_rhs(s, spec);
                CHECK(std::abs(d.U) < 1e-12);
                CHECK(std::abs(d.V) < 1e-10);
            }
        }
    }

    TEST_CASE("slow manifold and layer equilibrium") {
        auto z = slow_manifold_lift(1.0, 0.0, 2.0, 0.0);
        CHECK(z.first == 0.0);
        CHECK(z.second == 0.0);
        z = slow_manifold_lift(1.0, 0.5, 2.0, 0.0);
        CHECK(z.first == doctest::Approx(-0.125));
        CHECK(z.second == doctest::Approx(-0.25));
        z = slow_manifold_lift(3.0, -3.0, 0.5, 1.0);
        CHECK(z.first == 0.0);
        CHECK(z.second == 0.0);
        z = layer_equilibrium(1.0, 0.5, 2.0, 0.0);
        CHECK(z.first == doctest::Approx(-0.125));
        CHECK(z.second == doctest::Approx(-0.25));
        z = layer_equilibrium(1.0, 0.0, 5.0, 0.2);
        CHECK(z.first == 0.0);
        CHECK(z.second == 0.0);
        z = layer_equilibrium(2.0, 1.0, 3.0, 0.0);
        CHECK(z.first == doctest::Approx(-0.09375));
        CHECK(z.second == doctest::Approx(-0.28125));
        CHECK_THROWS_AS(slow_manifold_lift(1.0, 0.5, 1.0, 0.0), SingularSpeedError);
        CHECK_THROWS_AS(layer_equilibrium(1.0, 0.5, -1.0, 0.0), SingularSpeedError);
    }

    TEST_CASE("points of the critical manifold are layer equilibria") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> Ud(0.1, 4.0), sd(-1.0, 1.0), cd(-3.0, 3.0), ad(0.01, 1.0);
        for (int k = 0; k < 300; ++k) {
            const double U = Ud(rng);
            const double W = sd(rng) * U;
            double c = cd(rng);
            if (std::abs(std::abs(c) - 1.0) < 1e-3) c += 0.1;
            const double beta = 0.5 * (sd(rng) + 1.0);
            const auto zv = slow_manifold_lift(U, W, c, beta);
            const auto d = full_rhs({U, W, zv.first, zv.second}, WaveSpec{c, ad(rng), 0.0, beta});
            const double scale = std::max(1.0, std::abs(alignment(U, W, beta)));
            CHECK(std::abs(d.Z) / scale < 1e-12 * 1e2);
            CHECK(std::abs(d.V) / scale < 1e-12 * 1e2);
        }
    }

    TEST_CASE("layer eigenvalues") {
        auto e = layer_eigenvalues(2.0);
        CHECK(e.first == -1.0);
        CHECK(e.second == -3.0);
        e = layer_eigenvalues(0.0);
        CHECK(e.first == 1.0);
        CHECK(e.second == -1.0);
        e = layer_eigenvalues(-2.0);
        CHECK(e.first == 3.0);
        CHECK(e.second == 1.0);
    }

    TEST_CASE("characteristic cubic examples") {
        for (double c : {-2.0, -0.4, 0.7, 2.5}) {
            const auto cs = characteristic_cubic(c, 0.0, 0.0, 1.0);
            const auto r = solve_cubic(cs.poly);
            CHECK(has_root(r, 0.0, 1e-12));
            CHECK(has_root(r, 1.0 - c, 1e-12));
            CHECK(has_root(r, -1.0 - c, 1e-12));
        }
        auto r = solve_cubic(characteristic_cubic(0.6, 1.28, 0.0, 1.0).poly);
        CHECK(has_root(r, cplx(0.0, 0.8), 1e-9));
        CHECK(has_root(r, cplx(0.0, -0.8), 1e-9));
        r = solve_cubic(characteristic_cubic(2.0, 1.0, 2.0, -2.0).poly);
        CHECK(has_root(r, -1.0, 1e-12));
        CHECK(has_root(r, -(3.0 + std::sqrt(17.0)) / 2.0, 1e-12));
        CHECK(has_root(r, -(3.0 - std::sqrt(17.0)) / 2.0, 1e-12));
    }

    TEST_CASE("cubic expansion reproduces the defining product") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> d(-2.0, 2.0);
        for (int k = 0; k < 100; ++k) {
            const double c = d(rng), a = 0.5 * (d(rng) + 2.0), fu = d(rng), fw = d(rng);
            const auto cs = characteristic_cubic(c, a, fu, fw);
            for (double mu : {-1.3, 0.0, 0.4, 2.2}) {
                const double direct = mu * (mu + c) * (mu + c) + (a * fw - 1.0) * (mu + c) + c + a * fu;
                CHECK(cs.poly(mu).real() == doctest::Approx(direct).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("outer eigenvalues") {
        auto e = outer_eigenvalues(2.0, 1.0, 1.0, 0.0, PolarizedSide::Plus);
        CHECK(e[0] == doctest::Approx(-1.0));
        CHECK(e[1] == doctest::Approx(-(3.0 - std::sqrt(17.0)) / 2.0));
        CHECK(e[2] == doctest::Approx(-(3.0 + std::sqrt(17.0)) / 2.0));
        e = outer_eigenvalues(2.0, 1.0, 1.0, 0.0, PolarizedSide::Minus);
        CHECK(e[0] == doctest::Approx(-3.0));
        CHECK(e[1] == doctest::Approx(1.0));
        CHECK(e[2] == doctest::Approx(-2.0));
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> cd(-3.0, 3.0), ad(1e-3, 1.0), Ud(0.2, 3.0), bd(0.0, 1.0);
        for (int k = 0; k < 200; ++k) {
            const double c = cd(rng), a = ad(rng), U = Ud(rng), b = bd(rng);
            for (auto side : {PolarizedSide::Plus, PolarizedSide::Minus}) {
                const auto ev = outer_eigenvalues(c, a, U, b, side);
                CHECK(ev[1] * ev[2] < 0.0);
                const double W = side == PolarizedSide::Plus ? U : -U;
                const auto p = alignment_partials(U, W, b);
                const auto roots = solve_cubic(characteristic_cubic(c, a, p.f_u, p.f_w).poly);
                CHECK(oracle::root_distance({ev[0], ev[1], ev[2]}, roots) < 1e-10);
            }
        }
    }

    TEST_CASE("cubic roots match the Jacobian eigenvalues at all equilibrium families") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> cd(-3.0, 3.0), ad(1e-3, 1.0), Ud(0.2, 3.0), bd(0.0, 1.0);
        for (int k = 0; k < 200; ++k) {
            double c = cd(rng);
            const double a = ad(rng), U = Ud(rng), b = bd(rng);
            for (double W : {0.0, U, -U}) {
                const auto p = alignment_partials(U, W, b);
                const auto roots = solve_cubic(characteristic_cubic(c, a, p.f_u, p.f_w).poly);
                const auto J = oracle::scaled_jacobian(c, a, U, W, b);
                CHECK(oracle::root_distance(roots, oracle::eigenvalues(J)) < 1e-8);
                // The assembled Jacobian agrees with differencing the right-hand side.
                const double C1 = c * U - W;
                const auto Jfd = oracle::fd_scaled_jacobian(WaveSpec{c, a, C1, b}, {U, W, 0.0});
                CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, J.cwiseAbs().maxCoeff()));
            }
        }
    }

    TEST_CASE("classify_equilibrium") {
        auto e = classify_equilibrium(2.0, 1e-9);
        CHECK(e.region == EigenRegion::AllReal);
        CHECK(e.re_sign[0] == -1);
        CHECK(e.re_sign[1] == -1);
        CHECK(e.re_sign[2] == 0);  // the slow root sits at rounding level of 0
        e = classify_equilibrium(2.0, 0.0);
        CHECK(e.sign_pattern() == "-,-,0");
        e = classify_equilibrium(1.05, 0.5);
        CHECK(e.region == EigenRegion::ComplexPair);
        for (double c : {0.2, 0.5, 0.9}) {
            e = classify_equilibrium(c, 2.0 * (1.0 - c * c));
            CHECK(e.region == EigenRegion::ComplexPair);
            CHECK(e.re_sign[1] == 0);
            CHECK(e.re_sign[2] == 0);
        }
        CHECK_THROWS_AS(classify_equilibrium(1.0, 0.1), SingularSpeedError);
        CHECK_THROWS_AS(classify_equilibrium(-1.0, 0.1), SingularSpeedError);
        CHECK_THROWS_AS(classify_equilibrium(0.0, 0.1), SingularSpeedError);
    }

    TEST_CASE("critical speeds") {
        const auto small = critical_speeds(1e-8);
        CHECK(small.upper == doctest::Approx(1.0).epsilon(1e-3));
        REQUIRE(small.lower);
        CHECK(*small.lower == doctest::Approx(1.0).epsilon(1e-3));
        double prev = 1.0;
        for (double ag = 1e-3; ag <= 1.0 + 1e-12; ag *= 1.2) {
            const double c = critical_speeds(ag).upper;
            CHECK(c > prev);
            prev = c;
        }
        CHECK_FALSE(critical_speeds(1.5).lower);
        CHECK_THROWS_AS(critical_speeds(0.0), DomainError);
        CHECK_THROWS_AS(critical_speeds(-1.0), DomainError);
    }

    TEST_CASE("c* at ag = 0.25 agrees with a dense scan") {
        const double ag = 0.25;
        const double h = 1e-6;
        double last_complex = 1.0;
        for (long k = 1; k <= 2000000; ++k) {
            const double c = 1.0 + k * h;
            if (classify_equilibrium(c, ag).region == EigenRegion::ComplexPair) last_complex = c;
        }
        CHECK(std::abs(critical_speeds(ag).upper - (last_complex + 0.5 * h)) < 1e-5);
    }

    TEST_CASE("c* is the minimal linear spreading speed") {
        // Independent characterization: min over lambda of a lambda + (1 + sqrt(1 + 4 lambda^2)) / (2 lambda).
        for (double a : {0.05, 0.1, 0.2, 0.5}) {
            double best = 1e300;
            for (double l = 1e-3; l < 50.0; l *= 1.0001) {
                best = std::min(best, a * l + (1.0 + std::sqrt(1.0 + 4.0 * l * l)) / (2.0 * l));
            }
            CHECK(critical_speeds(a).upper == doctest::Approx(best).epsilon(1e-6));
        }
    }

    TEST_CASE("hopf locus") {
        auto h = hopf_locus(0.6);
        CHECK(h.a == doctest::Approx(1.28));
        CHECK(h.omega == doctest::Approx(0.8));
        h = hopf_locus(0.8);
        CHECK(h.a == doctest::Approx(0.72));
        CHECK(h.omega == doctest::Approx(0.6));
        CHECK(hopf_locus(1.0 - 1e-9).a < 1e-8);
        for (double c = 0.05; c < 1.0; c += 0.05) {
            const auto p = hopf_locus(c);
            const auto cs = characteristic_cubic(c, p.a, 0.0, 1.0);
            CHECK(std::abs(cs.poly(cplx(0.0, p.omega))) < 1e-9);
            CHECK(p.omega * p.omega == doctest::Approx(1.0 - c * c).epsilon(1e-12));
        }
        CHECK_THROWS_AS(hopf_locus(0.0), DomainError);
        CHECK_THROWS_AS(hopf_locus(1.0), DomainError);
    }

    TEST_CASE("expected connection") {
        CHECK(expected_connection(2.0) == ConnectionCase::MinusToZero);
        CHECK(expected_connection(0.5) == ConnectionCase::ZeroToMinus);
        CHECK(expected_connection(-2.0) == ConnectionCase::ZeroToPlus);
        CHECK(expected_connection(-0.5) == ConnectionCase::PlusToZero);
        CHECK_THROWS_AS(expected_connection(1.0), SingularSpeedError);
        CHECK_THROWS_AS(expected_connection(0.0), SingularSpeedError);
        CHECK_THROWS_AS(expected_connection(-1.0), SingularSpeedError);
    }

    TEST_CASE("plateau and inversion relations") {
        auto p = plateau_relations(2.0, 1.0);
        CHECK(p.U2 == doctest::Approx(2.0 / 3.0));
        CHECK(p.U3 == doctest::Approx(2.0));
        p = plateau_relations(1e12, 1.0);
        CHECK(p.U2 == doctest::Approx(1.0));
        CHECK(p.U3 == doctest::Approx(1.0));
        p = plateau_relations(INFINITY, 1.0);
        CHECK(p.U2 == 1.0);
        CHECK(p.U3 == 1.0);
        p = plateau_relations(1.5, 2.0);
        CHECK(p.U2 == doctest::Approx(1.2));
        CHECK(p.U3 == doctest::Approx(6.0));
        // Flux balance: c U1 swallowed, (c - 1) U3 left behind.
        CHECK(1.5 * 2.0 == doctest::Approx((1.5 - 1.0) * p.U3));
        CHECK_THROWS_AS(plateau_relations(1.0, 1.0), DomainError);
        CHECK(inversion_relation(1.5, 1.0) == doctest::Approx(0.2));
        CHECK(inversion_relation(3.0, 2.0) == doctest::Approx(1.0));
        CHECK(inversion_relation(1.0 + 1e-12, 1.0) < 1e-11);
        CHECK_THROWS_AS(inversion_relation(1.0, 1.0), DomainError);
    }
}
