#include <doctest.h>

#include <cmath>

#include "twave/errors.hpp"
#include "twave/model.hpp"

using namespace twave;

TEST_SUITE("model") {
    TEST_CASE("params recompute a from alpha and epsilon") {
        ModelParams p(4.0, 0.025, 0.5);
        CHECK(p.a() == 4.0 * 0.025);
        CHECK(ModelParams::rescaled(0.2).a() == 0.2);
        CHECK_THROWS_AS(ModelParams(-1.0, 0.1), ConfigError);
        CHECK_THROWS_AS(ModelParams(1.0, NAN), ConfigError);
        CHECK_THROWS_AS(ModelParams(1.0, 0.1, -0.1), ConfigError);
    }

    TEST_CASE("alignment values") {
        CHECK(alignment(1.0, 0.0, 0.3) == 0.0);
        CHECK(alignment(2.0, 2.0, 1.0) == 0.0);
        CHECK(alignment(1.0, 0.5, 0.0) == doctest::Approx(0.375).epsilon(1e-15));
        CHECK(alignment(3.0, -3.0, 0.0) == 0.0);
        CHECK_THROWS_AS(alignment(0.0, 0.0, 0.0), DomainError);
        CHECK_THROWS_AS(alignment(-1.0, 0.0, 0.0), DomainError);
    }

    TEST_CASE("alignment partials at equilibria") {
        auto p = alignment_partials(1.0, 0.0, 0.0);
        CHECK(p.f_u == 0.0);
        CHECK(p.f_w == 1.0);
        p = alignment_partials(1.0, 1.0, 0.0);
        CHECK(p.f_u == doctest::Approx(2.0));
        CHECK(p.f_w == doctest::Approx(-2.0));
        p = alignment_partials(2.0, -2.0, 1.0);
        CHECK(p.f_u == doctest::Approx(-2.0 * std::exp(-4.0)).epsilon(1e-14));
        CHECK(p.f_w == doctest::Approx(-2.0 * std::exp(-4.0)).epsilon(1e-14));
        CHECK_THROWS_AS(alignment_partials(0.0, 0.0, 0.0), DomainError);
    }

    TEST_CASE("odd in w and sign condition") {
        for (double beta : {0.0, 0.5, 1.0}) {
            for (double u = 0.1; u <= 5.0; u += 0.37) {
                for (double s = -1.0; s <= 1.0; s += 0.05) {
                    const double w = s * u;
                    CHECK(alignment(u, -w, beta) == -alignment(u, w, beta));
                    if (w > 0) CHECK(alignment(u, w, beta) >= 0.0);
                    if (w < 0) CHECK(alignment(u, w, beta) <= 0.0);
                }
            }
        }
    }

    TEST_CASE("partials agree with central differences") {
        double worst = 0.0;
        for (double beta : {0.0, 0.5, 1.0}) {
            for (double u = 0.1; u <= 5.0; u += 0.1) {
                for (double s = -0.95; s <= 0.951; s += 0.05) {
                    const double w = s * u;
                    const double h = 1e-6 * u;
                    const auto p = alignment_partials(u, w, beta);
                    const double fu = (alignment(u + h, w, beta) - alignment(u - h, w, beta)) / (2 * h);
                    const double fw = (alignment(u, w + h, beta) - alignment(u, w - h, beta)) / (2 * h);
                    const double scale = std::max({std::abs(p.f_u), std::abs(p.f_w), 1e-3});
                    worst = std::max({worst, std::abs(fu - p.f_u) / scale, std::abs(fw - p.f_w) / scale});
                }
            }
        }
        CHECK(worst < 1e-6);
    }

    TEST_CASE("pde form matches and vanishes in empty cells") {
        for (double u : {0.3, 1.0, 4.0}) {
            for (double s : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
                const double w = s * u;
                const double ur = 0.5 * (u + w);
                const double ul = 0.5 * (u - w);
                CHECK(alignment_pde(ur, ul, w, crowding(u, 0.7)) ==
                      doctest::Approx(alignment(u, w, 0.7)).epsilon(1e-13));
                CHECK(alignment_pde(ul, ur, -w, 1.0) == -alignment_pde(ur, ul, w, 1.0));
            }
        }
        CHECK(alignment_pde(1e-31, 0.0, 1e-31, 1.0) == 0.0);
        CHECK(alignment_pde(0.0, 0.0, 0.0, 1.0) == 0.0);
    }
}
