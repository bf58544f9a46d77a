#include "twave/model.hpp"

#include <cmath>
#include <string>

#include "twave/errors.hpp"

namespace twave {

ModelParams::ModelParams(double alpha, double epsilon, double beta)
    : alpha_(alpha), epsilon_(epsilon), beta_(beta) {
    for (double v : {alpha, epsilon, beta}) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ConfigError("model parameters must be finite and non-negative");
        }
    }
}

double crowding(double u, double beta) {
    return beta == 0.0 ? 1.0 : std::exp(-beta * beta * u * u);
}

namespace {
void require_positive_density(double u) {
    if (!(u > 0.0)) {
        throw DomainError("alignment term requires u > 0, got u = " + std::to_string(u));
    }
}
}  // namespace

double alignment(double u, double w, double beta) {
    require_positive_density(u);
    return w * ((u - w) * (u + w)) / (u * u) * crowding(u, beta);
}

AlignmentPartials alignment_partials(double u, double w, double beta) {
    require_positive_density(u);
    const double g = crowding(u, beta);
    const double r = w / u;
    const double shape = w * (1.0 - r * r);
    // d/du [w (1 - w^2/u^2)] = 2 w^3 / u^3 ; d/du g = -2 beta^2 u g
    const double f_u = 2.0 * r * r * r * g - 2.0 * beta * beta * u * shape * g;
    const double f_w = (1.0 - 3.0 * r * r) * g;
    return {f_u, f_w};
}

}  // namespace twave
