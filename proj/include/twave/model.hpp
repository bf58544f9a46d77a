#pragma once

namespace twave {

/// Parameters of the alignment-advection-diffusion system.
///
/// `alpha` is the alignment strength, `epsilon` the diffusion coefficient and
/// `beta` the crowding parameter. After rescaling space and time by alpha the
/// system depends on the single product a = alpha * epsilon, which is always
/// recomputed from the two factors.
class ModelParams {
public:
    ModelParams() = default;
    ModelParams(double alpha, double epsilon, double beta = 0.0);

    /// Parameters of the rescaled system with diffusion `a` (alpha = 1).
    static ModelParams rescaled(double a, double beta = 0.0) { return {1.0, a, beta}; }

    double alpha() const noexcept { return alpha_; }
    double epsilon() const noexcept { return epsilon_; }
    double beta() const noexcept { return beta_; }
    double a() const noexcept { return alpha_ * epsilon_; }

private:
    double alpha_ = 1.0;
    double epsilon_ = 0.0;
    double beta_ = 0.0;
};

struct AlignmentPartials {
    double f_u;
    double f_w;
};

/// Crowding factor exp(-beta^2 u^2).
double crowding(double u, double beta);

/// Alignment kinetics f0(u, w) = w (1 - w^2/u^2) exp(-beta^2 u^2).
/// Throws DomainError for u <= 0.
double alignment(double u, double w, double beta);

/// Exact partial derivatives of f0 with respect to u and w. Throws DomainError for u <= 0.
AlignmentPartials alignment_partials(double u, double w, double beta);

/// f0 written in terms of the directional densities: 4 w u_r u_l / u^2 * crowding.
/// `w` is passed separately so callers holding u_r - u_l to higher precision keep it.
/// Defined as 0 for u below 1e-30 (empty cells in a depletion zone). Exactly odd
/// under exchanging u_r and u_l together with w -> -w.
inline double alignment_pde(double ur, double ul, double w, double crowd) noexcept {
    const double u = ur + ul;
    if (u < 1e-30) {
        return 0.0;
    }
    return w * (4.0 * (ur * ul)) / (u * u) * crowd;
}

}  // namespace twave
