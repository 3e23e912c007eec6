#include "bcmlr/mvn.hpp"

#include <sstream>
#include <stdexcept>

namespace bcmlr {

namespace {

Eigen::VectorXd standard_normal(Eigen::Index n, RngStream& rng) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        z[i] = rng.normal();
    }
    return z;
}

}  // namespace

Eigen::VectorXd draw_gaussian(const GaussianPosteriorSpec& spec, RngStream& rng) {
    const Eigen::Index p = spec.precision.rows();
    if ((spec.precision - spec.precision.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
        throw std::invalid_argument("draw_gaussian: precision not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(spec.precision);
    if (llt.info() != Eigen::Success) {
        const double jitter = 1e-10 * spec.precision.trace() / static_cast<double>(p);
        Eigen::MatrixXd bumped = spec.precision;
        bumped.diagonal().array() += jitter;
        llt.compute(bumped);
        if (llt.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "draw_gaussian: precision not positive definite (trace="
                << spec.precision.trace() << ", p=" << p << ")";
            throw std::runtime_error(msg.str());
        }
    }
    const Eigen::VectorXd mean = llt.solve(spec.linear_term);
    // draw = mean + L^{-T} z, L the lower Cholesky factor of the precision
    const Eigen::VectorXd z = standard_normal(p, rng);
    return mean + llt.matrixU().solve(z);
}

Eigen::VectorXd draw_gaussian_fast(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& omega,
                                   const Eigen::VectorXd& rhs,
                                   const Eigen::VectorXd& prior_var_diag,
                                   RngStream& rng) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if ((omega.array() <= 0.0).any()) {
        throw std::invalid_argument("draw_gaussian_fast: omega must be strictly positive");
    }
    if ((prior_var_diag.array() <= 0.0).any()) {
        throw std::invalid_argument("draw_gaussian_fast: prior variances must be positive");
    }
    const Eigen::VectorXd sqrt_omega = omega.array().sqrt();
    // phi = Omega^{1/2} X, alpha = Omega^{-1/2} rhs so that phi' alpha = X' rhs
    const Eigen::MatrixXd phi = sqrt_omega.asDiagonal() * x;
    const Eigen::VectorXd alpha = rhs.array() / sqrt_omega.array();

    Eigen::VectorXd u(p);
    for (Eigen::Index d = 0; d < p; ++d) {
        u[d] = std::sqrt(prior_var_diag[d]) * rng.normal();
    }
    const Eigen::VectorXd f = standard_normal(n, rng);
    const Eigen::VectorXd v = phi * u + f;

    Eigen::MatrixXd m = phi * prior_var_diag.asDiagonal() * phi.transpose();
    m.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("draw_gaussian_fast: capacitance matrix not SPD");
    }
    const Eigen::VectorXd w = llt.solve(alpha - v);
    return u + prior_var_diag.asDiagonal() * (phi.transpose() * w);
}

}  // namespace bcmlr
