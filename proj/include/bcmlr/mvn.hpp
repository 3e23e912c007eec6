#ifndef BCMLR_MVN_HPP_
#define BCMLR_MVN_HPP_

#include <Eigen/Dense>

#include "bcmlr/rng.hpp"

namespace bcmlr {

// Precision-form Gaussian posterior: draw ~ N(P^{-1} b, P^{-1}).
struct GaussianPosteriorSpec {
    Eigen::MatrixXd precision;    // p x p SPD
    Eigen::VectorXd linear_term;  // p
};

// Cholesky draw from N(P^{-1} b, P^{-1}). On a failed factorization, adds
// jitter 1e-10 * trace / p to the diagonal once and retries before throwing.
Eigen::VectorXd draw_gaussian(const GaussianPosteriorSpec& spec, RngStream& rng);

// Bhattacharya-style O(N^2 p) sampler for the posterior
//   N(V X'(rhs), V), V = (X' diag(omega) X + diag(prior_var)^{-1})^{-1},
// where rhs_i = omega_i c_i + delta_i is passed pre-assembled. Intended for
// p large relative to N; requires a diagonal prior and omega_i > 0.
Eigen::VectorXd draw_gaussian_fast(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& omega,
                                   const Eigen::VectorXd& rhs,
                                   const Eigen::VectorXd& prior_var_diag,
                                   RngStream& rng);

}  // namespace bcmlr

#endif  // BCMLR_MVN_HPP_
