#ifndef BCMLR_MODEL_CORE_HPP_
#define BCMLR_MODEL_CORE_HPP_

#include <Eigen/Dense>

#include "bcmlr/data_model.hpp"

namespace bcmlr {

// J x p regression coefficients; the reference class J is pinned to zero and
// never updated.
struct CoefficientSet {
    Eigen::MatrixXd betas;

    int num_classes() const { return static_cast<int>(betas.rows()); }
    int dim() const { return static_cast<int>(betas.cols()); }

    static CoefficientSet zeros(int num_classes, int dim) {
        return CoefficientSet{Eigen::MatrixXd::Zero(num_classes, dim)};
    }
};

enum class PriorKind { kGaussian, kHorseshoe };

// Prior on the non-reference coefficient vectors. The Gaussian prior is
// shared across classes; the horseshoe prior has no fixed hyperparameters.
struct PriorSpec {
    PriorKind kind = PriorKind::kGaussian;
    Eigen::VectorXd gaussian_mean;  // m_0
    Eigen::MatrixXd gaussian_cov;   // V_0, SPD

    static PriorSpec gaussian(int dim, double variance = 3.0) {
        PriorSpec spec;
        spec.kind = PriorKind::kGaussian;
        spec.gaussian_mean = Eigen::VectorXd::Zero(dim);
        spec.gaussian_cov = variance * Eigen::MatrixXd::Identity(dim, dim);
        return spec;
    }

    static PriorSpec horseshoe() {
        PriorSpec spec;
        spec.kind = PriorKind::kHorseshoe;
        return spec;
    }
};

// Augmented state of the horseshoe prior: local scales lambda^2 and their
// auxiliaries nu, (J-1) x p, plus the global scale tau^2 and auxiliary xi.
struct HorseshoeState {
    Eigen::MatrixXd lambda2;
    Eigen::MatrixXd nu;
    double tau2 = 1.0;
    double xi = 1.0;

    static HorseshoeState ones(int num_free_classes, int dim) {
        HorseshoeState hs;
        hs.lambda2 = Eigen::MatrixXd::Ones(num_free_classes, dim);
        hs.nu = Eigen::MatrixXd::Ones(num_free_classes, dim);
        return hs;
    }
};

// Softmax class probabilities q_i for one observation, max-subtracted.
Eigen::VectorXd class_probs(const Eigen::VectorXd& x_i, const CoefficientSet& betas);

// Multinomial-product loss -sum_i log q_{i, class(i)}.
double loss(const ChangepointVector& kappa, const CoefficientSet& betas,
            const Eigen::MatrixXd& x);

// Linearized logit eta_{ij} = x_i' beta_j - log sum_{k != j} exp(x_i' beta_k).
double eta(const Eigen::VectorXd& x_i, const CoefficientSet& betas, int j);

// Offset c_{ij} = log sum_{k != j} exp(x_i' beta_k); eta + c = x_i' beta_j.
double c_offset(const Eigen::VectorXd& x_i, const CoefficientSet& betas, int j);

// Log of the unnormalized segment-length prior
// prod_j (1 / (kappa_j - kappa_{j-1}))^(kappa_j - kappa_{j-1}).
double kappa_log_prior(const ChangepointVector& kappa);

// Single-changepoint variant: -kappa log kappa - (N - kappa) log(N - kappa).
double bclr_kappa_log_prior(int kappa, int n);

// Alternative eta-form of the loss, -sum_{ij} [eta_ij y_ij - log(1 + e^eta_ij)];
// equals loss() up to roundoff and is kept as the cross-identity check.
double loss_eta_form(const ChangepointVector& kappa, const CoefficientSet& betas,
                     const Eigen::MatrixXd& x);

}  // namespace bcmlr

#endif  // BCMLR_MODEL_CORE_HPP_
