#ifndef BCMLR_SELECTION_HPP_
#define BCMLR_SELECTION_HPP_

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "bcmlr/gibbs.hpp"

namespace bcmlr {

enum class AucCiMethod { kDeLong, kBootstrap };

struct SelectionConfig {
    int l_fitted = 5;
    double alpha = 0.05;  // CI level 1 - alpha
    double tau = 0.5;     // AUC threshold
    int zeta = 5;         // holdout stride, every zeta-th observation held out
    bool refit = true;
    AucCiMethod ci_method = AucCiMethod::kDeLong;
    bool score_all_points = false;  // sensitivity option: score on all window rows
    int bootstrap_resamples = 2000;
};

struct SelectionResult {
    std::vector<int> l_true_draws;            // per stored draw, in [0, L_fitted]
    std::vector<double> posterior_pmf;        // index l = P(L_true = l)
    int l_hat = 0;                            // posterior mode; ties -> smallest
    std::vector<double> acceptance_rates;     // mean R_l per fitted changepoint
    PosteriorDraws fit_draws;                 // holdout fit
    std::optional<PosteriorDraws> refit_draws;  // full-data refit at l_hat
};

// Mann-Whitney AUC; ties count 1/2. Throws std::invalid_argument when a
// class is missing.
double auc(const std::vector<int>& labels, const std::vector<double>& scores);

struct AucCi {
    double auc = 0.0;
    double lower = 0.0;
    bool degenerate = false;  // zero-variance estimate, lower == auc
};

// Lower endpoint of the two-sided (1-alpha) DeLong interval, clamped to [0, 1].
AucCi auc_ci_lower(const std::vector<int>& labels, const std::vector<double>& scores,
                   double alpha);

// Stratified-bootstrap alternative (percentile lower bound).
AucCi auc_ci_lower_bootstrap(const std::vector<int>& labels,
                             const std::vector<double>& scores, double alpha,
                             int resamples, RngStream& rng);

struct ChangepointScore {
    double auc_lower = 0.0;
    int indicator = 0;  // R_l
};

// Score fitted changepoint l (1-based) of one posterior draw: held-out rows
// of the two neighboring segments are labeled 0/1 and scored with
// q~_{i,l+1} = q_{l+1} / (q_l + q_{l+1}); R_l = 1 iff the AUC lower bound
// exceeds tau. Missing a held-out class yields R_l = 0.
ChangepointScore score_changepoint(int l, const Eigen::VectorXi& kappa_row,
                                   const Eigen::MatrixXd& betas_free,
                                   const Eigen::MatrixXd& x,
                                   const std::vector<std::uint8_t>& holdout_mask,
                                   const SelectionConfig& config, RngStream& rng);

// Held-out indices are {zeta, 2 zeta, ...} (1-based); mask entry 1 = used for
// fitting, 0 = held out.
std::vector<std::uint8_t> holdout_fit_mask(int n, int zeta);

// Full selection pipeline: fit L_fitted changepoints on the non-held-out
// rows, score every draw, report the posterior pmf of the count of confirmed
// changepoints, and (optionally) refit on all data with L = l_hat.
SelectionResult select_num_changepoints(const Eigen::MatrixXd& x,
                                        const SelectionConfig& config,
                                        const GibbsConfig& gibbs);

}  // namespace bcmlr

#endif  // BCMLR_SELECTION_HPP_
