#ifndef BCMLR_GIBBS_HPP_
#define BCMLR_GIBBS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bcmlr/data_model.hpp"
#include "bcmlr/model_core.hpp"
#include "bcmlr/rng.hpp"

namespace bcmlr {

enum class KappaPriorKind { kSegmentLength, kUniform };

struct GibbsConfig {
    int iters = 5000;
    int burn_in = -1;  // -1: iters / 2
    int thin = 1;
    int min_seg = 1;
    std::vector<int> init_kappa;  // empty: evenly spaced
    PriorSpec prior = PriorSpec{};  // Gaussian with empty mean resolves to N(0, 3I)
    KappaPriorKind kappa_prior = KappaPriorKind::kSegmentLength;
    std::uint64_t seed = 0;
    bool update_kappa = true;  // false: fixed-kappa multinomial logistic regression
    bool store_tau2_trace = false;
    double fast_path_ratio = 1.0;  // fast beta sampler when p > ratio * n_fit

    int resolved_burn_in() const { return burn_in < 0 ? iters / 2 : burn_in; }
};

struct PosteriorDraws {
    Eigen::MatrixXi kappa_draws;  // S x L
    Eigen::MatrixXd beta_draws;   // S x (J-1)p, class-major flattening
    Eigen::VectorXd loss_trace;   // S
    Eigen::VectorXd tau2_trace;   // S when requested, else empty
    int n = 0;
    int p = 0;
    int num_changepoints = 0;

    int num_draws() const { return static_cast<int>(kappa_draws.rows()); }
    int num_classes() const { return num_changepoints + 1; }

    // beta_{dj} draws for free class j in {1..J-1}, dimension d in {1..p}
    Eigen::VectorXd beta_column(int j, int d) const {
        return beta_draws.col((j - 1) * p + (d - 1));
    }
};

// Complete augmented state of one chain.
struct GibbsState {
    ChangepointVector kappa;
    CoefficientSet betas;   // J x p, row J fixed at zero
    Eigen::MatrixXd omega;  // N x (J-1)
    HorseshoeState hs;      // meaningful under the horseshoe prior only
};

// Full conditional of kappa_l given everything else, restricted to the
// min-seg support {kappa_{l-1}+m, ..., kappa_{l+1}-m}. Returns the
// normalized probability vector; support_lo receives the first support
// point. kappa_prior selects the segment-length prior or a flat prior,
// power tempers the likelihood factor, fit_mask (empty = all rows) drops
// held-out rows from the likelihood.
Eigen::VectorXd kappa_full_conditional(int l, const ChangepointVector& kappa,
                                       const CoefficientSet& betas,
                                       const Eigen::MatrixXd& x, int min_seg,
                                       int* support_lo = nullptr,
                                       KappaPriorKind kappa_prior = KappaPriorKind::kSegmentLength,
                                       double power = 1.0,
                                       const std::vector<std::uint8_t>& fit_mask = {});

// One chain of the Polya-Gamma-augmented Gibbs sampler. Also the local
// exploration kernel for parallel tempering (sweep with power < 1).
class GibbsSampler {
public:
    GibbsSampler(const Eigen::MatrixXd& x, int num_changepoints, const GibbsConfig& config,
                 std::vector<std::uint8_t> fit_mask = {});

    // One full sweep kappa -> omega -> beta (-> horseshoe hyperparameters)
    // against the posterior tempered to the given power.
    void sweep(RngStream& rng, double power = 1.0);

    const GibbsState& state() const { return state_; }
    GibbsState& mutable_state() { return state_; }

    // Re-derive the cached logits after the state was replaced externally
    // (parallel-tempering swaps exchange full augmented states).
    void sync_cache() { refresh_logits(); }

    // Untempered loss over the fitting rows at the current state.
    double current_loss() const;

    const GibbsConfig& config() const { return config_; }
    int num_fit_rows() const { return n_fit_; }

private:
    void refresh_logits();
    void step_kappa(RngStream& rng, double power);
    void step_omega(RngStream& rng, double power);
    void step_beta(RngStream& rng, double power);
    void step_horseshoe(RngStream& rng);

    const Eigen::MatrixXd& x_;
    GibbsConfig config_;
    int num_changepoints_;
    int num_classes_;
    std::vector<std::uint8_t> fit_mask_;
    int n_fit_ = 0;
    GibbsState state_;
    Eigen::MatrixXd logits_;  // N x J, kept in sync with state_.betas
    Eigen::MatrixXd prior_precision_;     // Gaussian prior only
    Eigen::VectorXd prior_precision_mean_;  // V0^{-1} m0
};

// Evenly spaced initialization kappa_l = round(l N / (L+1)), projected to the
// nearest min-seg-feasible configuration.
ChangepointVector even_init(int n, int num_changepoints, int min_seg);

// Run one chain; draws are recorded after burn-in with thinning.
PosteriorDraws run_chain(const Eigen::MatrixXd& x, int num_changepoints,
                         const GibbsConfig& config,
                         const std::vector<std::uint8_t>& fit_mask = {});

// Single-changepoint sampler (logistic loss, post-change class coded 1).
// config.kappa_prior selects the segment-length prior (default) or uniform.
PosteriorDraws run_bclr(const Eigen::MatrixXd& x, const GibbsConfig& config);

}  // namespace bcmlr

#endif  // BCMLR_GIBBS_HPP_
