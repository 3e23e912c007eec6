#ifndef BCMLR_TEMPERING_HPP_
#define BCMLR_TEMPERING_HPP_

#include <string>
#include <vector>

#include "bcmlr/gibbs.hpp"

namespace bcmlr {

// Ordered temper powers t_1 < ... < t_K = 1.
struct TemperSchedule {
    std::vector<double> powers;

    // Geometric grid with t_1 ~= t_min and t_K = 1.
    static TemperSchedule geometric(int num_powers, double t_min = 0.1);

    void validate() const;
    int size() const { return static_cast<int>(powers.size()); }
};

// Mean Metropolis-Hastings rejection rate per adjacent power pair.
struct SwapReport {
    std::vector<int> attempts;    // per pair (k, k+1), 0-based
    std::vector<int> rejections;

    double rejection_rate(int pair) const {
        return attempts[static_cast<std::size_t>(pair)] == 0
                   ? 0.0
                   : static_cast<double>(rejections[static_cast<std::size_t>(pair)]) /
                         attempts[static_cast<std::size_t>(pair)];
    }
    void write_csv(const std::string& path) const;
};

// log A for a proposed swap between states at powers t_a and t_b. Priors and
// the PG factors cancel in the four-density ratio, leaving
// (t_a - t_b)(loss_a - loss_b) with the untempered loss.
double swap_log_ratio(double loss_a, double t_a, double loss_b, double t_b);

// min(1, A) for full states (spec surface; evaluates the untempered loss).
double swap_probability(const GibbsState& theta_a, double t_a,
                        const GibbsState& theta_b, double t_b,
                        const Eigen::MatrixXd& x);

struct TemperedResult {
    PosteriorDraws draws;  // taken from the t = 1 replica
    SwapReport swaps;
};

// Non-reversible parallel tempering with deterministic even-odd swaps: each
// round runs one tempered sweep per replica then attempts swaps over even
// pairs (0,1),(2,3),... on even rounds and odd pairs (1,2),(3,4),... on odd
// rounds. K = 1 reduces exactly to run_chain.
TemperedResult run_tempered(const Eigen::MatrixXd& x, int num_changepoints,
                            const GibbsConfig& config, const TemperSchedule& schedule,
                            const std::vector<std::uint8_t>& fit_mask = {});

}  // namespace bcmlr

#endif  // BCMLR_TEMPERING_HPP_
