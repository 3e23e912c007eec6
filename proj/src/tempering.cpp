#include "bcmlr/tempering.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <utility>

namespace bcmlr {

TemperSchedule TemperSchedule::geometric(int num_powers, double t_min) {
    if (num_powers < 1) {
        throw std::invalid_argument("TemperSchedule: need at least one power");
    }
    TemperSchedule schedule;
    schedule.powers.resize(static_cast<std::size_t>(num_powers));
    if (num_powers == 1) {
        schedule.powers[0] = 1.0;
        return schedule;
    }
    const double r = std::pow(t_min, 1.0 / (num_powers - 1));
    for (int k = 0; k < num_powers; ++k) {
        schedule.powers[static_cast<std::size_t>(k)] = std::pow(r, num_powers - 1 - k);
    }
    schedule.powers.back() = 1.0;
    return schedule;
}

void TemperSchedule::validate() const {
    if (powers.empty()) {
        throw std::invalid_argument("TemperSchedule: empty");
    }
    for (std::size_t k = 0; k < powers.size(); ++k) {
        if (!(powers[k] > 0.0 && powers[k] <= 1.0)) {
            throw std::invalid_argument("TemperSchedule: powers must lie in (0, 1]");
        }
        if (k > 0 && powers[k] <= powers[k - 1]) {
            throw std::invalid_argument("TemperSchedule: powers must be strictly increasing");
        }
    }
    if (powers.back() != 1.0) {
        throw std::invalid_argument("TemperSchedule: last power must equal 1");
    }
}

void SwapReport::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("SwapReport: cannot open " + path);
    }
    out << "pair,attempts,rejections,mean_rejection\n";
    for (std::size_t k = 0; k < attempts.size(); ++k) {
        out << k << ',' << attempts[k] << ',' << rejections[k] << ','
            << (attempts[k] == 0 ? 0.0
                                 : static_cast<double>(rejections[k]) / attempts[k])
            << '\n';
    }
}

double swap_log_ratio(double loss_a, double t_a, double loss_b, double t_b) {
    return (t_a - t_b) * (loss_a - loss_b);
}

double swap_probability(const GibbsState& theta_a, double t_a,
                        const GibbsState& theta_b, double t_b,
                        const Eigen::MatrixXd& x) {
    if (t_a == t_b) {
        throw std::invalid_argument("swap_probability: powers must differ");
    }
    const double loss_a = loss(theta_a.kappa, theta_a.betas, x);
    const double loss_b = loss(theta_b.kappa, theta_b.betas, x);
    return std::min(1.0, std::exp(swap_log_ratio(loss_a, t_a, loss_b, t_b)));
}

TemperedResult run_tempered(const Eigen::MatrixXd& x, int num_changepoints,
                            const GibbsConfig& config, const TemperSchedule& schedule,
                            const std::vector<std::uint8_t>& fit_mask) {
    schedule.validate();
    const int k_count = schedule.size();
    const int burn_in = config.resolved_burn_in();
    if (burn_in >= config.iters) {
        throw std::invalid_argument("run_tempered: burn-in must be smaller than iters");
    }

    std::vector<std::unique_ptr<GibbsSampler>> replicas;
    std::vector<RngStream> streams;
    replicas.reserve(static_cast<std::size_t>(k_count));
    for (int k = 0; k < k_count; ++k) {
        replicas.push_back(std::make_unique<GibbsSampler>(x, num_changepoints, config, fit_mask));
        streams.push_back(RngStream::derive(config.seed, static_cast<std::uint64_t>(k)));
    }
    RngStream swap_rng = RngStream::derive(config.seed, 0x5741505353ULL);

    const int s_count = (config.iters - burn_in) / config.thin;
    TemperedResult result;
    PosteriorDraws& draws = result.draws;
    draws.n = static_cast<int>(x.rows());
    draws.p = static_cast<int>(x.cols());
    draws.num_changepoints = num_changepoints;
    draws.kappa_draws.resize(s_count, num_changepoints);
    draws.beta_draws.resize(s_count, num_changepoints * draws.p);
    draws.loss_trace.resize(s_count);
    if (config.store_tau2_trace) draws.tau2_trace.resize(s_count);
    result.swaps.attempts.assign(static_cast<std::size_t>(std::max(k_count - 1, 0)), 0);
    result.swaps.rejections.assign(static_cast<std::size_t>(std::max(k_count - 1, 0)), 0);

    int s = 0;
    for (int t = 1; t <= config.iters; ++t) {
        for (int k = 0; k < k_count; ++k) {
            replicas[static_cast<std::size_t>(k)]->sweep(
                streams[static_cast<std::size_t>(k)], schedule.powers[static_cast<std::size_t>(k)]);
        }
        if (k_count > 1) {
            // DEO: even pairs on even rounds, odd pairs on odd rounds
            const int first = (t % 2 == 0) ? 0 : 1;
            for (int k = first; k + 1 < k_count; k += 2) {
                const double t_a = schedule.powers[static_cast<std::size_t>(k)];
                const double t_b = schedule.powers[static_cast<std::size_t>(k + 1)];
                const double loss_a = replicas[static_cast<std::size_t>(k)]->current_loss();
                const double loss_b = replicas[static_cast<std::size_t>(k + 1)]->current_loss();
                const double log_a = swap_log_ratio(loss_a, t_a, loss_b, t_b);
                ++result.swaps.attempts[static_cast<std::size_t>(k)];
                if (std::log(swap_rng.uniform()) < log_a) {
                    std::swap(replicas[static_cast<std::size_t>(k)]->mutable_state(),
                              replicas[static_cast<std::size_t>(k + 1)]->mutable_state());
                    replicas[static_cast<std::size_t>(k)]->sync_cache();
                    replicas[static_cast<std::size_t>(k + 1)]->sync_cache();
                } else {
                    ++result.swaps.rejections[static_cast<std::size_t>(k)];
                }
            }
        }
        if (t > burn_in && (t - burn_in - 1) % config.thin == 0 && s < s_count) {
            const GibbsState& st = replicas.back()->state();  // the t = 1 replica
            for (int l = 0; l < num_changepoints; ++l) {
                draws.kappa_draws(s, l) = st.kappa.kappas[static_cast<std::size_t>(l)];
            }
            for (int j = 0; j < num_changepoints; ++j) {
                draws.beta_draws.row(s).segment(j * draws.p, draws.p) = st.betas.betas.row(j);
            }
            draws.loss_trace[s] = replicas.back()->current_loss();
            if (config.store_tau2_trace) draws.tau2_trace[s] = st.hs.tau2;
            ++s;
        }
    }
    return result;
}

}  // namespace bcmlr
