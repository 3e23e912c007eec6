#include "bcmlr/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bcmlr/mvn.hpp"
#include "bcmlr/polya_gamma.hpp"

namespace bcmlr {

namespace {

double log_sum_exp_row(const Eigen::RowVectorXd& v) {
    const double m = v.maxCoeff();
    return m + std::log((v.array() - m).exp().sum());
}

double log_sum_exp_row_excluding(const Eigen::RowVectorXd& v, int skip) {
    double m = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < v.size(); ++k) {
        if (k != skip && v[k] > m) m = v[k];
    }
    double s = 0.0;
    for (int k = 0; k < v.size(); ++k) {
        if (k != skip) s += std::exp(v[k] - m);
    }
    return m + std::log(s);
}

int sample_categorical(const Eigen::VectorXd& probs, RngStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u <= acc) return k;
    }
    return static_cast<int>(probs.size()) - 1;
}

constexpr double kScaleFloor = 1e-12;

}  // namespace

Eigen::VectorXd kappa_full_conditional(int l, const ChangepointVector& kappa,
                                       const CoefficientSet& betas,
                                       const Eigen::MatrixXd& x, int min_seg,
                                       int* support_lo, KappaPriorKind kappa_prior,
                                       double power,
                                       const std::vector<std::uint8_t>& fit_mask) {
    const int left = kappa.boundary(l - 1);
    const int right = kappa.boundary(l + 1);
    const int lo = left + min_seg;
    const int hi = right - min_seg;
    if (lo > hi) {
        throw std::runtime_error("kappa_full_conditional: empty support");
    }
    if (support_lo != nullptr) {
        *support_lo = lo;
    }

    // per-row log class probabilities for classes l and l+1 over the window
    const int window = right - left;
    Eigen::VectorXd prefix_a(window + 1);  // cumulative log q_{i,l}
    Eigen::VectorXd prefix_b(window + 1);  // cumulative log q_{i,l+1}
    prefix_a[0] = 0.0;
    prefix_b[0] = 0.0;
    for (int i = left + 1; i <= right; ++i) {
        const int w = i - left;
        double log_qa = 0.0;
        double log_qb = 0.0;
        if (fit_mask.empty() || fit_mask[static_cast<std::size_t>(i - 1)] != 0) {
            const Eigen::RowVectorXd logits = x.row(i - 1) * betas.betas.transpose();
            const double lse = log_sum_exp_row(logits);
            log_qa = logits[l - 1] - lse;
            log_qb = logits[l] - lse;
        }
        prefix_a[w] = prefix_a[w - 1] + log_qa;
        prefix_b[w] = prefix_b[w - 1] + log_qb;
    }

    Eigen::VectorXd log_probs(hi - lo + 1);
    for (int k = lo; k <= hi; ++k) {
        double lp = power * (prefix_a[k - left] + prefix_b[window] - prefix_b[k - left]);
        if (kappa_prior == KappaPriorKind::kSegmentLength) {
            const double a = k - left;
            const double b = right - k;
            lp += -a * std::log(a) - b * std::log(b);
        }
        log_probs[k - lo] = lp;
    }
    const double m = log_probs.maxCoeff();
    Eigen::VectorXd probs = (log_probs.array() - m).exp();
    probs /= probs.sum();
    return probs;
}

ChangepointVector even_init(int n, int num_changepoints, int min_seg) {
    const int j_count = num_changepoints + 1;
    if (n < j_count * min_seg) {
        throw std::invalid_argument("even_init: N < (L+1) * min_seg, no feasible configuration");
    }
    ChangepointVector kappa;
    kappa.n = n;
    kappa.min_seg = min_seg;
    kappa.kappas.resize(static_cast<std::size_t>(num_changepoints));
    for (int l = 1; l <= num_changepoints; ++l) {
        kappa.kappas[static_cast<std::size_t>(l - 1)] =
            static_cast<int>(std::lround(static_cast<double>(l) * n / j_count));
    }
    // project to feasibility: forward pass enforces the left gaps, backward the right
    for (int l = 0; l < num_changepoints; ++l) {
        const int floor_l = (l == 0 ? min_seg : kappa.kappas[static_cast<std::size_t>(l - 1)] + min_seg);
        if (kappa.kappas[static_cast<std::size_t>(l)] < floor_l) {
            kappa.kappas[static_cast<std::size_t>(l)] = floor_l;
        }
    }
    for (int l = num_changepoints - 1; l >= 0; --l) {
        const int ceil_l = (l == num_changepoints - 1
                                ? n - min_seg
                                : kappa.kappas[static_cast<std::size_t>(l + 1)] - min_seg);
        if (kappa.kappas[static_cast<std::size_t>(l)] > ceil_l) {
            kappa.kappas[static_cast<std::size_t>(l)] = ceil_l;
        }
    }
    kappa.validate();
    return kappa;
}

GibbsSampler::GibbsSampler(const Eigen::MatrixXd& x, int num_changepoints,
                           const GibbsConfig& config, std::vector<std::uint8_t> fit_mask)
    : x_(x),
      config_(config),
      num_changepoints_(num_changepoints),
      num_classes_(num_changepoints + 1),
      fit_mask_(std::move(fit_mask)) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    if (num_changepoints_ < 0) {
        throw std::invalid_argument("GibbsSampler: negative number of changepoints");
    }
    if (!fit_mask_.empty() && static_cast<int>(fit_mask_.size()) != n) {
        throw std::invalid_argument("GibbsSampler: fit_mask length mismatch");
    }
    n_fit_ = fit_mask_.empty() ? n
                               : static_cast<int>(std::count(fit_mask_.begin(), fit_mask_.end(), 1));

    if (!config_.init_kappa.empty()) {
        state_.kappa.kappas = config_.init_kappa;
        state_.kappa.n = n;
        state_.kappa.min_seg = config_.min_seg;
        state_.kappa.validate();
        if (static_cast<int>(state_.kappa.kappas.size()) != num_changepoints_) {
            throw std::invalid_argument("GibbsSampler: init_kappa has wrong length");
        }
    } else {
        state_.kappa = even_init(n, num_changepoints_, config_.min_seg);
    }
    state_.betas = CoefficientSet::zeros(num_classes_, p);
    state_.omega = Eigen::MatrixXd::Zero(n, std::max(num_classes_ - 1, 0));
    if (config_.prior.kind == PriorKind::kHorseshoe) {
        state_.hs = HorseshoeState::ones(std::max(num_classes_ - 1, 0), p);
    } else {
        if (config_.prior.gaussian_mean.size() == 0) {
            config_.prior = PriorSpec::gaussian(p);
        }
        if (config_.prior.gaussian_mean.size() != p || config_.prior.gaussian_cov.rows() != p) {
            throw std::invalid_argument("GibbsSampler: Gaussian prior dimension mismatch");
        }
        Eigen::LLT<Eigen::MatrixXd> llt(config_.prior.gaussian_cov);
        if (llt.info() != Eigen::Success) {
            throw std::invalid_argument("GibbsSampler: Gaussian prior covariance not SPD");
        }
        prior_precision_ = llt.solve(Eigen::MatrixXd::Identity(p, p));
        prior_precision_mean_ = prior_precision_ * config_.prior.gaussian_mean;
    }
    refresh_logits();
}

void GibbsSampler::refresh_logits() {
    logits_ = x_ * state_.betas.betas.transpose();
}

double GibbsSampler::current_loss() const {
    double total = 0.0;
    for (int i = 1; i <= state_.kappa.n; ++i) {
        if (!fit_mask_.empty() && fit_mask_[static_cast<std::size_t>(i - 1)] == 0) continue;
        const double lse = log_sum_exp_row(logits_.row(i - 1));
        total -= logits_(i - 1, state_.kappa.segment_of(i) - 1) - lse;
    }
    return total;
}

void GibbsSampler::step_kappa(RngStream& rng, double power) {
    for (int l = 1; l <= num_changepoints_; ++l) {
        int lo = 0;
        const Eigen::VectorXd probs =
            kappa_full_conditional(l, state_.kappa, state_.betas, x_, config_.min_seg, &lo,
                                   config_.kappa_prior, power, fit_mask_);
        state_.kappa.kappas[static_cast<std::size_t>(l - 1)] = lo + sample_categorical(probs, rng);
    }
}

void GibbsSampler::step_omega(RngStream& rng, double power) {
    const int n = static_cast<int>(x_.rows());
    for (int i = 0; i < n; ++i) {
        if (!fit_mask_.empty() && fit_mask_[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; j < num_classes_ - 1; ++j) {
            const double eta_ij = logits_(i, j) - log_sum_exp_row_excluding(logits_.row(i), j);
            state_.omega(i, j) = draw_pg(power, eta_ij, rng);
        }
    }
}

void GibbsSampler::step_beta(RngStream& rng, double power) {
    const int n = static_cast<int>(x_.rows());
    const int p = static_cast<int>(x_.cols());
    const bool horseshoe = config_.prior.kind == PriorKind::kHorseshoe;

    // fitting-row views assembled once
    std::vector<int> rows;
    rows.reserve(static_cast<std::size_t>(n_fit_));
    for (int i = 0; i < n; ++i) {
        if (fit_mask_.empty() || fit_mask_[static_cast<std::size_t>(i)] != 0) rows.push_back(i);
    }
    Eigen::MatrixXd x_fit(n_fit_, p);
    for (int r = 0; r < n_fit_; ++r) {
        x_fit.row(r) = x_.row(rows[static_cast<std::size_t>(r)]);
    }

    for (int j = 0; j < num_classes_ - 1; ++j) {
        Eigen::VectorXd omega_fit(n_fit_);
        Eigen::VectorXd rhs(n_fit_);
        for (int r = 0; r < n_fit_; ++r) {
            const int i = rows[static_cast<std::size_t>(r)];
            const double c_ij = log_sum_exp_row_excluding(logits_.row(i), j);
            const double y_ij = (state_.kappa.segment_of(i + 1) == j + 1) ? 1.0 : 0.0;
            omega_fit[r] = state_.omega(i, j);
            rhs[r] = omega_fit[r] * c_ij + power * (y_ij - 0.5);
        }

        Eigen::VectorXd beta_j;
        if (horseshoe) {
            const Eigen::VectorXd prior_var =
                (state_.hs.lambda2.row(j).array() * state_.hs.tau2).matrix().transpose();
            if (p > config_.fast_path_ratio * n_fit_) {
                beta_j = draw_gaussian_fast(x_fit, omega_fit, rhs, prior_var, rng);
            } else {
                GaussianPosteriorSpec spec;
                spec.precision = x_fit.transpose() * omega_fit.asDiagonal() * x_fit;
                spec.precision.diagonal() += prior_var.cwiseInverse();
                spec.linear_term = x_fit.transpose() * rhs;
                beta_j = draw_gaussian(spec, rng);
            }
        } else {
            GaussianPosteriorSpec spec;
            spec.precision = x_fit.transpose() * omega_fit.asDiagonal() * x_fit + prior_precision_;
            spec.linear_term = x_fit.transpose() * rhs + prior_precision_mean_;
            beta_j = draw_gaussian(spec, rng);
        }
        state_.betas.betas.row(j) = beta_j.transpose();
        logits_.col(j) = x_ * beta_j;
    }
}

void GibbsSampler::step_horseshoe(RngStream& rng) {
    const int p = static_cast<int>(x_.cols());
    auto floored = [](double v) { return v > kScaleFloor ? v : kScaleFloor; };
    for (int j = 0; j < num_classes_ - 1; ++j) {
        for (int d = 0; d < p; ++d) {
            const double beta2 = state_.betas.betas(j, d) * state_.betas.betas(j, d);
            state_.hs.lambda2(j, d) = floored(
                rng.inverse_gamma(1.0, 1.0 / state_.hs.nu(j, d) + beta2 / (2.0 * state_.hs.tau2)));
            state_.hs.nu(j, d) = floored(rng.inverse_gamma(1.0, 1.0 + 1.0 / state_.hs.lambda2(j, d)));
        }
    }
    for (int j = 0; j < num_classes_ - 1; ++j) {
        double scale = 1.0 / state_.hs.xi;
        for (int d = 0; d < p; ++d) {
            const double beta2 = state_.betas.betas(j, d) * state_.betas.betas(j, d);
            scale += beta2 / (2.0 * state_.hs.lambda2(j, d));
        }
        state_.hs.tau2 = floored(rng.inverse_gamma(0.5 * (p + 1), scale));
    }
    state_.hs.xi = floored(rng.inverse_gamma(1.0, 1.0 + 1.0 / state_.hs.tau2));
}

void GibbsSampler::sweep(RngStream& rng, double power) {
    if (num_classes_ < 2) {
        return;  // L = 0: single class, nothing to sample
    }
    if (config_.update_kappa && num_changepoints_ > 0) {
        step_kappa(rng, power);
    }
    step_omega(rng, power);
    step_beta(rng, power);
    if (config_.prior.kind == PriorKind::kHorseshoe) {
        step_horseshoe(rng);
    }
}

namespace {

PosteriorDraws make_draw_store(int s_count, int num_changepoints, int n, int p, bool tau2) {
    PosteriorDraws draws;
    draws.n = n;
    draws.p = p;
    draws.num_changepoints = num_changepoints;
    draws.kappa_draws.resize(s_count, num_changepoints);
    draws.beta_draws.resize(s_count, num_changepoints * p);  // J-1 = L free classes
    draws.loss_trace.resize(s_count);
    if (tau2) draws.tau2_trace.resize(s_count);
    return draws;
}

}  // namespace

PosteriorDraws run_chain(const Eigen::MatrixXd& x, int num_changepoints,
                         const GibbsConfig& config,
                         const std::vector<std::uint8_t>& fit_mask) {
    GibbsSampler sampler(x, num_changepoints, config, fit_mask);
    RngStream rng = RngStream::derive(config.seed, 0);

    const int burn_in = config.resolved_burn_in();
    if (burn_in >= config.iters) {
        throw std::invalid_argument("run_chain: burn-in must be smaller than iters");
    }
    const int s_count = (config.iters - burn_in) / config.thin;
    PosteriorDraws draws = make_draw_store(s_count, num_changepoints,
                                           static_cast<int>(x.rows()),
                                           static_cast<int>(x.cols()),
                                           config.store_tau2_trace);
    int s = 0;
    for (int t = 1; t <= config.iters; ++t) {
        sampler.sweep(rng);
        if (t > burn_in && (t - burn_in - 1) % config.thin == 0 && s < s_count) {
            const GibbsState& st = sampler.state();
            st.kappa.validate();
            for (int l = 0; l < num_changepoints; ++l) {
                draws.kappa_draws(s, l) = st.kappa.kappas[static_cast<std::size_t>(l)];
            }
            const int p = draws.p;
            for (int j = 0; j < num_changepoints; ++j) {
                draws.beta_draws.row(s).segment(j * p, p) = st.betas.betas.row(j);
            }
            draws.loss_trace[s] = sampler.current_loss();
            if (config.store_tau2_trace) draws.tau2_trace[s] = st.hs.tau2;
            ++s;
        }
    }
    return draws;
}

PosteriorDraws run_bclr(const Eigen::MatrixXd& x, const GibbsConfig& config) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    const int m = config.min_seg;
    if (n < 2 * m) {
        throw std::invalid_argument("run_bclr: N < 2 * min_seg");
    }
    const bool horseshoe = config.prior.kind == PriorKind::kHorseshoe;

    PriorSpec prior = config.prior;
    Eigen::MatrixXd prior_precision;
    Eigen::VectorXd prior_precision_mean;
    if (!horseshoe) {
        if (prior.gaussian_mean.size() == 0) prior = PriorSpec::gaussian(p);
        prior_precision = prior.gaussian_cov.llt().solve(Eigen::MatrixXd::Identity(p, p));
        prior_precision_mean = prior_precision * prior.gaussian_mean;
    }

    RngStream rng = RngStream::derive(config.seed, 0);
    int kappa = config.init_kappa.empty() ? n / 2 : config.init_kappa.front();
    kappa = std::max(m, std::min(n - m, kappa));
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    HorseshoeState hs = HorseshoeState::ones(1, p);

    const int burn_in = config.resolved_burn_in();
    if (burn_in >= config.iters) {
        throw std::invalid_argument("run_bclr: burn-in must be smaller than iters");
    }
    const int s_count = (config.iters - burn_in) / config.thin;
    PosteriorDraws draws;
    draws.n = n;
    draws.p = p;
    draws.num_changepoints = 1;
    draws.kappa_draws.resize(s_count, 1);
    draws.beta_draws.resize(s_count, p);
    draws.loss_trace.resize(s_count);
    if (config.store_tau2_trace) draws.tau2_trace.resize(s_count);

    auto floored = [](double v) { return v > kScaleFloor ? v : kScaleFloor; };
    int s = 0;
    for (int t = 1; t <= config.iters; ++t) {
        // kappa | beta: prefix sums of the two per-row log terms
        const Eigen::VectorXd xb = x * beta;
        Eigen::VectorXd prefix_pre(n + 1);
        Eigen::VectorXd prefix_post(n + 1);
        prefix_pre[0] = 0.0;
        prefix_post[0] = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double v = xb[i - 1];
            const double log1pe = v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
            prefix_pre[i] = prefix_pre[i - 1] - log1pe;       // log 1/(1+e^v)
            prefix_post[i] = prefix_post[i - 1] + v - log1pe;  // log e^v/(1+e^v)
        }
        Eigen::VectorXd log_probs(n - 2 * m + 1);
        for (int k = m; k <= n - m; ++k) {
            double lp = prefix_pre[k] + prefix_post[n] - prefix_post[k];
            if (config.kappa_prior == KappaPriorKind::kSegmentLength) {
                lp += bclr_kappa_log_prior(k, n);
            }
            log_probs[k - m] = lp;
        }
        const double mx = log_probs.maxCoeff();
        Eigen::VectorXd probs = (log_probs.array() - mx).exp();
        probs /= probs.sum();
        if (config.update_kappa) {
            kappa = m + sample_categorical(probs, rng);
        }

        // omega | beta
        Eigen::VectorXd omega(n);
        for (int i = 0; i < n; ++i) {
            omega[i] = draw_pg(1.0, xb[i], rng);
        }

        // beta | kappa, omega
        Eigen::VectorXd delta(n);
        for (int i = 1; i <= n; ++i) {
            delta[i - 1] = (i > kappa ? 1.0 : 0.0) - 0.5;
        }
        if (horseshoe) {
            const Eigen::VectorXd prior_var =
                (hs.lambda2.row(0).array() * hs.tau2).matrix().transpose();
            if (p > config.fast_path_ratio * n) {
                beta = draw_gaussian_fast(x, omega, delta, prior_var, rng);
            } else {
                GaussianPosteriorSpec spec;
                spec.precision = x.transpose() * omega.asDiagonal() * x;
                spec.precision.diagonal() += prior_var.cwiseInverse();
                spec.linear_term = x.transpose() * delta;
                beta = draw_gaussian(spec, rng);
            }
            for (int d = 0; d < p; ++d) {
                const double beta2 = beta[d] * beta[d];
                hs.lambda2(0, d) =
                    floored(rng.inverse_gamma(1.0, 1.0 / hs.nu(0, d) + beta2 / (2.0 * hs.tau2)));
                hs.nu(0, d) = floored(rng.inverse_gamma(1.0, 1.0 + 1.0 / hs.lambda2(0, d)));
            }
            double scale = 1.0 / hs.xi;
            for (int d = 0; d < p; ++d) {
                scale += beta[d] * beta[d] / (2.0 * hs.lambda2(0, d));
            }
            hs.tau2 = floored(rng.inverse_gamma(0.5 * (p + 1), scale));
            hs.xi = floored(rng.inverse_gamma(1.0, 1.0 + 1.0 / hs.tau2));
        } else {
            GaussianPosteriorSpec spec;
            spec.precision = x.transpose() * omega.asDiagonal() * x + prior_precision;
            spec.linear_term = x.transpose() * delta + prior_precision_mean;
            beta = draw_gaussian(spec, rng);
        }

        if (t > burn_in && (t - burn_in - 1) % config.thin == 0 && s < s_count) {
            draws.kappa_draws(s, 0) = kappa;
            draws.beta_draws.row(s) = beta.transpose();
            const Eigen::VectorXd xb_now = x * beta;
            double l = 0.0;
            for (int i = 1; i <= n; ++i) {
                const double v = xb_now[i - 1];
                const double log1pe =
                    v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
                l += (i > kappa) ? (log1pe - v) : log1pe;
            }
            draws.loss_trace[s] = l;
            if (config.store_tau2_trace) draws.tau2_trace[s] = hs.tau2;
            ++s;
        }
    }
    return draws;
}

}  // namespace bcmlr
