#include "bcmlr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcmlr {

namespace {

// Acklam's rational approximation to the standard normal quantile.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p outside (0, 1)");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q = 0.0;
    double r = 0.0;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - plow) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

void split_by_class(const std::vector<int>& labels, const std::vector<double>& scores,
                    std::vector<double>* pos, std::vector<double>* neg) {
    if (labels.size() != scores.size()) {
        throw std::invalid_argument("auc: labels/scores size mismatch");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] != 0 ? pos : neg)->push_back(scores[i]);
    }
    if (pos->empty() || neg->empty()) {
        throw std::invalid_argument("auc: both classes must be present");
    }
}

double pair_kernel(double x, double y) {
    if (x > y) return 1.0;
    if (x < y) return 0.0;
    return 0.5;
}

}  // namespace

double auc(const std::vector<int>& labels, const std::vector<double>& scores) {
    std::vector<double> pos;
    std::vector<double> neg;
    split_by_class(labels, scores, &pos, &neg);
    double total = 0.0;
    for (double x : pos) {
        for (double y : neg) {
            total += pair_kernel(x, y);
        }
    }
    return total / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

AucCi auc_ci_lower(const std::vector<int>& labels, const std::vector<double>& scores,
                   double alpha) {
    std::vector<double> pos;
    std::vector<double> neg;
    split_by_class(labels, scores, &pos, &neg);
    const std::size_t m = pos.size();
    const std::size_t n = neg.size();

    std::vector<double> v10(m, 0.0);
    std::vector<double> v01(n, 0.0);
    double theta = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double psi = pair_kernel(pos[i], neg[j]);
            v10[i] += psi;
            v01[j] += psi;
            theta += psi;
        }
    }
    theta /= static_cast<double>(m) * static_cast<double>(n);
    for (auto& v : v10) v /= static_cast<double>(n);
    for (auto& v : v01) v /= static_cast<double>(m);

    auto sample_var = [](const std::vector<double>& v, double mean) {
        if (v.size() < 2) return 0.0;
        double s = 0.0;
        for (double value : v) s += (value - mean) * (value - mean);
        return s / static_cast<double>(v.size() - 1);
    };
    const double var = sample_var(v10, theta) / static_cast<double>(m) +
                       sample_var(v01, theta) / static_cast<double>(n);

    AucCi out;
    out.auc = theta;
    if (var <= 0.0) {
        out.degenerate = true;
        out.lower = theta;
        return out;
    }
    const double z = normal_quantile(1.0 - alpha / 2.0);
    out.lower = std::clamp(theta - z * std::sqrt(var), 0.0, 1.0);
    return out;
}

AucCi auc_ci_lower_bootstrap(const std::vector<int>& labels,
                             const std::vector<double>& scores, double alpha,
                             int resamples, RngStream& rng) {
    std::vector<double> pos;
    std::vector<double> neg;
    split_by_class(labels, scores, &pos, &neg);

    std::vector<double> boot;
    boot.reserve(static_cast<std::size_t>(resamples));
    std::vector<double> rp(pos.size());
    std::vector<double> rn(neg.size());
    for (int b = 0; b < resamples; ++b) {
        for (auto& v : rp) {
            v = pos[static_cast<std::size_t>(rng.uniform() * pos.size()) % pos.size()];
        }
        for (auto& v : rn) {
            v = neg[static_cast<std::size_t>(rng.uniform() * neg.size()) % neg.size()];
        }
        double total = 0.0;
        for (double x : rp) {
            for (double y : rn) total += pair_kernel(x, y);
        }
        boot.push_back(total / (static_cast<double>(rp.size()) * static_cast<double>(rn.size())));
    }
    std::sort(boot.begin(), boot.end());
    const std::size_t idx = static_cast<std::size_t>(
        std::floor(alpha / 2.0 * static_cast<double>(resamples)));
    AucCi out;
    out.auc = auc(labels, scores);
    out.lower = boot[std::min(idx, boot.size() - 1)];
    return out;
}

std::vector<std::uint8_t> holdout_fit_mask(int n, int zeta) {
    if (zeta < 2) {
        throw std::invalid_argument("holdout_fit_mask: zeta must be >= 2");
    }
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 1);
    for (int i = zeta; i <= n; i += zeta) {
        mask[static_cast<std::size_t>(i - 1)] = 0;
    }
    return mask;
}

ChangepointScore score_changepoint(int l, const Eigen::VectorXi& kappa_row,
                                   const Eigen::MatrixXd& betas_free,
                                   const Eigen::MatrixXd& x,
                                   const std::vector<std::uint8_t>& holdout_mask,
                                   const SelectionConfig& config, RngStream& rng) {
    const int l_count = static_cast<int>(kappa_row.size());
    const int n = static_cast<int>(x.rows());
    const int left = (l >= 2) ? kappa_row[l - 2] : 0;
    const int mid = kappa_row[l - 1];
    const int right = (l < l_count) ? kappa_row[l] : n;

    std::vector<int> labels;
    std::vector<double> scores;
    for (int i = left + 1; i <= right; ++i) {
        const bool held_out =
            !holdout_mask.empty() && holdout_mask[static_cast<std::size_t>(i - 1)] == 0;
        if (!config.score_all_points && !held_out) continue;
        // logit of class j: x' beta_j for free classes, 0 for the reference
        const double logit_l =
            (l <= betas_free.rows()) ? x.row(i - 1).dot(betas_free.row(l - 1)) : 0.0;
        const double logit_next =
            (l + 1 <= betas_free.rows()) ? x.row(i - 1).dot(betas_free.row(l)) : 0.0;
        // q~_{i,l+1} = sigmoid(logit_{l+1} - logit_l)
        const double diff = logit_next - logit_l;
        const double q_tilde = diff > 0.0 ? 1.0 / (1.0 + std::exp(-diff))
                                          : std::exp(diff) / (1.0 + std::exp(diff));
        labels.push_back(i > mid ? 1 : 0);
        scores.push_back(q_tilde);
    }

    ChangepointScore out;
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (!has_pos || !has_neg) {
        return out;  // missing held-out class: unconfirmed
    }
    AucCi ci;
    if (config.ci_method == AucCiMethod::kBootstrap) {
        ci = auc_ci_lower_bootstrap(labels, scores, config.alpha, config.bootstrap_resamples, rng);
    } else {
        ci = auc_ci_lower(labels, scores, config.alpha);
    }
    out.auc_lower = ci.lower;
    out.indicator = (ci.lower > config.tau) ? 1 : 0;
    return out;
}

SelectionResult select_num_changepoints(const Eigen::MatrixXd& x,
                                        const SelectionConfig& config,
                                        const GibbsConfig& gibbs) {
    const int n = static_cast<int>(x.rows());
    if (gibbs.min_seg <= config.zeta) {
        throw std::invalid_argument(
            "select_num_changepoints: min_seg must exceed the holdout stride zeta");
    }
    if (config.l_fitted < 1) {
        throw std::invalid_argument("select_num_changepoints: l_fitted must be >= 1");
    }
    if (!(config.tau >= 0.5 && config.tau < 1.0)) {
        throw std::invalid_argument("select_num_changepoints: tau must lie in [0.5, 1)");
    }

    const std::vector<std::uint8_t> mask = holdout_fit_mask(n, config.zeta);
    SelectionResult result;
    result.fit_draws = run_chain(x, config.l_fitted, gibbs, mask);

    RngStream score_rng = RngStream::derive(gibbs.seed, 0xA0C0ULL);
    const int s_count = result.fit_draws.num_draws();
    result.l_true_draws.resize(static_cast<std::size_t>(s_count), 0);
    result.acceptance_rates.assign(static_cast<std::size_t>(config.l_fitted), 0.0);
    const int p = result.fit_draws.p;
    for (int s = 0; s < s_count; ++s) {
        Eigen::MatrixXd betas_free(config.l_fitted, p);
        for (int j = 0; j < config.l_fitted; ++j) {
            betas_free.row(j) = result.fit_draws.beta_draws.row(s).segment(j * p, p);
        }
        int l_true = 0;
        for (int l = 1; l <= config.l_fitted; ++l) {
            const ChangepointScore score = score_changepoint(
                l, result.fit_draws.kappa_draws.row(s).transpose(), betas_free, x, mask, config,
                score_rng);
            l_true += score.indicator;
            result.acceptance_rates[static_cast<std::size_t>(l - 1)] += score.indicator;
        }
        result.l_true_draws[static_cast<std::size_t>(s)] = l_true;
    }
    for (auto& rate : result.acceptance_rates) {
        rate /= std::max(s_count, 1);
    }

    result.posterior_pmf.assign(static_cast<std::size_t>(config.l_fitted) + 1, 0.0);
    for (int v : result.l_true_draws) {
        result.posterior_pmf[static_cast<std::size_t>(v)] += 1.0;
    }
    for (auto& mass : result.posterior_pmf) {
        mass /= std::max(s_count, 1);
    }
    result.l_hat = static_cast<int>(
        std::max_element(result.posterior_pmf.begin(), result.posterior_pmf.end()) -
        result.posterior_pmf.begin());

    if (config.refit) {
        GibbsConfig refit_config = gibbs;
        refit_config.init_kappa.clear();
        result.refit_draws = run_chain(x, result.l_hat, refit_config);
    }
    return result;
}

}  // namespace bcmlr
