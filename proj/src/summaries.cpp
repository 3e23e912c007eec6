#include "bcmlr/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace bcmlr {

int nearest_rank_quantile(std::vector<int> values, double prob) {
    if (values.empty()) {
        throw std::invalid_argument("nearest_rank_quantile: empty sample");
    }
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(prob * n)));
    return values[std::min(rank, values.size()) - 1];
}

double interpolated_quantile(std::vector<double> values, double prob) {
    if (values.empty()) {
        throw std::invalid_argument("interpolated_quantile: empty sample");
    }
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double h = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ChangepointSummary summarize_kappa(const PosteriorDraws& draws, double gamma) {
    const int s_count = draws.num_draws();
    if (s_count < 10) {
        throw std::invalid_argument("summarize_kappa: need at least 10 draws");
    }
    ChangepointSummary summary;
    summary.gamma = gamma;
    for (int l = 0; l < draws.num_changepoints; ++l) {
        std::vector<int> values(static_cast<std::size_t>(s_count));
        std::map<int, int> counts;
        double mean = 0.0;
        for (int s = 0; s < s_count; ++s) {
            values[static_cast<std::size_t>(s)] = draws.kappa_draws(s, l);
            ++counts[draws.kappa_draws(s, l)];
            mean += draws.kappa_draws(s, l);
        }
        ChangepointSummary::PerChangepoint pc;
        pc.mean = mean / s_count;
        int best = 0;
        for (const auto& [value, count] : counts) {
            if (count > best) {  // map iterates ascending, so ties keep the smallest
                best = count;
                pc.mode = value;
            }
        }
        pc.lower = nearest_rank_quantile(values, gamma / 2.0);
        pc.upper = nearest_rank_quantile(values, 1.0 - gamma / 2.0);
        summary.changepoints.push_back(pc);
    }
    return summary;
}

CoefficientDiffSummary summarize_beta_diffs(const PosteriorDraws& draws,
                                            std::vector<std::pair<int, int>> pairs,
                                            double gamma) {
    const int j_count = draws.num_classes();
    const int p = draws.p;
    const int s_count = draws.num_draws();
    if (pairs.empty()) {
        for (int l = 1; l < j_count; ++l) {
            pairs.emplace_back(l + 1, l);
        }
    }
    CoefficientDiffSummary summary;
    summary.gamma = gamma;
    for (const auto& [j, k] : pairs) {
        if (j < 1 || j > j_count || k < 1 || k > j_count) {
            throw std::invalid_argument("summarize_beta_diffs: class index out of range");
        }
        CoefficientDiffSummary::PerPair pair_summary;
        pair_summary.j = j;
        pair_summary.k = k;
        for (int d = 1; d <= p; ++d) {
            std::vector<double> diffs(static_cast<std::size_t>(s_count));
            double mean = 0.0;
            for (int s = 0; s < s_count; ++s) {
                const double bj = (j < j_count) ? draws.beta_draws(s, (j - 1) * p + (d - 1)) : 0.0;
                const double bk = (k < j_count) ? draws.beta_draws(s, (k - 1) * p + (d - 1)) : 0.0;
                diffs[static_cast<std::size_t>(s)] = bj - bk;
                mean += bj - bk;
            }
            CoefficientDiffSummary::PerDimension dim;
            dim.mean = mean / s_count;
            dim.lower = interpolated_quantile(diffs, gamma / 2.0);
            dim.upper = interpolated_quantile(diffs, 1.0 - gamma / 2.0);
            dim.credibly_changed = (dim.lower > 0.0) || (dim.upper < 0.0);
            pair_summary.dims.push_back(dim);
        }
        summary.pairs.push_back(pair_summary);
    }
    return summary;
}

DiscriminantTrajectory discriminant_trajectory(const PosteriorDraws& draws, int l,
                                               const Eigen::MatrixXd& x, double gamma) {
    if (l < 1 || l > draws.num_changepoints) {
        throw std::invalid_argument("discriminant_trajectory: changepoint index out of range");
    }
    const int p = draws.p;
    const int s_count = draws.num_draws();
    const ChangepointSummary kappa_summary = summarize_kappa(draws, gamma);

    const int left = (l >= 2) ? kappa_summary.changepoints[static_cast<std::size_t>(l - 2)].mode : 0;
    const int right = (l < draws.num_changepoints)
                          ? kappa_summary.changepoints[static_cast<std::size_t>(l)].mode
                          : draws.n;

    DiscriminantTrajectory traj;
    for (int i = left + 1; i <= right; ++i) {
        std::vector<double> values(static_cast<std::size_t>(s_count));
        double mean = 0.0;
        for (int s = 0; s < s_count; ++s) {
            // beta_{l+1} - beta_l with the reference class as zero
            double v = 0.0;
            for (int d = 0; d < p; ++d) {
                const double next =
                    (l + 1 <= draws.num_changepoints) ? draws.beta_draws(s, l * p + d) : 0.0;
                const double cur = draws.beta_draws(s, (l - 1) * p + d);
                v += x(i - 1, d) * (next - cur);
            }
            values[static_cast<std::size_t>(s)] = v;
            mean += v;
        }
        traj.time_index.push_back(i);
        traj.mean.push_back(mean / s_count);
        traj.lower.push_back(interpolated_quantile(values, gamma / 2.0));
        traj.upper.push_back(interpolated_quantile(values, 1.0 - gamma / 2.0));
    }
    return traj;
}

void write_kappa_summary_json(const std::string& path, const ChangepointSummary& summary) {
    nlohmann::json doc;
    doc["gamma"] = summary.gamma;
    doc["changepoints"] = nlohmann::json::array();
    for (const auto& pc : summary.changepoints) {
        doc["changepoints"].push_back(
            {{"mode", pc.mode}, {"mean", pc.mean}, {"lower", pc.lower}, {"upper", pc.upper}});
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_kappa_summary_json: cannot open " + path);
    }
    out << doc.dump(2) << '\n';
}

void write_summary_csv(const std::string& path, const ChangepointSummary& kappa_summary,
                       const CoefficientDiffSummary& diff_summary) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_summary_csv: cannot open " + path);
    }
    out << "kind,changepoint,pair_j,pair_k,dimension,statistic,value\n";
    out.precision(10);
    for (std::size_t l = 0; l < kappa_summary.changepoints.size(); ++l) {
        const auto& pc = kappa_summary.changepoints[l];
        out << "kappa," << l + 1 << ",,,,mode," << pc.mode << '\n';
        out << "kappa," << l + 1 << ",,,,mean," << pc.mean << '\n';
        out << "kappa," << l + 1 << ",,,,lower," << pc.lower << '\n';
        out << "kappa," << l + 1 << ",,,,upper," << pc.upper << '\n';
    }
    for (const auto& pair : diff_summary.pairs) {
        for (std::size_t d = 0; d < pair.dims.size(); ++d) {
            const auto& dim = pair.dims[d];
            out << "beta_diff,," << pair.j << ',' << pair.k << ',' << d + 1 << ",mean,"
                << dim.mean << '\n';
            out << "beta_diff,," << pair.j << ',' << pair.k << ',' << d + 1 << ",lower,"
                << dim.lower << '\n';
            out << "beta_diff,," << pair.j << ',' << pair.k << ',' << d + 1 << ",upper,"
                << dim.upper << '\n';
        }
    }
}

}  // namespace bcmlr
