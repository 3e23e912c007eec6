#ifndef BCMLR_SUMMARIES_HPP_
#define BCMLR_SUMMARIES_HPP_

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "bcmlr/gibbs.hpp"

namespace bcmlr {

struct ChangepointSummary {
    struct PerChangepoint {
        int mode = 0;     // most frequent value; ties -> smallest
        double mean = 0.0;
        int lower = 0;    // equal-tail (1-gamma) interval, nearest-rank quantiles
        int upper = 0;
    };
    std::vector<PerChangepoint> changepoints;
    double gamma = 0.05;
};

struct CoefficientDiffSummary {
    struct PerDimension {
        double mean = 0.0;
        double lower = 0.0;
        double upper = 0.0;
        bool credibly_changed = false;  // interval excludes zero
    };
    struct PerPair {
        int j = 0;  // difference beta_j - beta_k
        int k = 0;
        std::vector<PerDimension> dims;
    };
    std::vector<PerPair> pairs;
    double gamma = 0.05;
};

struct DiscriminantTrajectory {
    std::vector<int> time_index;  // 1-based, union of the two neighboring segments
    std::vector<double> mean;     // posterior mean of x_i' (beta_{l+1} - beta_l)
    std::vector<double> lower;    // pointwise equal-tail band
    std::vector<double> upper;
};

ChangepointSummary summarize_kappa(const PosteriorDraws& draws, double gamma = 0.05);

// Differences beta_j - beta_k for requested (j, k) pairs, 1-based class
// indices; class J participates as zero. Empty pairs defaults to the
// adjacent differences (2,1), (3,2), ..., (J, J-1).
CoefficientDiffSummary summarize_beta_diffs(const PosteriorDraws& draws,
                                            std::vector<std::pair<int, int>> pairs = {},
                                            double gamma = 0.05);

// Per-time posterior mean and pointwise band of x_i' (beta_{l+1} - beta_l)
// over the two segments adjacent to the posterior mode of kappa_l.
DiscriminantTrajectory discriminant_trajectory(const PosteriorDraws& draws, int l,
                                               const Eigen::MatrixXd& x,
                                               double gamma = 0.05);

// Nearest-rank empirical quantile of integer draws.
int nearest_rank_quantile(std::vector<int> values, double prob);

// Linear-interpolation quantile of real draws.
double interpolated_quantile(std::vector<double> values, double prob);

void write_kappa_summary_json(const std::string& path, const ChangepointSummary& summary);
void write_summary_csv(const std::string& path, const ChangepointSummary& kappa_summary,
                       const CoefficientDiffSummary& diff_summary);

}  // namespace bcmlr

#endif  // BCMLR_SUMMARIES_HPP_
