#include "bcmlr/model_core.hpp"

#include <cmath>
#include <stdexcept>

namespace bcmlr {

namespace {

// log sum_k exp(v_k) with max subtraction
double log_sum_exp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) {
        return m;
    }
    return m + std::log((v.array() - m).exp().sum());
}

// log sum_{k != j} exp(v_k), j 0-based
double log_sum_exp_excluding(const Eigen::VectorXd& v, int j) {
    double m = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < v.size(); ++k) {
        if (k != j && v[k] > m) m = v[k];
    }
    double s = 0.0;
    for (int k = 0; k < v.size(); ++k) {
        if (k != j) s += std::exp(v[k] - m);
    }
    return m + std::log(s);
}

double log1p_exp(double x) {
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

}  // namespace

Eigen::VectorXd class_probs(const Eigen::VectorXd& x_i, const CoefficientSet& betas) {
    Eigen::VectorXd logits = betas.betas * x_i;
    const double lse = log_sum_exp(logits);
    return (logits.array() - lse).exp();
}

double loss(const ChangepointVector& kappa, const CoefficientSet& betas,
            const Eigen::MatrixXd& x) {
    kappa.validate();
    double total = 0.0;
    for (int i = 1; i <= kappa.n; ++i) {
        const Eigen::VectorXd logits = betas.betas * x.row(i - 1).transpose();
        const double lse = log_sum_exp(logits);
        total -= logits[kappa.segment_of(i) - 1] - lse;
    }
    return total;
}

double eta(const Eigen::VectorXd& x_i, const CoefficientSet& betas, int j) {
    return x_i.dot(betas.betas.row(j - 1)) - c_offset(x_i, betas, j);
}

double c_offset(const Eigen::VectorXd& x_i, const CoefficientSet& betas, int j) {
    const int j_count = betas.num_classes();
    if (j_count < 2) {
        throw std::invalid_argument("c_offset: need at least two classes");
    }
    if (j < 1 || j > j_count) {
        throw std::invalid_argument("c_offset: class index out of range");
    }
    const Eigen::VectorXd logits = betas.betas * x_i;
    return log_sum_exp_excluding(logits, j - 1);
}

double kappa_log_prior(const ChangepointVector& kappa) {
    double total = 0.0;
    for (int j = 1; j <= kappa.num_segments(); ++j) {
        const double len = kappa.boundary(j) - kappa.boundary(j - 1);
        total -= len * std::log(len);
    }
    return total;
}

double bclr_kappa_log_prior(int kappa, int n) {
    if (kappa < 1 || kappa > n - 1) {
        throw std::invalid_argument("bclr_kappa_log_prior: kappa out of range");
    }
    const double a = kappa;
    const double b = n - kappa;
    return -a * std::log(a) - b * std::log(b);
}

double loss_eta_form(const ChangepointVector& kappa, const CoefficientSet& betas,
                     const Eigen::MatrixXd& x) {
    kappa.validate();
    const int j_count = betas.num_classes();
    double total = 0.0;
    for (int i = 1; i <= kappa.n; ++i) {
        const Eigen::VectorXd x_i = x.row(i - 1).transpose();
        const Eigen::VectorXd logits = betas.betas * x_i;
        const int cls = kappa.segment_of(i);
        for (int j = 1; j <= j_count; ++j) {
            if (j != cls) continue;  // y_ij selects the Bernoulli term per row
            const double eta_ij = logits[j - 1] - log_sum_exp_excluding(logits, j - 1);
            total -= eta_ij - log1p_exp(eta_ij);
        }
    }
    return total;
}

}  // namespace bcmlr
