#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bcmlr/model_core.hpp"

namespace {

bcmlr::ChangepointVector make_kappa(std::vector<int> ks, int n) {
    bcmlr::ChangepointVector kappa;
    kappa.kappas = std::move(ks);
    kappa.n = n;
    return kappa;
}

}  // namespace

TEST_CASE("class_probs softmax with pinned reference class") {
    bcmlr::CoefficientSet betas = bcmlr::CoefficientSet::zeros(2, 1);
    betas.betas(0, 0) = std::log(3.0);
    Eigen::VectorXd x_i(1);
    x_i << 1.0;
    const Eigen::VectorXd q = bcmlr::class_probs(x_i, betas);
    REQUIRE(q.size() == 2);
    CHECK(q(0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(q(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(q.sum() == doctest::Approx(1.0));
}

TEST_CASE("class_probs is stable under large logits") {
    bcmlr::CoefficientSet betas = bcmlr::CoefficientSet::zeros(3, 1);
    betas.betas(0, 0) = 800.0;
    betas.betas(1, 0) = 750.0;
    Eigen::VectorXd x_i(1);
    x_i << 1.0;
    const Eigen::VectorXd q = bcmlr::class_probs(x_i, betas);
    CHECK(std::isfinite(q.sum()));
    CHECK(q(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("loss on the three-point binary instance") {
    // N=3, J=2, kappa=(1), beta_1=1, x=(1,1,1): class 1 holds only at i=1.
    bcmlr::CoefficientSet betas = bcmlr::CoefficientSet::zeros(2, 1);
    betas.betas(0, 0) = 1.0;
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 1);
    const double value = bcmlr::loss(make_kappa({1}, 3), betas, x);
    CHECK(value == doctest::Approx(2.9397850625546684).epsilon(1e-12));
}

TEST_CASE("eta linearized logit example") {
    bcmlr::CoefficientSet betas = bcmlr::CoefficientSet::zeros(3, 1);
    betas.betas(0, 0) = 1.0;
    betas.betas(1, 0) = 2.0;
    Eigen::VectorXd x_i(1);
    x_i << 1.0;
    CHECK(bcmlr::eta(x_i, betas, 1) ==
          doctest::Approx(-1.1269280110429726).epsilon(1e-12));
}

TEST_CASE("eta plus offset recovers the raw logit") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 25; ++rep) {
        const int p = 1 + rep % 4;
        const int num_classes = 2 + rep % 3;
        bcmlr::CoefficientSet betas = bcmlr::CoefficientSet::zeros(num_classes, p);
        for (int j = 0; j + 1 < num_classes; ++j)
            for (int d = 0; d < p; ++d) betas.betas(j, d) = nd(gen);
        Eigen::VectorXd x_i(p);
        for (int d = 0; d < p; ++d) x_i(d) = nd(gen);
        for (int j = 1; j <= num_classes; ++j) {
            const double raw = x_i.dot(betas.betas.row(j - 1));
            CHECK(bcmlr::eta(x_i, betas, j) + bcmlr::c_offset(x_i, betas, j) ==
                  doctest::Approx(raw).epsilon(1e-10));
        }
    }
}

TEST_CASE("loss and its eta-form re-expression agree") {
    std::mt19937_64 gen(2024);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> n_dist(6, 24);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = n_dist(gen);
        const int p = 1 + rep % 3;
        const int num_cp = 1 + rep % 2;
        std::vector<int> ks;
        if (num_cp == 1) {
            ks = {n / 2};
        } else {
            ks = {n / 3, 2 * n / 3};
        }
        bcmlr::ChangepointVector kappa = make_kappa(ks, n);
        bcmlr::CoefficientSet betas = bcmlr::CoefficientSet::zeros(num_cp + 1, p);
        for (int j = 0; j < num_cp; ++j)
            for (int d = 0; d < p; ++d) betas.betas(j, d) = nd(gen);
        Eigen::MatrixXd x(n, p);
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < p; ++d) x(i, d) = nd(gen);
        const double a = bcmlr::loss(kappa, betas, x);
        const double b = bcmlr::loss_eta_form(kappa, betas, x);
        CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("segment-length prior examples") {
    CHECK(bcmlr::kappa_log_prior(make_kappa({2}, 4)) ==
          doctest::Approx(std::log(1.0 / 16.0)).epsilon(1e-12));
    CHECK(bcmlr::kappa_log_prior(make_kappa({1}, 4)) ==
          doctest::Approx(std::log(1.0 / 27.0)).epsilon(1e-12));
    CHECK(bcmlr::kappa_log_prior(make_kappa({2}, 4)) >
          bcmlr::kappa_log_prior(make_kappa({1}, 4)));
}

TEST_CASE("bclr prior matches the L=1 segment-length prior and peaks at n/2") {
    for (int k = 1; k < 4; ++k) {
        CHECK(bcmlr::bclr_kappa_log_prior(k, 4) ==
              doctest::Approx(bcmlr::kappa_log_prior(make_kappa({k}, 4))).epsilon(1e-12));
    }
    int best = 1;
    double best_value = bcmlr::bclr_kappa_log_prior(1, 100);
    for (int k = 2; k < 100; ++k) {
        const double v = bcmlr::bclr_kappa_log_prior(k, 100);
        if (v > best_value) {
            best_value = v;
            best = k;
        }
    }
    CHECK(best == 50);
}
