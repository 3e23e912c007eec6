#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bcmlr/model_core.hpp"
#include "bcmlr/tempering.hpp"

TEST_CASE("geometric schedule ends at one and increases") {
    const bcmlr::TemperSchedule s = bcmlr::TemperSchedule::geometric(4, 0.1);
    REQUIRE(s.size() == 4);
    CHECK(s.powers.front() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(s.powers.back() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k < s.size(); ++k) CHECK(s.powers[k] > s.powers[k - 1]);
    s.validate();
    bcmlr::TemperSchedule bad;
    bad.powers = {0.5, 0.4, 1.0};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("K=1 tempered run reproduces the plain chain bitwise") {
    bcmlr::RngStream data_rng(12);
    Eigen::MatrixXd x(50, 1);
    for (int i = 0; i < 50; ++i) x(i, 0) = data_rng.normal() + (i < 25 ? -1.0 : 1.0);
    bcmlr::GibbsConfig config;
    config.iters = 200;
    config.min_seg = 3;
    config.seed = 5;
    const bcmlr::PosteriorDraws plain = bcmlr::run_chain(x, 1, config);
    bcmlr::TemperSchedule schedule;
    schedule.powers = {1.0};
    const bcmlr::TemperedResult tempered = bcmlr::run_tempered(x, 1, config, schedule);
    CHECK(tempered.draws.kappa_draws == plain.kappa_draws);
    CHECK((tempered.draws.beta_draws - plain.beta_draws).cwiseAbs().maxCoeff() == 0.0);
    CHECK((tempered.draws.loss_trace - plain.loss_trace).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("swap log-ratio equals the four-density evaluation") {
    bcmlr::RngStream rng(9);
    Eigen::MatrixXd x(20, 2);
    for (int i = 0; i < 20; ++i)
        for (int d = 0; d < 2; ++d) x(i, d) = rng.normal();
    auto random_state = [&](int k) {
        bcmlr::GibbsState state;
        state.kappa.kappas = {k};
        state.kappa.n = 20;
        state.betas = bcmlr::CoefficientSet::zeros(2, 2);
        state.betas.betas(0, 0) = rng.normal();
        state.betas.betas(0, 1) = rng.normal();
        return state;
    };
    const bcmlr::GibbsState a = random_state(7);
    const bcmlr::GibbsState b = random_state(13);
    const double loss_a = bcmlr::loss(a.kappa, a.betas, x);
    const double loss_b = bcmlr::loss(b.kappa, b.betas, x);
    const double t_a = 0.3, t_b = 0.8;
    // Four tempered log-densities; the shared prior terms cancel explicitly.
    auto logpi = [&](double loss_value, double t) { return -t * loss_value; };
    const double direct = logpi(loss_b, t_a) + logpi(loss_a, t_b) -
                          logpi(loss_a, t_a) - logpi(loss_b, t_b);
    const double simplified = bcmlr::swap_log_ratio(loss_a, t_a, loss_b, t_b);
    CHECK(std::abs(simplified - direct) < 1e-10);
    CHECK(bcmlr::swap_probability(a, t_a, b, t_b, x) ==
          doctest::Approx(std::min(1.0, std::exp(direct))).epsilon(1e-10));
}

TEST_CASE("as t tends to zero the kappa conditional approaches the prior") {
    bcmlr::RngStream rng(14);
    Eigen::MatrixXd x(16, 1);
    for (int i = 0; i < 16; ++i) x(i, 0) = rng.normal() + (i < 8 ? -2.0 : 2.0);
    bcmlr::CoefficientSet betas = bcmlr::CoefficientSet::zeros(2, 1);
    betas.betas(0, 0) = 2.5;
    bcmlr::ChangepointVector kappa;
    kappa.kappas = {8};
    kappa.n = 16;
    int lo = 0;
    const Eigen::VectorXd q = bcmlr::kappa_full_conditional(
        1, kappa, betas, x, 1, &lo, bcmlr::KappaPriorKind::kSegmentLength, 1e-6);
    Eigen::VectorXd prior(q.size());
    for (int i = 0; i < q.size(); ++i) {
        bcmlr::ChangepointVector cand;
        cand.kappas = {lo + i};
        cand.n = 16;
        prior(i) = bcmlr::kappa_log_prior(cand);
    }
    prior = (prior.array() - prior.maxCoeff()).exp();
    prior /= prior.sum();
    CHECK(0.5 * (q - prior).cwiseAbs().sum() < 0.01);
}

TEST_CASE("tempered run produces a swap report with DEO pair structure") {
    bcmlr::RngStream data_rng(33);
    Eigen::MatrixXd x(40, 1);
    for (int i = 0; i < 40; ++i) x(i, 0) = data_rng.normal() + (i < 20 ? -1.5 : 1.5);
    bcmlr::GibbsConfig config;
    config.iters = 60;
    config.burn_in = 20;
    config.min_seg = 3;
    config.seed = 2;
    const bcmlr::TemperSchedule schedule = bcmlr::TemperSchedule::geometric(3, 0.2);
    const bcmlr::TemperedResult result = bcmlr::run_tempered(x, 1, config, schedule);
    REQUIRE(result.swaps.attempts.size() == 2);
    // DEO: pair (0,1) on even rounds, pair (1,2) on odd rounds.
    CHECK(result.swaps.attempts[0] == 30);
    CHECK(result.swaps.attempts[1] == 30);
    for (int pair = 0; pair < 2; ++pair) {
        CHECK(result.swaps.rejections[pair] >= 0);
        CHECK(result.swaps.rejections[pair] <= result.swaps.attempts[pair]);
        CHECK(result.swaps.rejection_rate(pair) >= 0.0);
        CHECK(result.swaps.rejection_rate(pair) <= 1.0);
    }
    CHECK(result.draws.num_draws() == 40);
}
