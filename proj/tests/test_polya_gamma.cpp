#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bcmlr/polya_gamma.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent series evaluation of the PG(b, c) mean and variance from the
// infinite weighted-gamma-sum representation, truncated at 2000 terms.
double series_mean(double b, double c, int terms = 2000) {
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double denom = (k - 0.5) * (k - 0.5) + c * c / (4.0 * kPi * kPi);
        sum += b / denom;
    }
    return sum / (2.0 * kPi * kPi);
}

double series_variance(double b, double c, int terms = 2000) {
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double denom = (k - 0.5) * (k - 0.5) + c * c / (4.0 * kPi * kPi);
        sum += b / (denom * denom);
    }
    return sum / (4.0 * kPi * kPi * kPi * kPi);
}

struct Moments {
    double mean;
    double var;
};

Moments sample_moments(double b, double c, int n, std::uint64_t seed) {
    bcmlr::RngStream rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < n; ++s) {
        const double v = bcmlr::draw_pg(b, c, rng);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    return {mean, sum2 / n - mean * mean};
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("analytic moments match the truncated-series oracle") {
    const double bs[] = {0.3, 0.5, 1.0, 2.0};
    const double cs[] = {0.0, 0.5, 1.0, 2.0, 5.0};
    for (double b : bs) {
        for (double c : cs) {
            CHECK(bcmlr::pg_mean(b, c) ==
                  doctest::Approx(series_mean(b, c)).epsilon(1e-4));
            CHECK(bcmlr::pg_variance(b, c) ==
                  doctest::Approx(series_variance(b, c)).epsilon(1e-4));
        }
    }
    CHECK(bcmlr::pg_mean(1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bcmlr::pg_mean(1.0, 2.0) ==
          doctest::Approx(0.25 * std::tanh(1.0)).epsilon(1e-12));
    CHECK(bcmlr::pg_mean(0.5, 1.0) ==
          doctest::Approx(0.25 * std::tanh(0.5)).epsilon(1e-12));
}

TEST_CASE("sample moments across the (b, c) grid") {
    const double bs[] = {0.3, 0.5, 1.0, 2.0};
    const double cs[] = {0.0, 0.5, 1.0, 2.0, 5.0};
    std::uint64_t seed = 1000;
    for (double b : bs) {
        // The fractional-b path is slower; fewer draws keep the test quick.
        const int n = (b == 1.0 || b == 2.0) ? 100000 : 30000;
        for (double c : cs) {
            const Moments m = sample_moments(b, c, n, seed++);
            const double mean = bcmlr::pg_mean(b, c);
            const double var = bcmlr::pg_variance(b, c);
            CHECK(std::abs(m.mean - mean) < 4.0 * std::sqrt(var / n));
            CHECK(std::abs(m.var - var) < 6.0 * var * std::sqrt(2.0 / n));
        }
    }
}

TEST_CASE("named mean examples within three standard errors") {
    const int n = 100000;
    {
        const Moments m = sample_moments(1.0, 2.0, n, 42);
        CHECK(std::abs(m.mean - 0.1903985389889412) <
              3.0 * std::sqrt(bcmlr::pg_variance(1.0, 2.0) / n));
    }
    {
        const Moments m = sample_moments(0.5, 1.0, 30000, 43);
        CHECK(std::abs(m.mean - 0.11552928931500243) <
              3.0 * std::sqrt(bcmlr::pg_variance(0.5, 1.0) / 30000.0));
    }
}

TEST_CASE("distribution is symmetric in the sign of c") {
    const int n = 10000;
    std::vector<double> pos(n), neg(n);
    bcmlr::RngStream rng_pos(7), rng_neg(8);
    for (int s = 0; s < n; ++s) {
        pos[s] = bcmlr::draw_pg(1.0, 1.5, rng_pos);
        neg[s] = bcmlr::draw_pg(1.0, -1.5, rng_neg);
    }
    // alpha = 0.001 two-sample critical value 1.949 * sqrt(2/n)
    CHECK(ks_statistic(pos, neg) < 1.949 * std::sqrt(2.0 / n));
}

TEST_CASE("draws are finite and positive across extreme tilts") {
    bcmlr::RngStream rng(3);
    for (double c : {0.0, 1e-8, 0.1, 10.0, 100.0, 1000.0}) {
        for (int s = 0; s < 200; ++s) {
            const double v = bcmlr::draw_pg(1.0, c, rng);
            CHECK(v > 0.0);
            CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("same seed reproduces the same stream") {
    bcmlr::RngStream a(123), b(123);
    for (int s = 0; s < 100; ++s) {
        CHECK(bcmlr::draw_pg(0.7, 1.3, a) == bcmlr::draw_pg(0.7, 1.3, b));
    }
}

TEST_CASE("non-positive shape is rejected") {
    bcmlr::RngStream rng(1);
    CHECK_THROWS_AS(bcmlr::draw_pg(0.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(bcmlr::draw_pg(-1.0, 0.0, rng), std::invalid_argument);
}
