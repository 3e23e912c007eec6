#include "bcmlr/polya_gamma.hpp"

#include <cmath>
#include <stdexcept>

namespace bcmlr {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTrunc = 0.64;  // series crossover point for J*(1, z)

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// CDF at kTrunc of the inverse-Gaussian(mu = 1/z, lambda = 1) law; the z = 0
// case is the Levy limit.
double pigauss_at_trunc(double z) {
    const double t = kTrunc;
    const double rt = 1.0 / std::sqrt(t);
    if (z < 1e-12) {
        return 2.0 * normal_cdf(-rt);
    }
    const double a = normal_cdf(rt * (t * z - 1.0));
    // exp(2z) * Phi(-rt (tz + 1)) computed in log space to dodge overflow
    const double phi = normal_cdf(-rt * (t * z + 1.0));
    const double b = phi > 0.0 ? std::exp(2.0 * z + std::log(phi)) : 0.0;
    return a + b;
}

// Piecewise coefficients of the alternating series for the J*(1, z) density.
double series_coef(int n, double x) {
    const double h = n + 0.5;
    if (x > kTrunc) {
        return kPi * h * std::exp(-h * h * kPi * kPi * x / 2.0);
    }
    return kPi * h * std::pow(2.0 / (kPi * x), 1.5) * std::exp(-2.0 * h * h / x);
}

// Inverse-Gaussian(mu, 1) truncated to (0, kTrunc).
double truncated_inv_gauss(double z, RngStream& rng) {
    const double t = kTrunc;
    if (z < 1.0 / t) {
        // small tilt: rejection from the Levy-style proposal
        while (true) {
            double e1 = 0.0;
            double e2 = 0.0;
            do {
                e1 = rng.exponential();
                e2 = rng.exponential();
            } while (e1 * e1 > 2.0 * e2 / t);
            const double x = t / ((1.0 + t * e1) * (1.0 + t * e1));
            if (rng.uniform() <= std::exp(-0.5 * z * z * x)) {
                return x;
            }
        }
    }
    // larger tilt: draw IG(mu, 1) until it lands below t
    const double mu = 1.0 / z;
    while (true) {
        const double w = rng.normal();
        const double y = w * w;
        double x = mu + 0.5 * mu * mu * y -
                   0.5 * mu * std::sqrt(4.0 * mu * y + mu * mu * y * y);
        if (rng.uniform() > mu / (mu + x)) {
            x = mu * mu / x;
        }
        if (x < t) {
            return x;
        }
    }
}

// Exact draw from J*(1, z), z >= 0; PG(1, c) = J*(1, |c|/2) / 4.
double draw_jacobi_star(double z, RngStream& rng) {
    const double k = kPi * kPi / 8.0 + z * z / 2.0;
    const double p = (kPi / (2.0 * k)) * std::exp(-k * kTrunc);
    const double q = 2.0 * std::exp(-z) * pigauss_at_trunc(z);

    while (true) {
        double x = 0.0;
        if (rng.uniform() < p / (p + q)) {
            x = kTrunc + rng.exponential() / k;
        } else {
            x = truncated_inv_gauss(z, rng);
        }
        double s = series_coef(0, x);
        const double y = rng.uniform() * s;
        int n = 0;
        while (true) {
            ++n;
            if (n % 2 == 1) {
                s -= series_coef(n, x);
                if (y <= s) {
                    return x;
                }
            } else {
                s += series_coef(n, x);
                if (y > s) {
                    break;  // reject, start over
                }
            }
        }
    }
}

double draw_pg1(double c, RngStream& rng) {
    return 0.25 * draw_jacobi_star(0.5 * std::abs(c), rng);
}

// Truncated gamma-sum representation for general b:
//   omega = (1 / 2 pi^2) sum_k g_k / ((k - 1/2)^2 + c^2 / 4 pi^2), g_k ~ Gamma(b, 1),
// truncated at kPgTruncationTerms with the tail mean added back.
double draw_pg_gamma_sum(double b, double c, RngStream& rng) {
    const double a2 = (c * c) / (4.0 * kPi * kPi);
    double sum = 0.0;
    for (int k = 1; k <= kPgTruncationTerms; ++k) {
        const double h = k - 0.5;
        sum += rng.gamma(b) / (h * h + a2);
    }
    // tail mean via the midpoint-rule integral of 1 / (x^2 + a^2) on (K, inf)
    const double big_k = static_cast<double>(kPgTruncationTerms);
    double tail = 0.0;
    if (a2 > 0.0) {
        const double a = std::sqrt(a2);
        tail = (kPi / 2.0 - std::atan(big_k / a)) / a;
    } else {
        tail = 1.0 / big_k;
    }
    return (sum + b * tail) / (2.0 * kPi * kPi);
}

}  // namespace

double draw_pg(const PgParams& params, RngStream& rng) {
    const double b = params.b;
    const double c = params.c;
    if (!(b > 0.0)) {
        throw std::invalid_argument("draw_pg: shape b must be positive");
    }
    if (!std::isfinite(c)) {
        throw std::invalid_argument("draw_pg: tilt c must be finite");
    }
    const double rounded = std::round(b);
    if (std::abs(b - rounded) < 1e-12 && rounded >= 1.0 && rounded <= 50.0) {
        // PG(n, c) is the n-fold convolution of PG(1, c)
        double total = 0.0;
        for (int i = 0; i < static_cast<int>(rounded); ++i) {
            total += draw_pg1(c, rng);
        }
        return total;
    }
    return draw_pg_gamma_sum(b, c, rng);
}

double pg_mean(double b, double c) {
    const double ac = std::abs(c);
    if (ac < 1e-8) {
        return b / 4.0;
    }
    return (b / (2.0 * c)) * std::tanh(c / 2.0);
}

double pg_variance(double b, double c) {
    const double ac = std::abs(c);
    if (ac < 1e-4) {
        return b / 24.0;
    }
    const double sech = 1.0 / std::cosh(c / 2.0);
    return (b / (4.0 * ac * ac * ac)) * (std::sinh(ac) - ac) * sech * sech;
}

}  // namespace bcmlr
