#ifndef BCMLR_POLYA_GAMMA_HPP_
#define BCMLR_POLYA_GAMMA_HPP_

#include "bcmlr/rng.hpp"

namespace bcmlr {

struct PgParams {
    double b = 1.0;  // shape; 1 for the plain samplers, the temper power otherwise
    double c = 0.0;  // tilt
};

// Draw from the Polya-Gamma distribution PG(b, c).
//
// b = 1 (and small integer b) uses the exact alternating-series sampler of
// Polson, Scott & Windle. Non-integer b falls back to the weighted sum of
// gammas representation truncated at kPgTruncationTerms terms, with the mean
// of the dropped tail added back.
double draw_pg(const PgParams& params, RngStream& rng);

inline double draw_pg(double b, double c, RngStream& rng) {
    return draw_pg(PgParams{b, c}, rng);
}

// Analytic mean of PG(b, c): (b / 2c) tanh(c / 2), with b/4 at c = 0.
double pg_mean(double b, double c);

// Analytic variance of PG(b, c).
double pg_variance(double b, double c);

inline constexpr int kPgTruncationTerms = 200;

}  // namespace bcmlr

#endif  // BCMLR_POLYA_GAMMA_HPP_
