#ifndef BCMLR_DRAWS_IO_HPP_
#define BCMLR_DRAWS_IO_HPP_

#include <string>

#include "bcmlr/gibbs.hpp"

namespace bcmlr {

// Columnar CSV: iteration, kappa_1..kappa_L, beta_<j>_<d> (class-major), loss.
void write_draws_csv(const std::string& path, const PosteriorDraws& draws);

// Compact binary form: magic "BCMLR1", then N, p, L, S as little-endian
// 64-bit integers, then S records of [iteration int64, kappa int64 x L,
// beta double x (J-1)p class-major, loss double].
void write_draws_binary(const std::string& path, const PosteriorDraws& draws);
PosteriorDraws read_draws_binary(const std::string& path);

}  // namespace bcmlr

#endif  // BCMLR_DRAWS_IO_HPP_
