#ifndef BCMLR_RNG_HPP_
#define BCMLR_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace bcmlr {

// A seedable random stream. Independent substreams are derived from a
// (seed, stream_id) pair so that chains, replicas, and benchmark
// replicates never share state.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static RngStream derive(std::uint64_t seed, std::uint64_t stream_id) {
        return RngStream(mix(mix(seed ^ 0x9e3779b97f4a7c15ULL) + stream_id));
    }

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    double normal() {
        // One Box-Muller variate per call; avoids the cached-spare state of
        // std::normal_distribution so streams stay reproducible after swaps.
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double exponential() {
        return std::exponential_distribution<double>(1.0)(engine_);
    }

    // Gamma(shape, 1) draw.
    double gamma(double shape) {
        return std::gamma_distribution<double>(shape, 1.0)(engine_);
    }

    // InverseGamma(shape, scale): x ~ scale / Gamma(shape, 1).
    double inverse_gamma(double shape, double scale) {
        double g = gamma(shape);
        if (g <= 0.0) {
            g = 1e-300;
        }
        return scale / g;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace bcmlr

#endif  // BCMLR_RNG_HPP_
