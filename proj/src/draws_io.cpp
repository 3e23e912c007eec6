#include "bcmlr/draws_io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bcmlr {
namespace {

constexpr std::array<char, 6> kMagic = {'B', 'C', 'M', 'L', 'R', '1'};

void put_i64(std::ofstream& out, std::int64_t value) {
    std::array<unsigned char, 8> bytes;
    for (int b = 0; b < 8; ++b) {
        bytes[static_cast<std::size_t>(b)] =
            static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), 8);
}

std::int64_t get_i64(std::ifstream& in) {
    std::array<unsigned char, 8> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), 8);
    std::uint64_t value = 0;
    for (int b = 0; b < 8; ++b) {
        value |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(b)]) << (8 * b);
    }
    return static_cast<std::int64_t>(value);
}

void put_f64(std::ofstream& out, double value) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &value, 8);
    put_i64(out, static_cast<std::int64_t>(bits));
}

double get_f64(std::ifstream& in) {
    const auto bits = static_cast<std::uint64_t>(get_i64(in));
    double value = 0.0;
    std::memcpy(&value, &bits, 8);
    return value;
}

}  // namespace

void write_draws_csv(const std::string& path, const PosteriorDraws& draws) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_draws_csv: cannot open " + path);
    }
    out << "iteration";
    for (int l = 1; l <= draws.num_changepoints; ++l) {
        out << ",kappa_" << l;
    }
    for (int j = 1; j < draws.num_classes(); ++j) {
        for (int d = 1; d <= draws.p; ++d) {
            out << ",beta_" << j << '_' << d;
        }
    }
    out << ",loss\n";
    out.precision(17);
    for (int s = 0; s < draws.num_draws(); ++s) {
        out << s;
        for (int l = 0; l < draws.num_changepoints; ++l) {
            out << ',' << draws.kappa_draws(s, l);
        }
        for (int c = 0; c < draws.beta_draws.cols(); ++c) {
            out << ',' << draws.beta_draws(s, c);
        }
        out << ',' << draws.loss_trace(s) << '\n';
    }
}

void write_draws_binary(const std::string& path, const PosteriorDraws& draws) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("write_draws_binary: cannot open " + path);
    }
    out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
    put_i64(out, draws.n);
    put_i64(out, draws.p);
    put_i64(out, draws.num_changepoints);
    put_i64(out, draws.num_draws());
    for (int s = 0; s < draws.num_draws(); ++s) {
        put_i64(out, s);
        for (int l = 0; l < draws.num_changepoints; ++l) {
            put_i64(out, draws.kappa_draws(s, l));
        }
        for (int c = 0; c < draws.beta_draws.cols(); ++c) {
            put_f64(out, draws.beta_draws(s, c));
        }
        put_f64(out, draws.loss_trace(s));
    }
}

PosteriorDraws read_draws_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("read_draws_binary: cannot open " + path);
    }
    std::array<char, 6> magic{};
    in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
    if (!in || magic != kMagic) {
        throw std::runtime_error("read_draws_binary: bad magic in " + path);
    }
    PosteriorDraws draws;
    draws.n = static_cast<int>(get_i64(in));
    draws.p = static_cast<int>(get_i64(in));
    draws.num_changepoints = static_cast<int>(get_i64(in));
    const auto s_count = static_cast<int>(get_i64(in));
    if (!in || draws.n <= 0 || draws.p <= 0 || draws.num_changepoints < 0 || s_count < 0) {
        throw std::runtime_error("read_draws_binary: corrupt header in " + path);
    }
    draws.kappa_draws.resize(s_count, draws.num_changepoints);
    draws.beta_draws.resize(s_count, draws.num_changepoints * draws.p);
    draws.loss_trace.resize(s_count);
    for (int s = 0; s < s_count; ++s) {
        get_i64(in);  // iteration index, implied by row order
        for (int l = 0; l < draws.num_changepoints; ++l) {
            draws.kappa_draws(s, l) = static_cast<int>(get_i64(in));
        }
        for (int c = 0; c < draws.beta_draws.cols(); ++c) {
            draws.beta_draws(s, c) = get_f64(in);
        }
        draws.loss_trace(s) = get_f64(in);
    }
    if (!in) {
        throw std::runtime_error("read_draws_binary: truncated file " + path);
    }
    return draws;
}

}  // namespace bcmlr
