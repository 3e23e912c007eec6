#include "bcmlr/sim_bench.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bcmlr/summaries.hpp"

namespace bcmlr {
namespace {

Eigen::MatrixXd gaussian_segment(RngStream& rng, int rows, const Eigen::VectorXd& mu,
                                 const Eigen::MatrixXd& sigma) {
    const int p = static_cast<int>(mu.size());
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
    Eigen::MatrixXd out(rows, p);
    Eigen::VectorXd z(p);
    for (int i = 0; i < rows; ++i) {
        for (int d = 0; d < p; ++d) {
            z(d) = rng.normal();
        }
        out.row(i) = (mu + chol * z).transpose();
    }
    return out;
}

struct SegmentLaw {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
};

std::vector<SegmentLaw> scenario_laws(const ScenarioSpec& spec) {
    const int p = spec.dimension();
    const bool low = spec.variant == ScenarioVariant::kLow;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
    std::vector<SegmentLaw> laws;
    switch (spec.kind) {
        case ScenarioKind::kCim: {
            Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
            mu(0) = mu(1) = 2.0;
            mu(p - 2) = mu(p - 1) = -2.0;
            laws = {{zero, eye}, {mu, eye}, {zero, eye}};
            break;
        }
        case ScenarioKind::kCic: {
            Eigen::MatrixXd sigma1 = eye;
            Eigen::MatrixXd sigma2 = eye;
            if (low) {
                sigma1(0, 1) = sigma1(1, 0) = 0.8;
                sigma2(0, 2) = sigma2(2, 0) = 0.8;
            } else {
                sigma1(0, 1) = sigma1(1, 0) = 0.9;
                sigma2(0, 2) = sigma2(2, 0) = 0.9;
                sigma2(1, 2) = sigma2(2, 1) = 0.9;
            }
            laws = {{zero, sigma1}, {zero, sigma2}, {zero, sigma1}};
            break;
        }
        case ScenarioKind::kCimc: {
            Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
            Eigen::MatrixXd sigma = eye;
            if (low) {
                mu.setOnes();
                sigma(0, 1) = sigma(1, 0) = 0.7;
                sigma(0, 3) = sigma(3, 0) = 0.7;
            } else {
                mu.head(4).setOnes();
                sigma(0, 1) = sigma(1, 0) = 0.9;
                sigma(2, 3) = sigma(3, 2) = 0.9;
            }
            laws = {{zero, sigma}, {mu, sigma}, {mu, eye}};
            break;
        }
    }
    return laws;
}

}  // namespace

int ScenarioSpec::dimension() const {
    const bool low = variant == ScenarioVariant::kLow;
    switch (kind) {
        case ScenarioKind::kCim:
            return low ? 14 : 40;
        case ScenarioKind::kCic:
        case ScenarioKind::kCimc:
            return low ? 4 : 8;
    }
    return 0;
}

std::string ScenarioSpec::name() const {
    switch (kind) {
        case ScenarioKind::kCim:
            return "cim";
        case ScenarioKind::kCic:
            return "cic";
        case ScenarioKind::kCimc:
            return "cimc";
    }
    return "";
}

std::string ScenarioSpec::variant_name() const {
    return variant == ScenarioVariant::kLow ? "low" : "high";
}

ScenarioSpec parse_scenario(const std::string& name, const std::string& variant) {
    ScenarioSpec spec;
    if (name == "cim") {
        spec.kind = ScenarioKind::kCim;
    } else if (name == "cic") {
        spec.kind = ScenarioKind::kCic;
    } else if (name == "cimc") {
        spec.kind = ScenarioKind::kCimc;
    } else {
        throw std::invalid_argument("unknown scenario: " + name);
    }
    if (variant == "low") {
        spec.variant = ScenarioVariant::kLow;
    } else if (variant == "high") {
        spec.variant = ScenarioVariant::kHigh;
    } else {
        throw std::invalid_argument("unknown variant: " + variant);
    }
    return spec;
}

ScenarioData generate(const ScenarioSpec& spec, RngStream& rng) {
    ScenarioData data;
    data.kappa.kappas = spec.kappas;
    data.kappa.n = spec.n;
    data.kappa.validate();

    const auto laws = scenario_laws(spec);
    const int num_segments = data.kappa.num_segments();
    if (static_cast<int>(laws.size()) != num_segments) {
        throw std::invalid_argument("scenario laws defined for two changepoints only");
    }
    data.x.values.resize(spec.n, spec.dimension());
    for (int seg = 1; seg <= num_segments; ++seg) {
        const int lo = data.kappa.boundary(seg - 1);
        const int hi = data.kappa.boundary(seg);
        data.x.values.middleRows(lo, hi - lo) =
            gaussian_segment(rng, hi - lo, laws[static_cast<std::size_t>(seg - 1)].mu,
                             laws[static_cast<std::size_t>(seg - 1)].sigma);
    }
    return data;
}

double adjusted_rand_index(const ChangepointVector& kappa_true,
                           const ChangepointVector& kappa_est) {
    if (kappa_true.n != kappa_est.n) {
        throw std::invalid_argument("adjusted_rand_index: partitions of unequal N");
    }
    const int n = kappa_true.n;
    const int r = kappa_true.num_segments();
    const int c = kappa_est.num_segments();
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(r, c);
    for (int i = 1; i <= n; ++i) {
        counts(kappa_true.segment_of(i) - 1, kappa_est.segment_of(i) - 1) += 1.0;
    }
    const auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
    double sum_cells = 0.0;
    for (int a = 0; a < r; ++a) {
        for (int b = 0; b < c; ++b) {
            sum_cells += choose2(counts(a, b));
        }
    }
    double sum_rows = 0.0;
    for (int a = 0; a < r; ++a) sum_rows += choose2(counts.row(a).sum());
    double sum_cols = 0.0;
    for (int b = 0; b < c; ++b) sum_cols += choose2(counts.col(b).sum());
    const double total = choose2(static_cast<double>(n));
    const double expected = sum_rows * sum_cols / total;
    const double maximum = 0.5 * (sum_rows + sum_cols);
    if (maximum == expected) {
        return 1.0;  // both partitions trivial and identical
    }
    return (sum_cells - expected) / (maximum - expected);
}

GibbsConfig make_bench_gibbs_config() {
    GibbsConfig config;
    config.iters = 5000;
    config.burn_in = 2500;
    config.min_seg = 30;
    config.prior = PriorSpec::horseshoe();
    // The raw segment-length prior overwhelms weak covariance-change signals
    // at N = 600 (its pull toward equal segments exceeds the attainable
    // likelihood separation), so the benchmarks use the uniform prior.
    config.kappa_prior = KappaPriorKind::kUniform;
    return config;
}

SelectionConfig make_bench_selection_config() {
    SelectionConfig config;
    config.l_fitted = 5;
    config.alpha = 0.1;
    config.tau = 0.5;
    config.zeta = 5;
    return config;
}

ChangepointVector estimate_kappa(const PosteriorDraws& draws) {
    const ChangepointSummary summary = summarize_kappa(draws);
    ChangepointVector kappa;
    kappa.n = draws.n;
    for (const auto& pc : summary.changepoints) {
        kappa.kappas.push_back(pc.mode);
    }
    std::sort(kappa.kappas.begin(), kappa.kappas.end());
    return kappa;
}

double BenchmarkTable::mean_ari() const {
    if (rows.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& row : rows) sum += row.ari;
    return sum / static_cast<double>(rows.size());
}

double BenchmarkTable::se_ari() const {
    if (rows.size() < 2) return 0.0;
    const double mean = mean_ari();
    double ss = 0.0;
    for (const auto& row : rows) ss += (row.ari - mean) * (row.ari - mean);
    const auto n = static_cast<double>(rows.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

void BenchmarkTable::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_csv: cannot open " + path);
    }
    out << "scenario,variant,input-type,known_L,replicate,ARI,wall-time-seconds\n";
    out.precision(10);
    for (const auto& row : rows) {
        out << row.scenario << ',' << row.variant << ',' << row.input_type << ','
            << (row.known_l ? 1 : 0) << ',' << row.replicate << ',' << row.ari << ','
            << row.seconds << '\n';
    }
}

std::string BenchmarkTable::to_text() const {
    std::ostringstream out;
    out.precision(4);
    if (!rows.empty()) {
        out << rows.front().scenario << " (" << rows.front().variant << ", "
            << rows.front().input_type << ", "
            << (rows.front().known_l ? "known L" : "unknown L") << "): ";
    }
    out << "mean ARI " << mean_ari() << " (se " << se_ari() << ", " << rows.size()
        << " replicates)";
    return out.str();
}

BenchmarkTable run_benchmark(const ScenarioSpec& spec, const BenchmarkConfig& config) {
    BenchmarkTable table;
    for (int rep = 0; rep < config.replicates; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        RngStream rng = RngStream::derive(config.seed, static_cast<std::uint64_t>(rep));
        ScenarioData data = generate(spec, rng);

        SeriesMatrix input = config.embed ? poly2_embed(data.x) : data.x;
        input = standardize(input);

        GibbsConfig gibbs = config.gibbs;
        gibbs.seed = RngStream::derive(config.seed, 0x8000u + static_cast<std::uint64_t>(rep))
                         .engine()();

        ChangepointVector kappa_est;
        int l_hat = -1;
        if (config.known_l) {
            const PosteriorDraws draws =
                run_chain(input.values, static_cast<int>(spec.kappas.size()), gibbs);
            kappa_est = estimate_kappa(draws);
        } else {
            SelectionConfig selection = config.selection;
            const SelectionResult result =
                select_num_changepoints(input.values, selection, gibbs);
            l_hat = result.l_hat;
            if (result.l_hat == 0) {
                kappa_est.n = spec.n;
            } else {
                kappa_est = estimate_kappa(result.refit_draws ? *result.refit_draws
                                                              : result.fit_draws);
            }
        }

        const auto t1 = std::chrono::steady_clock::now();
        BenchmarkRow row;
        row.scenario = spec.name();
        row.variant = spec.variant_name();
        row.input_type = config.embed ? "poly2" : "raw";
        row.known_l = config.known_l;
        row.replicate = rep;
        row.l_hat = l_hat;
        row.ari = adjusted_rand_index(data.kappa, kappa_est);
        row.seconds = std::chrono::duration<double>(t1 - t0).count();
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace bcmlr
