#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcmlr/data_model.hpp"
#include "bcmlr/draws_io.hpp"
#include "bcmlr/gibbs.hpp"
#include "bcmlr/selection.hpp"
#include "bcmlr/sim_bench.hpp"
#include "bcmlr/summaries.hpp"
#include "bcmlr/tempering.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// Thrown for filesystem problems so main() can map them to exit code 4.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("BCMLR_OUT_DIR")) {
        return env;
    }
    return ".";
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir + ": " + ec.message());
    }
}

bcmlr::SeriesMatrix load_series(const std::string& path, bool embed, bool standardize_flag) {
    if (!std::filesystem::exists(path)) {
        throw IoError("data file not found: " + path);
    }
    bcmlr::SeriesMatrix x = bcmlr::read_csv(path);
    if (embed) {
        x = bcmlr::poly2_embed(x);
    }
    if (standardize_flag) {
        x = bcmlr::standardize(x);
    }
    return x;
}

struct FitFlags {
    std::string data;
    std::string out = default_out_dir();
    std::string prior = "gaussian";
    std::string kappa_prior = "segment-length";
    std::string embed;
    bool standardize_flag = false;
    int temper = 1;
    int threads = 0;
    bcmlr::GibbsConfig gibbs;
};

void add_gibbs_flags(CLI::App* cmd, FitFlags& flags) {
    cmd->add_option("--data", flags.data, "input CSV (rows = time, cols = dims)")->required();
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--prior", flags.prior, "coefficient prior")
        ->check(CLI::IsMember({"gaussian", "horseshoe"}));
    cmd->add_option("--kappa-prior", flags.kappa_prior, "changepoint location prior")
        ->check(CLI::IsMember({"segment-length", "uniform"}));
    cmd->add_option("--embed", flags.embed, "feature embedding")
        ->check(CLI::IsMember({"poly2"}));
    cmd->add_flag("--standardize", flags.standardize_flag, "center and scale columns");
    cmd->add_option("--temper", flags.temper, "number of tempering replicas K")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", flags.threads, "worker cap (informational)");
    cmd->add_option("--iters", flags.gibbs.iters, "Gibbs iterations T");
    cmd->add_option("--burnin", flags.gibbs.burn_in, "burn-in T0 (default T/2)");
    cmd->add_option("--thin", flags.gibbs.thin, "thinning stride");
    cmd->add_option("--min-seg", flags.gibbs.min_seg, "minimum segment length m");
    cmd->add_option("--seed", flags.gibbs.seed, "RNG seed");
}

void validate_gibbs(const bcmlr::GibbsConfig& gibbs) {
    if (gibbs.iters <= 0) {
        throw std::invalid_argument("--iters must be positive");
    }
    if (gibbs.resolved_burn_in() >= gibbs.iters) {
        throw std::invalid_argument("--burnin must be smaller than --iters");
    }
    if (gibbs.thin <= 0 || gibbs.min_seg <= 0) {
        throw std::invalid_argument("--thin and --min-seg must be positive");
    }
}

void resolve_prior(bcmlr::GibbsConfig& gibbs, const FitFlags& flags, int p) {
    gibbs.prior = flags.prior == "horseshoe" ? bcmlr::PriorSpec::horseshoe()
                                             : bcmlr::PriorSpec::gaussian(p);
    gibbs.kappa_prior = flags.kappa_prior == "uniform" ? bcmlr::KappaPriorKind::kUniform
                                                       : bcmlr::KappaPriorKind::kSegmentLength;
}

void write_fit_outputs(const std::string& out, const bcmlr::PosteriorDraws& draws,
                       const bcmlr::SeriesMatrix& x) {
    ensure_dir(out);
    bcmlr::write_draws_csv(out + "/draws.csv", draws);
    bcmlr::write_draws_binary(out + "/draws.bin", draws);
    const bcmlr::ChangepointSummary kappa_summary = bcmlr::summarize_kappa(draws);
    bcmlr::write_kappa_summary_json(out + "/kappa_summary.json", kappa_summary);
    const bcmlr::CoefficientDiffSummary diffs = bcmlr::summarize_beta_diffs(draws);
    bcmlr::write_summary_csv(out + "/summary.csv", kappa_summary, diffs);
    for (int l = 1; l <= draws.num_changepoints; ++l) {
        const bcmlr::DiscriminantTrajectory traj =
            bcmlr::discriminant_trajectory(draws, l, x.values);
        std::ofstream traj_out(out + "/trajectory_" + std::to_string(l) + ".csv");
        if (!traj_out) {
            throw IoError("cannot open trajectory file in " + out);
        }
        traj_out << "time,mean,lower,upper\n";
        traj_out.precision(10);
        for (std::size_t i = 0; i < traj.time_index.size(); ++i) {
            traj_out << traj.time_index[i] << ',' << traj.mean[i] << ',' << traj.lower[i]
                     << ',' << traj.upper[i] << '\n';
        }
    }
}

int cmd_simulate(const std::string& scenario, const std::string& variant,
                 std::uint64_t seed, const std::string& out) {
    bcmlr::ScenarioSpec spec = bcmlr::parse_scenario(scenario, variant);
    spec.seed = seed;
    bcmlr::RngStream rng = bcmlr::RngStream::derive(seed, 0);
    const bcmlr::ScenarioData data = bcmlr::generate(spec, rng);
    ensure_dir(out);
    bcmlr::write_csv(out + "/data.csv", data.x);
    nlohmann::json truth;
    truth["kappas"] = data.kappa.kappas;
    truth["n"] = data.kappa.n;
    truth["scenario"] = spec.name();
    truth["variant"] = spec.variant_name();
    std::ofstream truth_out(out + "/truth.json");
    if (!truth_out) {
        throw IoError("cannot open " + out + "/truth.json");
    }
    truth_out << truth.dump(2) << '\n';
    std::cout << "wrote " << data.x.rows() << "x" << data.x.cols() << " series to " << out
              << "/data.csv\n";
    return 0;
}

int cmd_fit(const FitFlags& flags, int num_changepoints) {
    validate_gibbs(flags.gibbs);
    bcmlr::SeriesMatrix x =
        load_series(flags.data, flags.embed == "poly2", flags.standardize_flag);
    bcmlr::GibbsConfig gibbs = flags.gibbs;
    resolve_prior(gibbs, flags, static_cast<int>(x.cols()));

    bcmlr::PosteriorDraws draws;
    if (flags.temper > 1) {
        const bcmlr::TemperSchedule schedule = bcmlr::TemperSchedule::geometric(flags.temper);
        bcmlr::TemperedResult result =
            bcmlr::run_tempered(x.values, num_changepoints, gibbs, schedule);
        draws = std::move(result.draws);
        ensure_dir(flags.out);
        result.swaps.write_csv(flags.out + "/swap_report.csv");
    } else {
        draws = bcmlr::run_chain(x.values, num_changepoints, gibbs);
    }
    write_fit_outputs(flags.out, draws, x);
    std::cout << "fit complete: " << draws.num_draws() << " stored draws in " << flags.out
              << '\n';
    return 0;
}

int cmd_select(const FitFlags& flags, bcmlr::SelectionConfig selection) {
    validate_gibbs(flags.gibbs);
    if (flags.gibbs.min_seg <= selection.zeta) {
        throw std::invalid_argument("--min-seg must exceed --zeta");
    }
    bcmlr::SeriesMatrix x =
        load_series(flags.data, flags.embed == "poly2", flags.standardize_flag);
    bcmlr::GibbsConfig gibbs = flags.gibbs;
    resolve_prior(gibbs, flags, static_cast<int>(x.cols()));

    const bcmlr::SelectionResult result =
        bcmlr::select_num_changepoints(x.values, selection, gibbs);
    ensure_dir(flags.out);
    nlohmann::json report;
    report["l_hat"] = result.l_hat;
    report["pmf"] = result.posterior_pmf;
    report["acceptance_rates"] = result.acceptance_rates;
    report["config"] = {{"l_fitted", selection.l_fitted},
                        {"alpha", selection.alpha},
                        {"tau", selection.tau},
                        {"zeta", selection.zeta},
                        {"min_seg", gibbs.min_seg},
                        {"iters", gibbs.iters},
                        {"burn_in", gibbs.resolved_burn_in()},
                        {"prior", flags.prior},
                        {"kappa_prior", flags.kappa_prior},
                        {"seed", gibbs.seed}};
    std::ofstream report_out(flags.out + "/selection.json");
    if (!report_out) {
        throw IoError("cannot open " + flags.out + "/selection.json");
    }
    report_out << report.dump(2) << '\n';

    std::cout << "L_hat = " << result.l_hat << "; top of pmf:";
    std::vector<std::pair<double, int>> ranked;
    for (std::size_t l = 0; l < result.posterior_pmf.size(); ++l) {
        ranked.emplace_back(result.posterior_pmf[l], static_cast<int>(l));
    }
    std::sort(ranked.rbegin(), ranked.rend());
    for (std::size_t r = 0; r < ranked.size() && r < 3; ++r) {
        std::cout << "  P(L=" << ranked[r].second << ")=" << ranked[r].first;
    }
    std::cout << '\n';
    if (result.refit_draws && result.l_hat > 0) {
        write_fit_outputs(flags.out, *result.refit_draws, x);
    }
    return 0;
}

int cmd_bench(const std::string& scenario, const std::string& variant, bool all,
              int replicates, bool known_l, bool embed, std::uint64_t seed,
              const std::string& out) {
    ensure_dir(out);
    std::vector<bcmlr::ScenarioSpec> specs;
    if (all) {
        for (const char* name : {"cim", "cic", "cimc"}) {
            for (const char* var : {"low", "high"}) {
                specs.push_back(bcmlr::parse_scenario(name, var));
            }
        }
    } else {
        specs.push_back(bcmlr::parse_scenario(scenario, variant));
    }
    bcmlr::BenchmarkTable combined;
    for (const auto& spec : specs) {
        bcmlr::BenchmarkConfig config;
        config.replicates = replicates;
        config.known_l = known_l;
        // The paper embeds covariance-change scenarios; mean changes run raw.
        config.embed = embed || (all && spec.kind != bcmlr::ScenarioKind::kCim);
        config.gibbs = bcmlr::make_bench_gibbs_config();
        config.selection = bcmlr::make_bench_selection_config();
        config.seed = seed;
        const bcmlr::BenchmarkTable table = bcmlr::run_benchmark(spec, config);
        std::cout << table.to_text() << '\n';
        combined.rows.insert(combined.rows.end(), table.rows.begin(), table.rows.end());
    }
    combined.write_csv(out + "/bench.csv");
    std::cout << "wrote " << combined.rows.size() << " rows to " << out << "/bench.csv\n";
    return 0;
}

int cmd_summarize(const std::string& draws_path, const std::string& data_path,
                  double gamma, const std::string& out) {
    if (!std::filesystem::exists(draws_path)) {
        throw IoError("draws file not found: " + draws_path);
    }
    const bcmlr::PosteriorDraws draws = bcmlr::read_draws_binary(draws_path);
    ensure_dir(out);
    const bcmlr::ChangepointSummary kappa_summary = bcmlr::summarize_kappa(draws, gamma);
    bcmlr::write_kappa_summary_json(out + "/kappa_summary.json", kappa_summary);
    const bcmlr::CoefficientDiffSummary diffs =
        bcmlr::summarize_beta_diffs(draws, {}, gamma);
    bcmlr::write_summary_csv(out + "/summary.csv", kappa_summary, diffs);
    if (!data_path.empty()) {
        const bcmlr::SeriesMatrix x = load_series(data_path, false, false);
        for (int l = 1; l <= draws.num_changepoints; ++l) {
            const bcmlr::DiscriminantTrajectory traj =
                bcmlr::discriminant_trajectory(draws, l, x.values, gamma);
            std::ofstream traj_out(out + "/trajectory_" + std::to_string(l) + ".csv");
            traj_out << "time,mean,lower,upper\n";
            for (std::size_t i = 0; i < traj.time_index.size(); ++i) {
                traj_out << traj.time_index[i] << ',' << traj.mean[i] << ',' << traj.lower[i]
                         << ',' << traj.upper[i] << '\n';
            }
        }
    }
    std::cout << "summaries written to " << out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bcmlr: generalized Bayesian multiple-changepoint detection"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value config file with [subcommand] sections (flags take precedence)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario series");
    std::string sim_scenario = "cim";
    std::string sim_variant = "low";
    std::uint64_t sim_seed = 0;
    std::string sim_out = default_out_dir();
    simulate->add_option("--scenario", sim_scenario)->check(CLI::IsMember({"cim", "cic", "cimc"}));
    simulate->add_option("--variant", sim_variant)->check(CLI::IsMember({"low", "high"}));
    simulate->add_option("--seed", sim_seed);
    simulate->add_option("--out", sim_out);

    // fit
    auto* fit = app.add_subcommand("fit", "sample the posterior for a known L");
    FitFlags fit_flags;
    int fit_l = 1;
    add_gibbs_flags(fit, fit_flags);
    fit->add_option("--num-changepoints", fit_l, "number of changepoints L")->required();

    // select
    auto* select = app.add_subcommand("select", "select the number of changepoints");
    FitFlags select_flags;
    select_flags.gibbs.min_seg = 30;
    bcmlr::SelectionConfig selection;
    add_gibbs_flags(select, select_flags);
    select->add_option("--l-fitted", selection.l_fitted);
    select->add_option("--alpha", selection.alpha);
    select->add_option("--tau", selection.tau);
    select->add_option("--zeta", selection.zeta);
    bool no_refit = false;
    select->add_flag("--no-refit", no_refit, "skip the full-data refit at L_hat");

    // bench
    auto* bench = app.add_subcommand("bench", "run the scenario benchmark table");
    std::string bench_scenario = "cim";
    std::string bench_variant = "low";
    bool bench_all = false;
    int bench_replicates = 5;
    bool bench_known = false;
    bool bench_unknown = false;
    bool bench_embed = false;
    std::uint64_t bench_seed = 1;
    std::string bench_out = default_out_dir();
    bench->add_option("--scenario", bench_scenario)->check(CLI::IsMember({"cim", "cic", "cimc"}));
    bench->add_option("--variant", bench_variant)->check(CLI::IsMember({"low", "high"}));
    bench->add_flag("--all", bench_all, "all six scenario cells");
    bench->add_option("--replicates", bench_replicates)->check(CLI::PositiveNumber);
    bench->add_flag("--known-l", bench_known, "treat L as known (default)");
    bench->add_flag("--unknown-l", bench_unknown, "run the selection pipeline");
    bench->add_flag("--embed", bench_embed, "poly2-embed the input");
    bench->add_option("--seed", bench_seed);
    bench->add_option("--out", bench_out);

    // summarize
    auto* summarize = app.add_subcommand("summarize", "summarize a stored draws file");
    std::string sum_draws;
    std::string sum_data;
    double sum_gamma = 0.05;
    std::string sum_out = default_out_dir();
    summarize->add_option("--draws", sum_draws, "binary draws file")->required();
    summarize->add_option("--data", sum_data, "original data CSV for trajectories");
    summarize->add_option("--gamma", sum_gamma)->check(CLI::Range(0.001, 0.999));
    summarize->add_option("--out", sum_out);

    // Let "--config" (an app-level option) appear after the subcommand name.
    for (CLI::App* sub : {simulate, fit, select, bench, summarize}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*simulate) {
            return cmd_simulate(sim_scenario, sim_variant, sim_seed, sim_out);
        }
        if (*fit) {
            return cmd_fit(fit_flags, fit_l);
        }
        if (*select) {
            selection.refit = !no_refit;
            return cmd_select(select_flags, selection);
        }
        if (*bench) {
            return cmd_bench(bench_scenario, bench_variant, bench_all, bench_replicates,
                             !bench_unknown || bench_known, bench_embed, bench_seed,
                             bench_out);
        }
        if (*summarize) {
            return cmd_summarize(sum_draws, sum_data, sum_gamma, sum_out);
        }
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.find("cannot open") != std::string::npos ||
            what.find("truncated") != std::string::npos ||
            what.find("not found") != std::string::npos) {
            std::cerr << "I/O error: " << what << '\n';
            return kExitIo;
        }
        std::cerr << "numerical error: " << what << '\n';
        return kExitNumerical;
    }
    return 0;
}
