#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ekr/errors.hpp"
#include "ekr/pair_stats.hpp"
#include "ekr/report_json.hpp"

namespace {

using ekr::Json;

struct OutputSink {
    std::string path;  // empty means stdout

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            if (text.empty() || text.back() != '\n') {
                std::cout << '\n';
            }
            return;
        }
        std::ofstream f(path);
        if (!f) {
            throw std::runtime_error("cannot open output file: " + path);
        }
        f << text;
        if (text.empty() || text.back() != '\n') {
            f << '\n';
        }
        if (!f) {
            throw std::runtime_error("write failed: " + path);
        }
    }
};

// --out wins; otherwise EKRSIM_OUT_DIR/<name> when the env var is set;
// otherwise stdout
OutputSink resolve_sink(const std::string& out_flag,
                        const std::string& default_name) {
    if (!out_flag.empty()) {
        return OutputSink{out_flag};
    }
    const char* dir = std::getenv("EKRSIM_OUT_DIR");
    if (dir != nullptr && dir[0] != '\0') {
        std::string p = dir;
        if (p.back() != '/') {
            p += '/';
        }
        return OutputSink{p + default_name};
    }
    return OutputSink{};
}

struct CommonArgs {
    int n = 0;
    int k = 0;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 42;
    int threads = 1;
    std::string format;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_trials) {
    cmd->add_option("--n", args.n, "universe size")->required();
    cmd->add_option("--k", args.k, "set size")->required();
    if (with_trials) {
        cmd->add_option("--trials", args.trials, "Monte Carlo trials");
        cmd->add_option("--seed", args.seed, "master seed");
        cmd->add_option("--threads", args.threads, "worker threads");
    }
    cmd->add_option("--out", args.out, "output path");
}

double n_to_35(int n) { return std::pow(static_cast<double>(n), 3.0 / 5.0); }

int run_threshold(const CommonArgs& args, int r) {
    ekr::ThresholdReport rep = ekr::threshold(args.n, args.k, r);
    ekr::AdmissibleB adm = ekr::max_admissible_b(args.n, args.k);
    Json analytic = ekr::threshold_json(rep);
    analytic["max_admissible_b"] = ekr::admissible_json(adm);
    double k_over = args.k / n_to_35(args.n);
    if (k_over >= 0.5 && k_over <= 2.0) {
        // near k = n^{3/5} the largest intersecting family dwarfs the
        // threshold; report both scales side by side
        analytic["ekr_comparison"] =
            Json{{"k_over_n35", ekr::num(k_over)},
                 {"max_intersecting_log10", ekr::num(rep.max_intersecting_log10)},
                 {"t0_log10", ekr::num(std::log10(rep.t0_exact))}};
    }
    Json report = ekr::envelope_json(
        Json{{"n", args.n}, {"k", args.k}, {"r", r}}, std::move(analytic),
        Json::object(), ekr::meta_json(args.seed, args.trials));
    resolve_sink(args.out, "threshold.json").write(report.dump(2));
    return 0;
}

int run_bounds(const CommonArgs& args, int r, std::optional<int> b, double p) {
    Json analytic;
    analytic["janson"] = ekr::janson_json(ekr::janson_bounds(args.n, args.k, r, p));
    analytic["univariate"] =
        ekr::univariate_json(ekr::tv_bound_univariate(args.n, args.k, r, p));
    analytic["max_admissible_b"] =
        ekr::admissible_json(ekr::max_admissible_b(args.n, args.k));
    if (b) {
        analytic["multivariate"] =
            ekr::multivariate_json(ekr::epsilon_multivariate(args.n, args.k, *b, p));
    }
    Json inputs{{"n", args.n}, {"k", args.k}, {"r", r}, {"p", ekr::num(p)}};
    if (b) {
        inputs["b"] = *b;
    }
    Json report =
        ekr::envelope_json(std::move(inputs), std::move(analytic), Json::object(),
                           ekr::meta_json(args.seed, args.trials));
    resolve_sink(args.out, "bounds.json").write(report.dump(2));
    return 0;
}

ekr::ModelConfig build_config(const CommonArgs& args, std::optional<std::uint64_t> t,
                              std::optional<double> p, std::optional<double> a,
                              int r, std::optional<double>* requested_a) {
    ekr::ModelConfig cfg;
    cfg.n = args.n;
    cfg.k = args.k;
    cfg.master_seed = args.seed;
    if (p) {
        cfg.model = ekr::IndependentModel{*p};
        return cfg;
    }
    std::uint64_t tt;
    if (t) {
        tt = *t;
    } else {
        // A-parameterization: nearest integer family size, floor 2, with the
        // realized ratio t/t0 reported downstream
        if (*a <= 0.0) {
            throw ekr::DomainError("A must be positive");
        }
        double t0 = ekr::threshold(args.n, args.k, r).t0_exact;
        tt = static_cast<std::uint64_t>(
            std::max<long long>(2, std::llround(*a * t0)));
        if (requested_a != nullptr) {
            *requested_a = *a;
        }
    }
    cfg.model = ekr::FixedSizeModel{tt};
    return cfg;
}

int run_simulate(const CommonArgs& args, std::optional<std::uint64_t> t,
                 std::optional<double> p, std::optional<double> a, int r,
                 std::optional<int> b, bool dump_family) {
    std::optional<double> requested_a;
    ekr::ModelConfig cfg = build_config(args, t, p, a, r, &requested_a);
    int r_max = std::min(args.k, std::max({r, b.value_or(0), 2}));
    ekr::LawExperiment law =
        ekr::empirical_law(cfg, r_max, args.trials, args.threads);
    ekr::EkrExperiment est = ekr::zero_estimate_from_law(law, r);

    if (args.format == "csv") {
        resolve_sink(args.out, "simulate.csv").write(ekr::histogram_csv(law));
        return 0;
    }
    Json report = ekr::simulate_json(est, law);
    if (requested_a) {
        report["inputs"]["requested_A"] = ekr::num(*requested_a);
    }
    if (dump_family) {
        ekr::ModelConfig first = cfg;
        first.trial_index = 0;
        report["empirical"]["family_trial0"] =
            ekr::serialize_family(ekr::sample_family(first));
    }
    resolve_sink(args.out, "simulate.json").write(report.dump(2));
    return 0;
}

int run_sweep(const CommonArgs& args, const std::vector<double>& a_grid,
              const std::vector<std::uint64_t>& t_grid, int r) {
    std::string out = ekr::sweep_csv_header();
    out += '\n';
    if (!a_grid.empty()) {
        for (double a : a_grid) {
            ekr::ModelConfig cfg =
                build_config(args, std::nullopt, std::nullopt, a, r, nullptr);
            ekr::EkrExperiment e =
                ekr::estimate_zero_probability(cfg, r, args.trials, args.threads);
            out += ekr::sweep_csv_row(e);
            out += '\n';
        }
    } else {
        for (std::uint64_t t : t_grid) {
            ekr::ModelConfig cfg =
                build_config(args, t, std::nullopt, std::nullopt, r, nullptr);
            ekr::EkrExperiment e =
                ekr::estimate_zero_probability(cfg, r, args.trials, args.threads);
            out += ekr::sweep_csv_row(e);
            out += '\n';
        }
    }
    resolve_sink(args.out, "sweep.csv").write(out);
    return 0;
}

int run_oracle(const CommonArgs& args, std::optional<std::uint64_t> t,
               std::optional<double> p, int joint_b) {
    ekr::ModelConfig cfg =
        build_config(args, t, p, std::nullopt, 0, nullptr);
    cfg.master_seed = args.seed;
    ekr::OracleResult res = ekr::oracle_exact(cfg, joint_b);
    resolve_sink(args.out, "oracle.json")
        .write(ekr::oracle_json(res, args.seed).dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thresholds, Poisson-approximation bounds, and Monte Carlo "
                 "experiments for random k-set families"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ekr::version_string());

    CommonArgs th_args;
    int th_r = 0;
    CLI::App* th = app.add_subcommand("threshold", "closed-form thresholds");
    add_common(th, th_args, false);
    th->add_option("--r", th_r, "overlap size");

    CommonArgs bd_args;
    int bd_r = 0;
    int bd_b = 0;
    double bd_p = 0.0;
    CLI::App* bd = app.add_subcommand("bounds", "Janson and Stein-Chen bounds");
    add_common(bd, bd_args, false);
    bd->add_option("--r", bd_r, "overlap size");
    CLI::Option* bd_b_opt = bd->add_option("--b", bd_b, "joint coordinate bound");
    bd->add_option("--p", bd_p, "inclusion probability")->required();

    CommonArgs sim_args;
    int sim_r = 0;
    int sim_b = 0;
    std::uint64_t sim_t = 0;
    double sim_p = 0.0;
    double sim_a = 0.0;
    bool sim_dump = false;
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo experiment");
    add_common(sim, sim_args, true);
    sim->add_option("--r", sim_r, "overlap size for the zero-probability estimate");
    CLI::Option* sim_b_opt = sim->add_option("--b", sim_b, "tracked joint width");
    CLI::Option* sim_t_opt = sim->add_option("--t", sim_t, "fixed family size");
    CLI::Option* sim_p_opt = sim->add_option("--p", sim_p, "inclusion probability");
    CLI::Option* sim_a_opt =
        sim->add_option("--A", sim_a, "family size as a multiple of t0");
    sim_t_opt->excludes(sim_p_opt)->excludes(sim_a_opt);
    sim_p_opt->excludes(sim_a_opt);
    sim->add_flag("--dump-family", sim_dump, "embed the first sampled family");
    sim->add_option("--format", sim_args.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CommonArgs sw_args;
    int sw_r = 0;
    std::vector<double> sw_a;
    std::vector<std::uint64_t> sw_t;
    CLI::App* sw = app.add_subcommand("sweep", "CSV sweep over a grid");
    add_common(sw, sw_args, true);
    sw->add_option("--r", sw_r, "overlap size");
    CLI::Option* sw_a_opt =
        sw->add_option("--A-grid", sw_a, "comma-separated A values")->delimiter(',');
    CLI::Option* sw_t_opt =
        sw->add_option("--t-grid", sw_t, "comma-separated t values")->delimiter(',');
    sw_a_opt->excludes(sw_t_opt);

    CommonArgs or_args;
    int or_b = -1;
    std::uint64_t or_t = 0;
    double or_p = 0.0;
    CLI::App* orc = app.add_subcommand("oracle", "exhaustive-enumeration oracle");
    add_common(orc, or_args, false);
    orc->add_option("--seed", or_args.seed, "echoed into the report");
    CLI::Option* or_t_opt = orc->add_option("--t", or_t, "fixed family size");
    CLI::Option* or_p_opt = orc->add_option("--p", or_p, "inclusion probability");
    or_t_opt->excludes(or_p_opt);
    orc->add_option("--b", or_b, "joint width (default min(k,4))");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (th->parsed()) {
            return run_threshold(th_args, th_r);
        }
        if (bd->parsed()) {
            std::optional<int> b;
            if (bd_b_opt->count() > 0) {
                b = bd_b;
            }
            return run_bounds(bd_args, bd_r, b, bd_p);
        }
        if (sim->parsed()) {
            if (sim_t_opt->count() + sim_p_opt->count() + sim_a_opt->count() != 1) {
                std::cerr << "simulate: exactly one of --t / --p / --A required\n";
                return 1;
            }
            std::optional<std::uint64_t> t;
            std::optional<double> p;
            std::optional<double> a;
            if (sim_t_opt->count() > 0) {
                t = sim_t;
            }
            if (sim_p_opt->count() > 0) {
                p = sim_p;
            }
            if (sim_a_opt->count() > 0) {
                a = sim_a;
            }
            std::optional<int> b;
            if (sim_b_opt->count() > 0) {
                b = sim_b;
            }
            return run_simulate(sim_args, t, p, a, sim_r, b, sim_dump);
        }
        if (sw->parsed()) {
            if ((sw_a.empty() && sw_t.empty()) || (!sw_a.empty() && !sw_t.empty())) {
                std::cerr << "sweep: exactly one of --A-grid / --t-grid required\n";
                return 1;
            }
            return run_sweep(sw_args, sw_a, sw_t, sw_r);
        }
        if (orc->parsed()) {
            if (or_t_opt->count() + or_p_opt->count() != 1) {
                std::cerr << "oracle: exactly one of --t / --p required\n";
                return 1;
            }
            std::optional<std::uint64_t> t;
            std::optional<double> p;
            if (or_t_opt->count() > 0) {
                t = or_t;
            }
            if (or_p_opt->count() > 0) {
                p = or_p;
            }
            return run_oracle(or_args, t, p, or_b);
        }
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ekr::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const ekr::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const ekr::SaturationError& e) {
        std::cerr << "saturation: " << e.what() << '\n';
        return 4;
    } catch (const ekr::CapacityError& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 10;
    }
}
