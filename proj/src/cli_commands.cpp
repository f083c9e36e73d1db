#include "sublinear/cli.hpp"

#include "sublinear/bench.hpp"
#include "sublinear/errors.hpp"
#include "sublinear/estimators.hpp"
#include "sublinear/io.hpp"
#include "sublinear/partition.hpp"
#include "sublinear/preprocess.hpp"
#include "sublinear/simgen.hpp"
#include "sublinear/sparse.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace sublinear::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct SolverFlags {
    std::string config_path;
    std::optional<std::size_t> max_iterations;
    std::optional<double> tolerance;
    std::optional<std::string> step_rule;
    std::optional<std::uint64_t> seed;
    bool no_refine = false;

    void add(CLI::App* app) {
        app->add_option("--config", config_path, "key = value file with solver defaults");
        app->add_option("--max-iterations", max_iterations, "subgradient iteration budget");
        app->add_option("--tolerance", tolerance, "relative optimality-gap tolerance");
        app->add_option("--step-rule", step_rule, "polyak or diminishing");
        app->add_option("--seed", seed, "random seed");
        app->add_flag("--no-refine", no_refine, "stop after the subgradient stage");
    }
};

struct Settings {
    SolverConfig solver;
    std::optional<double> lambda;
    std::size_t cv_folds = 5;
    double zero_threshold = 1e-6;
    double alpha = 0.05;
    std::uint64_t seed = 0;
};

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw SchemaError("config key '" + key + "': '" + v + "' is not a number", 0);
    }
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const auto u = std::stoull(v, &pos);
        if (pos != v.size() || v.front() == '-') throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw SchemaError("config key '" + key + "': '" + v + "' is not a non-negative integer", 0);
    }
}

Settings resolve_settings(const SolverFlags& flags) {
    Settings s;
    if (!flags.config_path.empty()) {
        for (const auto& [key, value] : io::read_config(flags.config_path)) {
            if (key == "max_iterations") s.solver.max_iterations = to_unsigned(key, value);
            else if (key == "tolerance") s.solver.tolerance = to_double(key, value);
            else if (key == "step_rule") s.solver.step_rule = step_rule_from_string(value);
            else if (key == "refine") s.solver.refine = value == "true" || value == "1";
            else if (key == "seed") s.seed = to_unsigned(key, value);
            else if (key == "lambda") s.lambda = to_double(key, value);
            else if (key == "cv_folds") s.cv_folds = to_unsigned(key, value);
            else if (key == "zero_threshold") s.zero_threshold = to_double(key, value);
            else if (key == "alpha") s.alpha = to_double(key, value);
            else throw SchemaError("unknown config key '" + key + "'", 0);
        }
    }
    if (flags.max_iterations) s.solver.max_iterations = *flags.max_iterations;
    if (flags.tolerance) s.solver.tolerance = *flags.tolerance;
    if (flags.step_rule) s.solver.step_rule = step_rule_from_string(*flags.step_rule);
    if (flags.no_refine) s.solver.refine = false;
    if (flags.seed) s.seed = *flags.seed;
    s.solver.seed = s.seed;
    s.solver.validate();
    return s;
}

fs::path prepare_dir(const std::string& dir) {
    const fs::path p(dir.empty() ? "." : dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory '" + p.string() + "': " + ec.message());
    return p;
}

std::string fit_summary(const FitResult& fit) {
    std::ostringstream s;
    s << "method: " << fit.diagnostics.method << '\n';
    s << "beta:";
    for (Eigen::Index k = 0; k < fit.beta.size(); ++k) s << ' ' << io::format_double(fit.beta(k));
    s << '\n';
    if (fit.mu_upper_hat) s << "mu_upper_hat: " << io::format_double(*fit.mu_upper_hat) << '\n';
    if (fit.diagnostics.lambda) s << "lambda: " << io::format_double(*fit.diagnostics.lambda) << '\n';
    if (!fit.diagnostics.selected.empty()) {
        s << "selected:";
        for (std::size_t k = 0; k < fit.diagnostics.selected.size(); ++k)
            if (fit.diagnostics.selected[k]) s << " x" << (k + 1);
        s << '\n';
    }
    s << "objective: " << io::format_double(fit.objective_value) << '\n';
    s << "active block: " << (fit.active_block + 1) << '\n';
    s << "iterations: " << fit.iterations << '\n';
    s << "converged: " << (fit.converged ? "yes" : "no") << '\n';
    s << "optimality gap: " << io::format_double(fit.diagnostics.optimality_gap) << '\n';
    for (const auto& w : fit.diagnostics.warnings) s << "warning: " << w << '\n';
    return s.str();
}

Dataset load_data(const std::string& path, bool rebalance, std::optional<std::size_t> m,
                  std::vector<std::string>& warnings) {
    Dataset data = io::read_csv(path);
    if (m) data = data.with_blocks(time_order_partition(data.rows(), *m));
    if (!data.blocks().balanced()) {
        if (!rebalance) throw UnbalancedPartitionError("unbalanced partition; rerun with --rebalance to truncate blocks");
        RebalancedData r = rebalance_dataset(data);
        warnings.push_back("rebalanced: " + std::to_string(r.dropped_rows.size()) +
                           " rows dropped to equalize block sizes");
        data = std::move(r.data);
    }
    return data;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mini-max regression over data blocks with distribution-uncertain errors", "sublinreg"};
    app.require_subcommand(1);

    // simulate
    std::string sim_experiment;
    std::string sim_out = ".";
    std::optional<std::uint64_t> sim_seed;
    std::optional<std::size_t> sim_m, sim_n;
    auto* simulate_cmd = app.add_subcommand("simulate", "write a simulated dataset and its ground truth");
    simulate_cmd->add_option("experiment", sim_experiment, "exp1, exp2, exp3_indep, exp3_corr or exp4")->required();
    simulate_cmd->add_option("--seed", sim_seed, "random seed");
    simulate_cmd->add_option("-o,--out", sim_out, "output directory");
    simulate_cmd->add_option("--m", sim_m, "override the block count");
    simulate_cmd->add_option("--n", sim_n, "override the block size");

    // fit
    std::string fit_data;
    std::string fit_method = "minimax";
    std::string fit_init = "ols";
    std::string fit_out = ".";
    std::optional<double> fit_lambda;
    std::optional<std::size_t> fit_cv, fit_m;
    bool fit_rebalance = false;
    SolverFlags fit_flags;
    auto* fit_cmd = app.add_subcommand("fit", "fit one estimator to a CSV dataset");
    fit_cmd->add_option("data", fit_data, "CSV with header y,x1,...,xp,block")->required();
    fit_cmd->add_option("--method", fit_method, "ols, minimax, profile, glasso or glasso_mu");
    fit_cmd->add_option("--init", fit_init, "initial estimator for profile: ols or minimax");
    fit_cmd->add_option("--lambda", fit_lambda, "penalty weight for glasso methods");
    fit_cmd->add_option("--cv", fit_cv, "choose lambda by K-fold cross-validation");
    fit_cmd->add_option("--m", fit_m, "re-split rows into m time-ordered blocks");
    fit_cmd->add_flag("--rebalance", fit_rebalance, "truncate blocks to the smallest block size");
    fit_cmd->add_option("-o,--out", fit_out, "output directory");
    fit_flags.add(fit_cmd);

    // select
    std::string sel_data;
    std::string sel_method = "glasso";
    std::string sel_out = ".";
    std::size_t sel_cv = 5;
    std::optional<std::size_t> sel_m;
    bool sel_rebalance = false;
    SolverFlags sel_flags;
    auto* select_cmd = app.add_subcommand("select", "choose lambda by cross-validation and fit");
    select_cmd->add_option("data", sel_data, "CSV dataset")->required();
    select_cmd->add_option("--method", sel_method, "glasso or glasso_mu");
    select_cmd->add_option("--cv", sel_cv, "number of folds");
    select_cmd->add_option("--m", sel_m, "re-split rows into m time-ordered blocks");
    select_cmd->add_flag("--rebalance", sel_rebalance, "truncate blocks to the smallest block size");
    select_cmd->add_option("-o,--out", sel_out, "output directory");
    sel_flags.add(select_cmd);

    // benchmark
    std::string bench_experiment;
    std::string bench_methods = "minimax,ols";
    std::string bench_out = ".";
    long long bench_reps = 100;
    std::optional<double> bench_lambda;
    std::size_t bench_cv = 5;
    std::size_t bench_threads = 0;
    SolverFlags bench_flags;
    auto* bench = app.add_subcommand("benchmark", "Monte Carlo comparison of estimators");
    bench->add_option("experiment", bench_experiment, "experiment id")->required();
    bench->add_option("--method", bench_methods, "comma-separated methods");
    bench->add_option("-R,--R,--replications", bench_reps, "number of replications");
    bench->add_option("--lambda", bench_lambda, "fixed lambda for glasso methods (CV otherwise)");
    bench->add_option("--cv", bench_cv, "folds for lambda selection");
    bench->add_option("--threads", bench_threads, "worker threads, 0 = hardware concurrency");
    bench->add_option("-o,--out", bench_out, "output directory");
    bench_flags.add(bench);

    // identify
    std::string id_data;
    std::string id_out = ".";
    std::optional<std::size_t> id_m, id_n;
    std::optional<double> id_alpha;
    SolverFlags id_flags;
    auto* identify = app.add_subcommand("identify", "estimate the maximum-variance block");
    identify->add_option("data", id_data, "CSV dataset (rows in time order)")->required();
    identify->add_option("--m", id_m, "initial block count m0");
    identify->add_option("--n", id_n, "initial block size n0");
    identify->add_option("--alpha", id_alpha, "level of the variance-ratio test");
    identify->add_option("-o,--out", id_out, "output directory");
    id_flags.add(identify);

    // report
    std::string rep_path;
    std::string rep_format = "text";
    auto* report = app.add_subcommand("report", "print a fit or benchmark JSON file");
    report->add_option("file", rep_path, "fit.json or benchmark.json")->required();
    report->add_option("--format", rep_format, "text or json");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*simulate_cmd) {
            const ExperimentId id = experiment_from_string(sim_experiment);
            ExperimentConfig cfg = experiment_config(id, sim_seed.value_or(0));
            if (sim_m) cfg.m = *sim_m;
            if (sim_n) cfg.n = *sim_n;
            const SimulatedData sim = simulate(cfg);
            const fs::path dir = prepare_dir(sim_out);
            io::write_csv((dir / "data.csv").string(), sim.data);
            Json truth = io::to_json(sim);
            truth["experiment"] = to_string(id);
            io::write_text((dir / "truth.json").string(), io::dump(truth));
            out << "wrote " << (dir / "data.csv").string() << " (" << sim.data.rows() << " rows) and "
                << (dir / "truth.json").string() << '\n';
            return kOk;
        }

        if (*fit_cmd) {
            const Settings s = resolve_settings(fit_flags);
            std::vector<std::string> warnings;
            const Dataset data = load_data(fit_data, fit_rebalance, fit_m, warnings);
            const Method method = method_from_string(fit_method);
            FitResult result;
            std::optional<CvCurve> curve;
            switch (method) {
                case Method::ols: result = ols_fit(data); break;
                case Method::minimax: result = minimax_fit(data, s.solver); break;
                case Method::profile: {
                    if (fit_init != "ols" && fit_init != "minimax") throw DomainError("--init must be ols or minimax");
                    const auto init = fit_init == "ols" ? ProfileInit::ols : ProfileInit::minimax;
                    result = profile_minimax_fit(data, s.solver, init);
                    break;
                }
                case Method::glasso:
                case Method::glasso_mu: {
                    LassoConfig cfg;
                    cfg.solver = s.solver;
                    cfg.zero_threshold = s.zero_threshold;
                    cfg.cv_folds = fit_cv.value_or(s.cv_folds);
                    const auto lam = fit_lambda ? fit_lambda : s.lambda;
                    if (fit_cv || !lam) {
                        curve = cv_select_lambda(data, cfg, method == Method::glasso ? CvObjective::mean_certain
                                                                                    : CvObjective::mean_uncertain);
                        cfg.lambda = curve->lambda_star;
                    } else {
                        cfg.lambda = *lam;
                    }
                    result = method == Method::glasso ? glasso_fit(data, cfg) : glasso_mean_uncertain_fit(data, cfg);
                    break;
                }
            }
            for (auto& w : warnings) result.diagnostics.warnings.push_back(w);
            const fs::path dir = prepare_dir(fit_out);
            io::write_text((dir / "fit.json").string(), io::dump(io::to_json(result)));
            if (curve) io::write_text((dir / "cv.json").string(), io::dump(io::to_json(*curve)));
            const std::string summary = fit_summary(result);
            io::write_text((dir / "summary.txt").string(), summary);
            out << summary;
            if (!result.converged) {
                err << "error: solver did not converge; partial result written\n";
                return kNotConverged;
            }
            return kOk;
        }

        if (*select_cmd) {
            const Settings s = resolve_settings(sel_flags);
            std::vector<std::string> warnings;
            const Dataset data = load_data(sel_data, sel_rebalance, sel_m, warnings);
            const Method method = method_from_string(sel_method);
            if (method != Method::glasso && method != Method::glasso_mu)
                throw DomainError("select supports glasso and glasso_mu");
            LassoConfig cfg;
            cfg.solver = s.solver;
            cfg.zero_threshold = s.zero_threshold;
            cfg.cv_folds = sel_cv;
            const CvCurve curve = cv_select_lambda(
                data, cfg, method == Method::glasso ? CvObjective::mean_certain : CvObjective::mean_uncertain);
            cfg.lambda = curve.lambda_star;
            FitResult result = method == Method::glasso ? glasso_fit(data, cfg) : glasso_mean_uncertain_fit(data, cfg);
            for (auto& w : warnings) result.diagnostics.warnings.push_back(w);
            const fs::path dir = prepare_dir(sel_out);
            io::write_text((dir / "cv.json").string(), io::dump(io::to_json(curve)));
            io::write_text((dir / "fit.json").string(), io::dump(io::to_json(result)));
            const std::string summary = fit_summary(result);
            io::write_text((dir / "summary.txt").string(), summary);
            out << summary;
            return result.converged ? kOk : kNotConverged;
        }

        if (*bench) {
            if (bench_reps < 1) throw DomainError("--R must be at least 1");
            const Settings s = resolve_settings(bench_flags);
            const ExperimentId id = experiment_from_string(bench_experiment);
            BenchmarkOptions o = benchmark_options(id, methods_from_string(bench_methods),
                                                   static_cast<std::size_t>(bench_reps), s.seed);
            o.solver = s.solver;
            o.lambda = bench_lambda ? bench_lambda : s.lambda;
            o.cv_folds = bench_cv;
            o.threads = bench_threads;
            const BenchmarkReport r = run_benchmark(o);
            const fs::path dir = prepare_dir(bench_out);
            io::write_text((dir / "benchmark.json").string(), io::dump(io::to_json(r)));
            const std::string table = format_table(r);
            io::write_text((dir / "table.txt").string(), table);
            out << table;
            return kOk;
        }

        if (*identify) {
            const Settings s = resolve_settings(id_flags);
            const Dataset data = io::read_csv(id_data);
            PartitionConfig cfg;
            cfg.mode = PartitionMode::data_driven;
            cfg.m0 = id_m.value_or(0);
            cfg.n0 = id_n.value_or(0);
            cfg.alpha = id_alpha.value_or(s.alpha);
            const BlockIdentification ident = identify_max_variance_blocks(data, cfg);
            Json j = io::to_json(ident);
            const FitResult ls = ols_fit(subset_rows(data, ident.rows));
            j["ols_on_identified_rows"] = io::to_json(ls);
            const fs::path dir = prepare_dir(id_out);
            io::write_text((dir / "identify.json").string(), io::dump(j));
            out << "identified " << ident.rows.size() << " rows from " << ident.merged_blocks.size() << " of "
                << ident.m0 << " initial blocks\n";
            for (const auto& w : ident.warnings) out << "warning: " << w << '\n';
            return kOk;
        }

        if (*report) {
            const Json j = io::read_json(rep_path);
            if (rep_format != "text" && rep_format != "json") throw DomainError("--format must be text or json");
            if (j.contains("beta")) {
                const FitResult result = io::fit_result_from_json(j);
                out << (rep_format == "json" ? io::dump(io::to_json(result)) : fit_summary(result));
                return kOk;
            }
            if (j.contains("methods") && j.contains("experiment")) {
                if (rep_format == "json") {
                    out << io::dump(j);
                    return kOk;
                }
                out << "Experiment " << j.at("experiment").get<std::string>() << " ("
                    << j.at("replications").get<std::size_t>() << " replications)\n";
                for (const auto& m : j.at("methods")) {
                    out << "  " << m.at("method").get<std::string>()
                        << ": MPE " << io::format_double(m.at("training").at("mpe").get<double>())
                        << ", APE " << io::format_double(m.at("training").at("ape").get<double>())
                        << ", fresh MPE " << io::format_double(m.at("fresh_sample").at("mpe").get<double>())
                        << ", fresh APE " << io::format_double(m.at("fresh_sample").at("ape").get<double>()) << '\n';
                }
                return kOk;
            }
            throw SchemaError("'" + rep_path + "' is neither a fit nor a benchmark report", 0);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kPrecondition;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace sublinear::cli
