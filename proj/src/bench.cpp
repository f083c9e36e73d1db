#include "sublinear/bench.hpp"

#include "sublinear/errors.hpp"
#include "sublinear/estimators.hpp"
#include "sublinear/random.hpp"
#include "sublinear/sparse.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>

namespace sublinear {

namespace {

constexpr std::uint64_t kFreshStream = 0xF8E5;

struct Timed {
    MethodRecord record;
    double seconds = 0.0;
};

FitResult fit_method(Method method, const Dataset& data, const BenchmarkOptions& o) {
    switch (method) {
        case Method::ols: return ols_fit(data);
        case Method::minimax: return minimax_fit(data, o.solver);
        case Method::profile: return profile_minimax_fit(data, o.solver);
        case Method::glasso:
        case Method::glasso_mu: {
            LassoConfig cfg;
            cfg.solver = o.solver;
            cfg.cv_folds = o.cv_folds;
            const auto objective = method == Method::glasso ? CvObjective::mean_certain : CvObjective::mean_uncertain;
            cfg.lambda = o.lambda ? *o.lambda : cv_select_lambda(data, cfg, objective).lambda_star;
            return method == Method::glasso ? glasso_fit(data, cfg) : glasso_mean_uncertain_fit(data, cfg);
        }
    }
    throw DomainError("unknown method");
}

Timed run_method(Method method, const SimulatedData& train, const Dataset& fresh, const BenchmarkOptions& o) {
    Timed out;
    auto& rec = out.record;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const FitResult fit = fit_method(method, train.data, o);
        const double shift = fit.mu_upper_hat.value_or(0.0);
        rec.beta = fit.beta;
        rec.mu_upper_hat = fit.mu_upper_hat;
        rec.lambda = fit.diagnostics.lambda;
        rec.converged = fit.converged;
        rec.iterations = fit.iterations;
        rec.mpe_train = mpe(train.data, fit.beta, shift);
        rec.ape_train = ape(train.data, fit.beta, shift);
        rec.mpe_fresh = mpe(fresh, fit.beta, shift);
        rec.ape_fresh = ape(fresh, fit.beta, shift);
        for (Eigen::Index k = 0; k < fit.beta.size(); ++k) {
            if (fit.beta(k) == 0.0) continue;
            ++rec.selected;
            if (train.beta0(k) != 0.0)
                ++rec.true_positives;
            else
                ++rec.false_positives;
        }
        rec.ok = true;
    } catch (const Error& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::size_t index_of(const std::vector<Method>& methods, Method m) {
    const auto it = std::find(methods.begin(), methods.end(), m);
    return it == methods.end() ? methods.size() : static_cast<std::size_t>(it - methods.begin());
}

/// Block whose variance drives the limit law of the estimator.
double limit_variance(Method method, const std::vector<FamilyMember>& family) {
    double mu_bar = family.front().mean;
    for (const auto& f : family) mu_bar = std::max(mu_bar, f.mean);
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        double score = family[i].variance;
        if (method == Method::profile) score += (mu_bar - family[i].mean) * (mu_bar - family[i].mean);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return family[best].variance;
}

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::ols: return "ols";
        case Method::minimax: return "minimax";
        case Method::profile: return "profile";
        case Method::glasso: return "glasso";
        case Method::glasso_mu: return "glasso_mu";
    }
    return "ols";
}

Method method_from_string(const std::string& name) {
    if (name == "ols") return Method::ols;
    if (name == "minimax") return Method::minimax;
    if (name == "profile") return Method::profile;
    if (name == "glasso") return Method::glasso;
    if (name == "glasso_mu") return Method::glasso_mu;
    throw DomainError("unknown method '" + name + "'");
}

std::vector<Method> methods_from_string(const std::string& list) {
    std::vector<Method> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(method_from_string(item));
    if (out.empty()) throw DomainError("no methods given");
    return out;
}

void BenchmarkOptions::validate() const {
    if (methods.empty()) throw DomainError("benchmark needs at least one method");
    if (replications < 1) throw DomainError("benchmark needs at least one replication");
    design.validate();
    if (fixed_family && fixed_family->size() != design.m)
        throw DomainError("fixed family size must equal the block count");
    solver.validate();
}

BenchmarkOptions benchmark_options(ExperimentId id, std::vector<Method> methods, std::size_t replications,
                                   std::uint64_t seed) {
    BenchmarkOptions o;
    o.label = to_string(id);
    o.design = experiment_config(id, seed);
    o.methods = std::move(methods);
    o.replications = replications;
    o.seed = seed;
    return o;
}

const MethodSummary* BenchmarkReport::find(const std::string& method) const {
    for (const auto& m : methods)
        if (m.method == method) return &m;
    return nullptr;
}

BenchmarkReport run_benchmark(const BenchmarkOptions& options) {
    options.validate();
    const std::size_t R = options.replications;
    const std::size_t M = options.methods.size();
    std::vector<ReplicationRecord> records(R);
    std::vector<std::vector<double>> seconds(M, std::vector<double>(R, 0.0));

    auto run_one = [&](std::size_t r) {
        ExperimentConfig cfg = options.design;
        cfg.seed = derive_seed(options.seed, {r});
        const SimulatedData train =
            options.fixed_family ? simulate_with_family(cfg, *options.fixed_family, cfg.seed) : simulate(cfg);
        const SimulatedData fresh = simulate_with_family(cfg, train.family, derive_seed(cfg.seed, {kFreshStream}));
        auto& rec = records[r];
        rec.index = r;
        rec.family = train.family.members();
        rec.methods.resize(M);
        for (std::size_t k = 0; k < M; ++k) {
            Timed t = run_method(options.methods[k], train, fresh.data, options);
            rec.methods[k] = std::move(t.record);
            seconds[k][r] = t.seconds;
            if (!rec.methods[k].ok) rec.failed = true;
        }
        const std::size_t ls = index_of(options.methods, Method::ols);
        const std::size_t mm = index_of(options.methods, Method::minimax);
        const std::size_t pr = index_of(options.methods, Method::profile);
        if (!rec.failed && ls < M && mm < M) {
            const auto& a = rec.methods[mm];
            const auto& b = rec.methods[ls];
            rec.minimax_dominance =
                a.mpe_train <= b.mpe_train + options.slack && a.ape_train >= b.ape_train - options.slack;
        }
        if (!rec.failed && ls < M && pr < M)
            rec.shifted_dominance = rec.methods[pr].mpe_train <= rec.methods[ls].mpe_train + options.slack;
    };

    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, R);
    if (threads <= 1) {
        for (std::size_t r = 0; r < R; ++r) run_one(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < R; r = next++) run_one(r);
            });
        for (auto& th : pool) th.join();
    }

    BenchmarkReport report;
    report.experiment = options.label;
    report.seed = options.seed;
    report.replications = R;
    std::vector<std::size_t> good;
    for (std::size_t r = 0; r < R; ++r) {
        if (records[r].failed) {
            ++report.failed_replications;
            continue;
        }
        good.push_back(r);
        if (records[r].minimax_dominance) {
            ++report.minimax_dominance_checked;
            if (*records[r].minimax_dominance) ++report.minimax_dominance_passed;
        }
        if (records[r].shifted_dominance) {
            ++report.shifted_dominance_checked;
            if (*records[r].shifted_dominance) ++report.shifted_dominance_passed;
        }
    }

    const auto p = static_cast<Eigen::Index>(options.design.p);
    const double count = static_cast<double>(good.size());
    for (std::size_t k = 0; k < M; ++k) {
        MethodSummary s;
        s.method = to_string(options.methods[k]);
        s.runtime_seconds = ordered_sum(seconds[k]);
        auto mean_of = [&](auto field) {
            std::vector<double> v;
            for (auto r : good) v.push_back(field(records[r].methods[k]));
            return good.empty() ? 0.0 : ordered_sum(v) / count;
        };
        s.mpe_train = mean_of([](const MethodRecord& m) { return m.mpe_train; });
        s.ape_train = mean_of([](const MethodRecord& m) { return m.ape_train; });
        s.mpe_fresh = mean_of([](const MethodRecord& m) { return m.mpe_fresh; });
        s.ape_fresh = mean_of([](const MethodRecord& m) { return m.ape_fresh; });
        s.mean_selected = mean_of([](const MethodRecord& m) { return static_cast<double>(m.selected); });
        s.mean_false_positives = mean_of([](const MethodRecord& m) { return static_cast<double>(m.false_positives); });
        const std::size_t actives = static_cast<std::size_t>((options.design.beta0.array() != 0.0).count());
        s.all_actives_rate = mean_of([actives](const MethodRecord& m) { return m.true_positives == actives ? 1.0 : 0.0; });
        for (auto r : good)
            if (records[r].methods[k].converged) ++s.converged;

        s.coefficient_mse = VectorXd::Zero(p);
        if (!good.empty()) {
            for (Eigen::Index j = 0; j < p; ++j) {
                std::vector<double> sq;
                for (auto r : good) {
                    const double d = records[r].methods[k].beta(j) - options.design.beta0(j);
                    sq.push_back(d * d);
                }
                s.coefficient_mse(j) = ordered_sum(sq) / count;
            }
        }

        const Method method = options.methods[k];
        if ((method == Method::minimax || method == Method::profile) && good.size() >= 100) {
            // rows in replication order; the covariance does not depend on it
            MatrixXd est(static_cast<Eigen::Index>(good.size()), p);
            std::vector<double> targets;
            for (std::size_t g = 0; g < good.size(); ++g) {
                est.row(static_cast<Eigen::Index>(g)) = records[good[g]].methods[k].beta.transpose();
                targets.push_back(limit_variance(method, records[good[g]].family));
            }
            const double sigma2 = ordered_sum(targets) / count;
            s.normality = normality_check(est, options.design.beta0, static_cast<double>(options.design.n), sigma2,
                                          options.design.covariate_second_moment());
        }
        report.methods.push_back(std::move(s));
    }
    report.records = std::move(records);
    return report;
}

std::string format_table(const BenchmarkReport& report) {
    std::ostringstream out;
    char buf[64];
    out << "Experiment " << report.experiment << "  (replications " << report.replications << ", failed "
        << report.failed_replications << ", seed " << report.seed << ")\n";
    const int w = 14;
    auto cell = [&](const std::string& s) {
        std::snprintf(buf, sizeof buf, "%*s", w, s.c_str());
        out << buf;
    };
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%*.4f", w, v);
        out << buf;
    };
    cell("");
    for (const auto& m : report.methods) cell(m.method);
    out << '\n';
    if (!report.methods.empty()) {
        const auto p = report.methods.front().coefficient_mse.size();
        const Eigen::Index shown = std::min<Eigen::Index>(p, 5);
        for (Eigen::Index j = 0; j < shown; ++j) {
            cell("MSE(beta" + std::to_string(j + 1) + ")");
            for (const auto& m : report.methods) num(m.coefficient_mse(j));
            out << '\n';
        }
        if (p > shown) {
            cell("MSE(mean)");
            for (const auto& m : report.methods) num(m.coefficient_mse.mean());
            out << '\n';
        }
    }
    const std::pair<const char*, double MethodSummary::*> rows[] = {
        {"MPE", &MethodSummary::mpe_train},
        {"APE", &MethodSummary::ape_train},
        {"MPE(fresh)", &MethodSummary::mpe_fresh},
        {"APE(fresh)", &MethodSummary::ape_fresh},
    };
    for (const auto& [name, field] : rows) {
        cell(name);
        for (const auto& m : report.methods) num(m.*field);
        out << '\n';
    }
    if (report.minimax_dominance_checked)
        out << "minimax dominance: " << report.minimax_dominance_passed << "/" << report.minimax_dominance_checked
            << '\n';
    if (report.shifted_dominance_checked)
        out << "shifted dominance: " << report.shifted_dominance_passed << "/" << report.shifted_dominance_checked
            << '\n';
    return out.str();
}

}  // namespace sublinear
