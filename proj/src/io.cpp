#include "sublinear/io.hpp"

#include "sublinear/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sublinear::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line, const std::string& column) {
    const std::string t = trim(field);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != last)
        throw SchemaError("column '" + column + "': '" + t + "' is not a number", line);
    if (!std::isfinite(v)) throw SchemaError("column '" + column + "': non-finite value", line);
    return v;
}

template <class T>
Json index_list(const std::vector<T>& v) {
    Json a = Json::array();
    for (auto i : v) a.push_back(i + 1);
    return a;
}

std::vector<std::size_t> index_list_from(const Json& j) {
    std::vector<std::size_t> out;
    for (const auto& v : j) {
        const auto i = v.get<std::size_t>();
        if (i == 0) throw SchemaError("block indices are 1-based", 0);
        out.push_back(i - 1);
    }
    return out;
}

Json vector_json(const VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json matrix_json(const MatrixXd& m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        a.push_back(row);
    }
    return a;
}

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json family_json(const std::vector<FamilyMember>& family) {
    Json a = Json::array();
    for (const auto& f : family) a.push_back({{"mean", f.mean}, {"variance", f.variance}});
    return a;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Dataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw SchemaError("empty file, expected header 'y,x1,...,xp,block'", 1);
    std::vector<std::string> header = split_fields(line);
    for (auto& h : header) h = trim(h);
    if (header.size() < 3 || header.front() != "y" || header.back() != "block")
        throw SchemaError("header must be 'y,x1,...,xp,block'", 1);
    const std::size_t p = header.size() - 2;
    for (std::size_t k = 0; k < p; ++k)
        if (header[k + 1] != "x" + std::to_string(k + 1))
            throw SchemaError("header column " + std::to_string(k + 2) + " must be 'x" + std::to_string(k + 1) + "'", 1);

    std::vector<double> ys;
    std::vector<std::vector<double>> xs;
    std::vector<std::size_t> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) throw SchemaError("empty line; missing values are not allowed", line_no);
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw SchemaError("expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()),
                              line_no);
        ys.push_back(parse_number(fields[0], line_no, "y"));
        std::vector<double> row(p);
        for (std::size_t k = 0; k < p; ++k) row[k] = parse_number(fields[k + 1], line_no, header[k + 1]);
        xs.push_back(std::move(row));
        const std::string b = trim(fields.back());
        std::size_t label = 0;
        const auto res = std::from_chars(b.data(), b.data() + b.size(), label);
        if (b.empty() || res.ec != std::errc() || res.ptr != b.data() + b.size() || label < 1)
            throw SchemaError("column 'block': '" + b + "' is not a positive integer", line_no);
        labels.push_back(label - 1);
    }
    if (ys.empty()) throw SchemaError("no data rows", line_no);

    std::size_t m = 0;
    for (auto l : labels) m = std::max(m, l + 1);
    std::vector<bool> seen(m, false);
    for (auto l : labels) seen[l] = true;
    for (std::size_t i = 0; i < m; ++i)
        if (!seen[i]) throw SchemaError("block labels must cover 1.." + std::to_string(m) + " without gaps", 0);

    const auto n = static_cast<Eigen::Index>(ys.size());
    VectorXd y(n);
    MatrixXd x(n, static_cast<Eigen::Index>(p));
    for (Eigen::Index r = 0; r < n; ++r) {
        y(r) = ys[static_cast<std::size_t>(r)];
        for (std::size_t k = 0; k < p; ++k) x(r, static_cast<Eigen::Index>(k)) = xs[static_cast<std::size_t>(r)][k];
    }
    return Dataset(std::move(y), std::move(x), BlockPartition::from_labels(labels));
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    out << "y";
    for (std::size_t k = 0; k < data.dim(); ++k) out << ",x" << (k + 1);
    out << ",block\n";
    const auto labels = data.blocks().labels(data.rows());
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const auto rr = static_cast<Eigen::Index>(r);
        out << format_double(data.y()(rr));
        for (std::size_t k = 0; k < data.dim(); ++k) out << ',' << format_double(data.x()(rr, static_cast<Eigen::Index>(k)));
        out << ',' << (labels[r] + 1) << '\n';
    }
}

void write_csv(const std::string& path, const Dataset& data) {
    auto out = open_out(path);
    write_csv(out, data);
    if (!out) throw IoError("failed writing '" + path + "'");
}

Json to_json(const FitResult& fit) {
    const auto& d = fit.diagnostics;
    Json diag = {
        {"method", d.method},
        {"stage", d.stage},
        {"optimality_gap", d.optimality_gap},
        {"lower_bound", d.lower_bound},
        {"tied_blocks", index_list(d.tied_blocks)},
        {"active_set", index_list(d.active_set)},
        {"block_mse", d.block_mse},
        {"lambda", optional_json(d.lambda)},
        {"selected", d.selected},
        {"mu_block", d.mu_block ? Json(*d.mu_block + 1) : Json(nullptr)},
        {"warnings", d.warnings},
    };
    return {
        {"beta", vector_json(fit.beta)},
        {"mu_upper_hat", optional_json(fit.mu_upper_hat)},
        {"objective_value", fit.objective_value},
        {"active_block", fit.active_block + 1},
        {"iterations", fit.iterations},
        {"converged", fit.converged},
        {"diagnostics", diag},
    };
}

FitResult fit_result_from_json(const Json& j) {
    try {
        FitResult fit;
        const auto beta = j.at("beta").get<std::vector<double>>();
        fit.beta = Eigen::Map<const VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
        if (!j.at("mu_upper_hat").is_null()) fit.mu_upper_hat = j.at("mu_upper_hat").get<double>();
        fit.objective_value = j.at("objective_value").get<double>();
        const auto active = j.at("active_block").get<std::size_t>();
        if (active == 0) throw SchemaError("active_block is 1-based", 0);
        fit.active_block = active - 1;
        fit.iterations = j.at("iterations").get<std::size_t>();
        fit.converged = j.at("converged").get<bool>();
        const auto& d = j.at("diagnostics");
        auto& out = fit.diagnostics;
        out.method = d.at("method").get<std::string>();
        out.stage = d.at("stage").get<std::string>();
        out.optimality_gap = d.at("optimality_gap").get<double>();
        out.lower_bound = d.at("lower_bound").get<double>();
        out.tied_blocks = index_list_from(d.at("tied_blocks"));
        out.active_set = index_list_from(d.at("active_set"));
        out.block_mse = d.at("block_mse").get<std::vector<double>>();
        if (!d.at("lambda").is_null()) out.lambda = d.at("lambda").get<double>();
        out.selected = d.at("selected").get<std::vector<bool>>();
        if (!d.at("mu_block").is_null()) {
            const auto b = d.at("mu_block").get<std::size_t>();
            if (b == 0) throw SchemaError("mu_block is 1-based", 0);
            out.mu_block = b - 1;
        }
        out.warnings = d.at("warnings").get<std::vector<std::string>>();
        return fit;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("malformed fit result: ") + e.what(), 0);
    }
}

Json to_json(const SimulatedData& sim) {
    const auto& c = sim.config;
    Json cov = {{"law", c.covariate_law == CovariateLaw::iid_normal ? "iid_normal" : "multivariate_normal"}};
    if (c.covariate_law == CovariateLaw::iid_normal) {
        cov["mean"] = c.cov_mean;
        cov["variance"] = c.cov_var;
    } else {
        cov["mean"] = vector_json(c.covariate_mean());
        cov["sigma"] = matrix_json(c.sigma);
    }
    const SublinearMoments mom = sublinear_moments(sim.family);
    return {
        {"beta0", vector_json(sim.beta0)},
        {"family", family_json(sim.family.members())},
        {"moments",
         {{"mu_upper", mom.mu_upper},
          {"mu_lower", mom.mu_lower},
          {"sigma2_upper", mom.sigma2_upper},
          {"sigma2_lower", mom.sigma2_lower}}},
        {"covariates", cov},
        {"error_mean_range", {c.mu_lower, c.mu_upper}},
        {"error_var_range", {c.var_lower, c.var_upper}},
        {"m", c.m},
        {"n", c.n},
        {"p", c.p},
        {"seed", c.seed},
    };
}

Json to_json(const NormalityDiagnostics& diag) {
    return {
        {"replications", diag.replications},
        {"empirical_covariance", matrix_json(diag.empirical)},
        {"target_covariance", matrix_json(diag.target)},
        {"relative_frobenius_error", diag.relative_frobenius},
        {"skewness", vector_json(diag.skewness)},
        {"excess_kurtosis", vector_json(diag.excess_kurtosis)},
    };
}

Json to_json(const BenchmarkReport& report) {
    Json methods = Json::array();
    for (const auto& m : report.methods) {
        Json s = {
            {"method", m.method},
            {"coefficient_mse", vector_json(m.coefficient_mse)},
            {"training", {{"mpe", m.mpe_train}, {"ape", m.ape_train}}},
            {"fresh_sample", {{"mpe", m.mpe_fresh}, {"ape", m.ape_fresh}}},
            {"converged", m.converged},
            {"mean_selected", m.mean_selected},
            {"mean_false_positives", m.mean_false_positives},
            {"all_actives_rate", m.all_actives_rate},
            {"runtime_seconds", m.runtime_seconds},
            {"normality", m.normality ? to_json(*m.normality) : Json(nullptr)},
        };
        methods.push_back(s);
    }
    Json reps = Json::array();
    for (const auto& r : report.records) {
        Json per = Json::array();
        for (std::size_t k = 0; k < r.methods.size(); ++k) {
            const auto& m = r.methods[k];
            Json e = {{"method", report.methods[k].method}, {"ok", m.ok}};
            if (m.ok) {
                e["beta"] = vector_json(m.beta);
                e["mu_upper_hat"] = optional_json(m.mu_upper_hat);
                e["lambda"] = optional_json(m.lambda);
                e["training"] = {{"mpe", m.mpe_train}, {"ape", m.ape_train}};
                e["fresh_sample"] = {{"mpe", m.mpe_fresh}, {"ape", m.ape_fresh}};
                e["converged"] = m.converged;
                e["iterations"] = m.iterations;
                e["selected"] = m.selected;
            } else {
                e["error"] = m.error;
            }
            per.push_back(e);
        }
        reps.push_back({
            {"index", r.index + 1},
            {"failed", r.failed},
            {"family", family_json(r.family)},
            {"methods", per},
            {"minimax_dominance", optional_json(r.minimax_dominance)},
            {"shifted_dominance", optional_json(r.shifted_dominance)},
        });
    }
    return {
        {"experiment", report.experiment},
        {"seed", report.seed},
        {"replications", report.replications},
        {"failed_replications", report.failed_replications},
        {"methods", methods},
        {"inequality_checks",
         {{"minimax_dominance", {{"checked", report.minimax_dominance_checked}, {"passed", report.minimax_dominance_passed}}},
          {"shifted_dominance", {{"checked", report.shifted_dominance_checked}, {"passed", report.shifted_dominance_passed}}}}},
        {"records", reps},
    };
}

Json to_json(const CvCurve& curve) {
    return {{"lambda_star", curve.lambda_star}, {"grid", curve.grid}, {"scores", curve.scores}};
}

Json to_json(const BlockIdentification& id) {
    Json steps = Json::array();
    for (const auto& s : id.steps)
        steps.push_back({{"block", s.block + 1},
                         {"rss", s.rss},
                         {"statistic", s.statistic},
                         {"df", {s.df_numerator, s.df_denominator}},
                         {"p_value", s.p_value},
                         {"rejected", s.rejected}});
    return {
        {"rows", index_list(id.rows)},
        {"merged_blocks", index_list(id.merged_blocks)},
        {"order", index_list(id.order)},
        {"block_rss", id.block_rss},
        {"tests", steps},
        {"m0", id.m0},
        {"n0", id.n0},
        {"warnings", id.warnings},
    };
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what(), 0);
    }
}

void write_text(const std::string& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::map<std::string, std::string> parse_config(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw SchemaError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw SchemaError("empty key", line_no);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_config(in);
}

}  // namespace sublinear::io
