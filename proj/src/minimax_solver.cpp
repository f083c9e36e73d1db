#include "sublinear/minimax_solver.hpp"

#include "sublinear/errors.hpp"
#include "sublinear/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace sublinear {

namespace {

constexpr double kTieTol = 1e-12;
constexpr std::size_t kSingletonWindow = 50;
constexpr std::size_t kStallWindow = 100;
constexpr std::size_t kPolyakPatience = 20;

double scale_of(double f) { return std::max(1.0, std::abs(f)); }

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct StageResult {
    VectorXd beta;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool certified = false;
    bool stalled = false;
    double gap = 0.0;
    std::string stage;
};

// Exact minimizer of block i alone; returned only if block i is still the
// max there, which makes it the global minimizer.
std::optional<VectorXd> singleton_polish(const MinimaxProblem& pb, double lambda, std::size_t i,
                                         const VectorXd& start) {
    VectorXd cand;
    if (lambda == 0.0) {
        try {
            const linalg::SpdFactor factor(pb.block(i).gram);
            cand = factor.solve(pb.block(i).cross);
        } catch (const SingularMatrixError&) {
            return std::nullopt;
        }
    } else {
        cand = single_block_lasso(pb.block(i), lambda, start);
    }
    const VectorXd vals = pb.values(cand);
    const double top = vals.maxCoeff();
    if (vals(static_cast<Eigen::Index>(i)) >= top - kTieTol * scale_of(top)) return cand;
    return std::nullopt;
}

StageResult subgradient_stage(const MinimaxProblem& pb, double lambda, const VectorXd& start,
                              const SolverConfig& cfg) {
    const double lb = pb.lower_bound();
    VectorXd beta = start;
    double f = pb.objective(beta, lambda);
    VectorXd best = beta;
    double fbest = f;

    auto gap_ok = [&](double fb) { return fb - lb <= cfg.tolerance * scale_of(fb); };
    // A certified point is often near a smooth minimum of one block; the exact
    // minimizer of that block replaces it whenever it is no worse.
    auto certified = [&](std::size_t iters) -> StageResult {
        const VectorXd vals = pb.values(best);
        const std::size_t i = argmax_lowest(vals, kTieTol * scale_of(vals.maxCoeff()));
        if (auto cand = singleton_polish(pb, lambda, i, best)) {
            const double fc = pb.objective(*cand, lambda);
            if (fc <= fbest) return {*cand, fc, iters, true, false, std::max(0.0, fc - lb), "singleton"};
        }
        return {best, fbest, iters, true, false, std::max(0.0, fbest - lb), "subgradient"};
    };
    if (gap_ok(fbest)) return certified(0);

    double delta = fbest - lb;
    double c_dim = 0.0;
    bool have_c = false;
    std::size_t run_block = std::numeric_limits<std::size_t>::max();
    std::size_t run_len = 0;
    bool run_tried = false;
    std::size_t no_improve = 0;
    double window_ref = fbest;
    bool stalled = false;
    std::size_t k = 0;

    while (k < cfg.max_iterations) {
        ++k;
        const VectorXd vals = pb.values(beta);
        const std::size_t i = argmax_lowest(vals, kTieTol * scale_of(vals.maxCoeff()));

        if (i == run_block) {
            ++run_len;
        } else {
            run_block = i;
            run_len = 1;
            run_tried = false;
        }
        if (run_len >= kSingletonWindow && !run_tried) {
            run_tried = true;
            if (auto cand = singleton_polish(pb, lambda, i, best)) {
                const double fc = pb.objective(*cand, lambda);
                return {*cand, fc, k, true, false, 0.0, "singleton"};
            }
        }

        const VectorXd g = pb.block(i).gradient(beta);
        VectorXd h = g;
        if (lambda > 0.0)
            for (Eigen::Index j = 0; j < h.size(); ++j) h(j) += lambda * sign_of(beta(j));
        const double hn2 = h.squaredNorm();
        if (hn2 == 0.0) {
            // zero is a subgradient, so beta is optimal
            return {beta, f, k, true, false, 0.0, "subgradient"};
        }

        double alpha = 0.0;
        if (cfg.step_rule == StepRule::polyak) {
            const double target = std::max(lb, fbest - delta);
            alpha = (f - target) / hn2;
        } else {
            if (!have_c) {
                c_dim = std::max(f - lb, cfg.tolerance * scale_of(f)) / hn2;
                have_c = true;
            }
            alpha = c_dim / std::sqrt(static_cast<double>(k));
        }

        VectorXd next = beta - alpha * g;
        if (lambda > 0.0) next = soft_threshold(next, alpha * lambda);
        double fn = pb.objective(next, lambda);
        if (fn < fbest) {
            best = next;
            fbest = fn;
            no_improve = 0;
        } else {
            ++no_improve;
        }
        if (cfg.step_rule == StepRule::polyak && no_improve >= kPolyakPatience) {
            delta *= 0.5;
            no_improve = 0;
            next = best;
            fn = fbest;
        }
        beta = std::move(next);
        f = fn;

        if (gap_ok(fbest)) return certified(k);
        if (k % kStallWindow == 0) {
            if (window_ref - fbest <= cfg.tolerance * scale_of(fbest)) {
                stalled = true;
                break;
            }
            window_ref = fbest;
        }
    }
    return {best, fbest, k, false, stalled, std::max(0.0, fbest - lb), "subgradient"};
}

// ---------------------------------------------------------------------------
// Log-barrier method on  min t + lambda 1'u  s.t. f_i(b) <= t, -u <= b <= u.
// ---------------------------------------------------------------------------

struct BarrierResult {
    VectorXd beta;
    VectorXd weights;
    double gap_bound = std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    bool ok = false;
};

class Barrier {
public:
    Barrier(const MinimaxProblem& pb, double lambda)
        : pb_(pb), lambda_(lambda), m_(pb.block_count()), p_(pb.dim()),
          q_(lambda > 0.0 ? pb.dim() : 0), nv_(p_ + q_ + 1) {}

    BarrierResult run(const VectorXd& start, double gap_estimate, double tol_abs) {
        BarrierResult out;
        const double constraints = static_cast<double>(m_) + 2.0 * static_cast<double>(q_);
        const double g0 = std::max(gap_estimate, tol_abs);
        beta_ = start;
        t_ = pb_.max_value(start) + g0;
        if (q_ > 0) u_ = start.cwiseAbs().array() + 2.0 * g0 / (constraints * lambda_);
        double tau = constraints / g0;

        std::size_t steps = 0;
        for (int outer = 0; outer < 60; ++outer) {
            if (!center(tau, steps)) return out;
            if (constraints / tau <= tol_abs) break;
            tau *= 10.0;
        }
        refresh();
        out.beta = beta_;
        out.weights = (1.0 / (tau * slack_.array())).matrix();
        out.gap_bound = constraints / tau;
        out.steps = steps;
        out.ok = beta_.allFinite();
        return out;
    }

private:
    void refresh() {
        slack_.resize(static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i)
            slack_(static_cast<Eigen::Index>(i)) = t_ - pb_.block(i).value(beta_);
    }

    // Change in the barrier function along (db, du, dt), +inf when infeasible.
    double delta_psi(double tau, const VectorXd& db, const VectorXd& du, double dt) const {
        double d = tau * dt;
        if (q_ > 0) d += tau * lambda_ * du.sum();
        for (std::size_t i = 0; i < m_; ++i) {
            const double s = slack_(static_cast<Eigen::Index>(i));
            const double ds = dt - pb_.block(i).increment(beta_, db);
            if (s + ds <= 0.0) return std::numeric_limits<double>::infinity();
            d -= std::log1p(ds / s);
        }
        for (std::size_t k = 0; k < q_; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            const double a = u_(kk) - beta_(kk);
            const double c = u_(kk) + beta_(kk);
            const double da = du(kk) - db(kk);
            const double dc = du(kk) + db(kk);
            if (a + da <= 0.0 || c + dc <= 0.0) return std::numeric_limits<double>::infinity();
            d -= std::log1p(da / a) + std::log1p(dc / c);
        }
        return d;
    }

    bool center(double tau, std::size_t& steps) {
        const auto P = static_cast<Eigen::Index>(p_);
        const auto Q = static_cast<Eigen::Index>(q_);
        const auto T = static_cast<Eigen::Index>(p_ + q_);
        for (int it = 0; it < 200; ++it) {
            refresh();
            if ((slack_.array() <= 0.0).any()) return false;
            VectorXd grad = VectorXd::Zero(static_cast<Eigen::Index>(nv_));
            MatrixXd hess = MatrixXd::Zero(static_cast<Eigen::Index>(nv_), static_cast<Eigen::Index>(nv_));
            for (std::size_t i = 0; i < m_; ++i) {
                const auto& blk = pb_.block(i);
                const VectorXd gi = blk.gradient(beta_);
                const double inv = 1.0 / slack_(static_cast<Eigen::Index>(i));
                grad.head(P) += inv * gi;
                grad(T) -= inv;
                hess.topLeftCorner(P, P) += (2.0 * inv) * blk.gram;
                hess.topLeftCorner(P, P).noalias() += (inv * inv) * gi * gi.transpose();
                hess.block(0, T, P, 1) -= (inv * inv) * gi;
                hess(T, T) += inv * inv;
            }
            hess.block(T, 0, 1, P) = hess.block(0, T, P, 1).transpose();
            grad(T) += tau;
            for (Eigen::Index k = 0; k < Q; ++k) {
                const double ia = 1.0 / (u_(k) - beta_(k));
                const double ic = 1.0 / (u_(k) + beta_(k));
                grad(k) += ia - ic;
                grad(P + k) += tau * lambda_ - ia - ic;
                hess(k, k) += ia * ia + ic * ic;
                hess(P + k, P + k) += ia * ia + ic * ic;
                hess(k, P + k) += ic * ic - ia * ia;
                hess(P + k, k) += ic * ic - ia * ia;
            }

            Eigen::LDLT<MatrixXd> ldlt(hess);
            VectorXd dz = ldlt.solve(-grad);
            if (ldlt.info() != Eigen::Success || !dz.allFinite()) return false;
            const double decrement = -grad.dot(dz);
            if (!(decrement >= 0.0)) return false;
            if (decrement / 2.0 <= 1e-10) return true;

            const VectorXd db = dz.head(P);
            const VectorXd du = dz.segment(P, Q);
            const double dt = dz(T);
            double step = 1.0;
            double dpsi = delta_psi(tau, step * db, step * du, step * dt);
            int shrink = 0;
            while (!(dpsi <= -0.25 * step * decrement) && shrink < 80) {
                step *= 0.5;
                dpsi = delta_psi(tau, step * db, step * du, step * dt);
                ++shrink;
            }
            ++steps;
            if (shrink == 80) return true;  // numerically centered
            beta_ += step * db;
            if (q_ > 0) u_ += step * du;
            t_ += step * dt;
        }
        return true;
    }

    const MinimaxProblem& pb_;
    double lambda_;
    std::size_t m_, p_, q_, nv_;
    VectorXd beta_, u_, slack_;
    double t_ = 0.0;
};

// ---------------------------------------------------------------------------
// Newton's method on the KKT system of a fixed active block set and support,
// wrapped in an add/drop active-set loop.
// ---------------------------------------------------------------------------

struct PolishResult {
    VectorXd beta;
    VectorXd weights;
    std::vector<std::size_t> active;
    double gap = 0.0;
    std::size_t steps = 0;
    bool ok = false;
};

double weighted_dual_bound(const MinimaxProblem& pb, double lambda, const VectorXd& w,
                           const VectorXd& beta_hint) {
    const auto P = static_cast<Eigen::Index>(pb.dim());
    BlockQuadratic combo{MatrixXd::Zero(P, P), VectorXd::Zero(P), 0.0};
    for (std::size_t i = 0; i < pb.block_count(); ++i) {
        const double wi = w(static_cast<Eigen::Index>(i));
        if (wi == 0.0) continue;
        combo.gram += wi * pb.block(i).gram;
        combo.cross += wi * pb.block(i).cross;
        combo.mean_square += wi * pb.block(i).mean_square;
    }
    VectorXd b;
    if (lambda == 0.0) {
        try {
            const linalg::SpdFactor factor(combo.gram);
            b = factor.solve(combo.cross);
        } catch (const SingularMatrixError&) {
            return -std::numeric_limits<double>::infinity();
        }
        return combo.mean_square - combo.cross.dot(b);
    }
    b = single_block_lasso(combo, lambda, beta_hint);
    return combo.value(b) + lambda * b.lpNorm<1>();
}

class KktPolisher {
public:
    KktPolisher(const MinimaxProblem& pb, double lambda) : pb_(pb), lambda_(lambda) {}

    PolishResult run(const VectorXd& beta0, const VectorXd& weights0, double tol_abs) {
        PolishResult out;
        const std::size_t m = pb_.block_count();
        const std::size_t p = pb_.dim();
        const VectorXd vals0 = pb_.values(beta0);
        const double top0 = vals0.maxCoeff();

        std::vector<std::size_t> blocks;
        std::vector<double> w;
        if (weights0.size() == static_cast<Eigen::Index>(m) && weights0.maxCoeff() > 0.0) {
            const double wmax = weights0.maxCoeff();
            for (std::size_t i = 0; i < m; ++i)
                if (weights0(static_cast<Eigen::Index>(i)) > 1e-4 * wmax) {
                    blocks.push_back(i);
                    w.push_back(weights0(static_cast<Eigen::Index>(i)));
                }
        } else {
            for (std::size_t i = 0; i < m; ++i)
                if (vals0(static_cast<Eigen::Index>(i)) >= top0 - 1e-6 * scale_of(top0)) {
                    blocks.push_back(i);
                    w.push_back(1.0);
                }
        }
        std::vector<std::size_t> support;
        std::vector<double> signs;
        const double bmax = beta0.cwiseAbs().maxCoeff();
        for (std::size_t k = 0; k < p; ++k) {
            const double b = beta0(static_cast<Eigen::Index>(k));
            if (lambda_ == 0.0 || std::abs(b) > 1e-7 * (1.0 + bmax)) {
                support.push_back(k);
                signs.push_back(sign_of(b));
            }
        }

        VectorXd beta = beta0;
        for (std::size_t k = 0; k < p; ++k)
            if (std::find(support.begin(), support.end(), k) == support.end())
                beta(static_cast<Eigen::Index>(k)) = 0.0;
        double t = top0;

        for (std::size_t round = 0; round < 4 * (m + p) + 4; ++round) {
            if (blocks.empty()) return out;
            normalize(w);
            if (!newton(blocks, w, support, signs, beta, t, out.steps)) return out;

            const double sc = scale_of(t);
            // negative block weight: drop the most negative
            auto wmin = std::min_element(w.begin(), w.end());
            if (*wmin < -1e-12) {
                const auto pos = static_cast<std::size_t>(wmin - w.begin());
                blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(pos));
                w.erase(w.begin() + static_cast<std::ptrdiff_t>(pos));
                continue;
            }
            // support coordinate that crossed zero: drop the worst
            if (lambda_ > 0.0) {
                double worst = 0.0;
                std::size_t worst_pos = support.size();
                for (std::size_t s = 0; s < support.size(); ++s) {
                    const double v = beta(static_cast<Eigen::Index>(support[s])) * signs[s];
                    if (v < worst) {
                        worst = v;
                        worst_pos = s;
                    }
                }
                if (worst_pos < support.size()) {
                    beta(static_cast<Eigen::Index>(support[worst_pos])) = 0.0;
                    support.erase(support.begin() + static_cast<std::ptrdiff_t>(worst_pos));
                    signs.erase(signs.begin() + static_cast<std::ptrdiff_t>(worst_pos));
                    continue;
                }
            }
            // block outside the active set above the level: add the worst
            const VectorXd vals = pb_.values(beta);
            double excess = 1e-11 * sc;
            std::size_t add_block = m;
            for (std::size_t i = 0; i < m; ++i) {
                if (std::find(blocks.begin(), blocks.end(), i) != blocks.end()) continue;
                const double e = vals(static_cast<Eigen::Index>(i)) - t;
                if (e > excess) {
                    excess = e;
                    add_block = i;
                }
            }
            if (add_block < m) {
                blocks.push_back(add_block);
                w.push_back(0.0);
                continue;
            }
            // penalized coordinate outside the support violating |grad| <= lambda
            if (lambda_ > 0.0) {
                const VectorXd g = weighted_gradient(blocks, w, beta);
                double viol = 1e-10 * (1.0 + g.cwiseAbs().maxCoeff());
                std::size_t add_k = p;
                for (std::size_t k = 0; k < p; ++k) {
                    if (std::find(support.begin(), support.end(), k) != support.end()) continue;
                    const double v = std::abs(g(static_cast<Eigen::Index>(k))) - lambda_;
                    if (v > viol) {
                        viol = v;
                        add_k = k;
                    }
                }
                if (add_k < p) {
                    support.push_back(add_k);
                    signs.push_back(-sign_of(g(static_cast<Eigen::Index>(add_k))));
                    continue;
                }
            }

            VectorXd wf = VectorXd::Zero(static_cast<Eigen::Index>(m));
            for (std::size_t s = 0; s < blocks.size(); ++s)
                wf(static_cast<Eigen::Index>(blocks[s])) = std::max(0.0, w[s]);
            const double obj = pb_.objective(beta, lambda_);
            const double dual = weighted_dual_bound(pb_, lambda_, wf, beta);
            out.gap = std::max(0.0, obj - dual);
            if (!(out.gap <= tol_abs)) return out;
            out.beta = beta;
            out.weights = wf;
            out.active = blocks;
            std::sort(out.active.begin(), out.active.end());
            out.ok = true;
            return out;
        }
        return out;
    }

private:
    static void normalize(std::vector<double>& w) {
        double s = 0.0;
        for (double v : w) s += std::max(0.0, v);
        if (s <= 0.0) {
            std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
            return;
        }
        for (double& v : w) v = std::max(0.0, v) / s;
    }

    VectorXd weighted_gradient(const std::vector<std::size_t>& blocks, const std::vector<double>& w,
                               const VectorXd& beta) const {
        VectorXd g = VectorXd::Zero(beta.size());
        for (std::size_t s = 0; s < blocks.size(); ++s) g += w[s] * pb_.block(blocks[s]).gradient(beta);
        return g;
    }

    bool newton(const std::vector<std::size_t>& blocks, std::vector<double>& w,
                const std::vector<std::size_t>& support, const std::vector<double>& signs,
                VectorXd& beta, double& t, std::size_t& steps) const {
        const auto q = static_cast<Eigen::Index>(support.size());
        const auto s = static_cast<Eigen::Index>(blocks.size());
        const Eigen::Index n = q + s + 1;
        double gscale = 1.0;
        for (auto i : blocks) gscale = std::max(gscale, pb_.block(i).gram.cwiseAbs().maxCoeff());

        for (int it = 0; it < 60; ++it) {
            VectorXd r(n);
            MatrixXd jac = MatrixXd::Zero(n, n);
            std::vector<VectorXd> grads(static_cast<std::size_t>(s));
            for (Eigen::Index b = 0; b < s; ++b)
                grads[static_cast<std::size_t>(b)] = pb_.block(blocks[static_cast<std::size_t>(b)]).gradient(beta);
            for (Eigen::Index a = 0; a < q; ++a) {
                const auto ka = static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)]);
                double ra = lambda_ * signs[static_cast<std::size_t>(a)];
                for (Eigen::Index b = 0; b < s; ++b) {
                    ra += w[static_cast<std::size_t>(b)] * grads[static_cast<std::size_t>(b)](ka);
                    jac(a, q + b) = grads[static_cast<std::size_t>(b)](ka);
                }
                r(a) = ra;
                for (Eigen::Index c = 0; c < q; ++c) {
                    const auto kc = static_cast<Eigen::Index>(support[static_cast<std::size_t>(c)]);
                    double h = 0.0;
                    for (Eigen::Index b = 0; b < s; ++b)
                        h += 2.0 * w[static_cast<std::size_t>(b)] *
                             pb_.block(blocks[static_cast<std::size_t>(b)]).gram(ka, kc);
                    jac(a, c) = h;
                }
            }
            double wsum = 0.0;
            for (Eigen::Index b = 0; b < s; ++b) {
                const auto& blk = pb_.block(blocks[static_cast<std::size_t>(b)]);
                r(q + b) = blk.value(beta) - t;
                for (Eigen::Index c = 0; c < q; ++c)
                    jac(q + b, c) = grads[static_cast<std::size_t>(b)](
                        static_cast<Eigen::Index>(support[static_cast<std::size_t>(c)]));
                jac(q + b, n - 1) = -1.0;
                jac(n - 1, q + b) = 1.0;
                wsum += w[static_cast<std::size_t>(b)];
            }
            r(n - 1) = wsum - 1.0;

            const double rtol = 1e-13 * std::max({scale_of(t), gscale * (1.0 + beta.cwiseAbs().maxCoeff())});
            if (r.cwiseAbs().maxCoeff() <= rtol) return true;

            Eigen::FullPivLU<MatrixXd> lu(jac);
            if (lu.rank() < n) return false;
            const VectorXd dz = lu.solve(-r);
            if (!dz.allFinite()) return false;
            for (Eigen::Index a = 0; a < q; ++a)
                beta(static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)])) += dz(a);
            for (Eigen::Index b = 0; b < s; ++b) w[static_cast<std::size_t>(b)] += dz(q + b);
            t += dz(n - 1);
            ++steps;
            const double zscale = 1.0 + std::max(beta.cwiseAbs().maxCoeff(), std::abs(t));
            if (dz.cwiseAbs().maxCoeff() <= 1e-15 * zscale) {
                return r.cwiseAbs().maxCoeff() <= 1e4 * rtol;
            }
        }
        return false;
    }

    const MinimaxProblem& pb_;
    double lambda_;
};

std::vector<std::size_t> tied_blocks(const VectorXd& vals) {
    const double top = vals.maxCoeff();
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        if (vals(i) >= top - kTieTol * scale_of(top)) out.push_back(static_cast<std::size_t>(i));
    return out;
}

}  // namespace

void SolverConfig::validate() const {
    if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
    if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
}

std::string to_string(StepRule rule) { return rule == StepRule::polyak ? "polyak" : "diminishing"; }

StepRule step_rule_from_string(const std::string& name) {
    if (name == "polyak") return StepRule::polyak;
    if (name == "diminishing") return StepRule::diminishing;
    throw DomainError("unknown step rule '" + name + "'");
}

double BlockQuadratic::value(const VectorXd& b) const {
    return b.dot(gram * b) - 2.0 * cross.dot(b) + mean_square;
}

VectorXd BlockQuadratic::gradient(const VectorXd& b) const { return 2.0 * (gram * b - cross); }

double BlockQuadratic::increment(const VectorXd& b, const VectorXd& d) const {
    return d.dot(gram * (2.0 * b + d)) - 2.0 * cross.dot(d);
}

MinimaxProblem::MinimaxProblem(const Dataset& data, double shift) {
    blocks_.reserve(data.block_count());
    for (std::size_t i = 0; i < data.block_count(); ++i) {
        const MatrixXd x = data.block_x(i);
        const VectorXd y = data.block_y(i).array() - shift;
        const double n = static_cast<double>(x.rows());
        BlockQuadratic q;
        q.gram = (x.transpose() * x) / n;
        q.cross = (x.transpose() * y) / n;
        q.mean_square = y.squaredNorm() / n;
        blocks_.push_back(std::move(q));
    }
    init();
}

MinimaxProblem::MinimaxProblem(std::vector<BlockQuadratic> blocks) : blocks_(std::move(blocks)) { init(); }

void MinimaxProblem::init() {
    if (blocks_.empty()) throw DomainError("minimax problem needs at least one block");
    dim_ = static_cast<std::size_t>(blocks_.front().cross.size());
    lower_bound_ = 0.0;
    for (const auto& q : blocks_) {
        if (static_cast<std::size_t>(q.cross.size()) != dim_ || q.gram.rows() != q.cross.size() ||
            q.gram.cols() != q.cross.size())
            throw DomainError("block quadratics have inconsistent dimensions");
        // LDLT treats vanishing pivots as zero, which gives the minimum value
        // for singular PSD grams as well.
        Eigen::LDLT<MatrixXd> ldlt(q.gram);
        const VectorXd b = ldlt.solve(q.cross);
        double value = q.mean_square - q.cross.dot(b);
        if (!std::isfinite(value)) value = 0.0;
        lower_bound_ = std::max(lower_bound_, value);
    }
}

VectorXd MinimaxProblem::values(const VectorXd& b) const {
    VectorXd out(static_cast<Eigen::Index>(blocks_.size()));
    for (std::size_t i = 0; i < blocks_.size(); ++i) out(static_cast<Eigen::Index>(i)) = blocks_[i].value(b);
    return out;
}

double MinimaxProblem::max_value(const VectorXd& b) const { return values(b).maxCoeff(); }

double MinimaxProblem::objective(const VectorXd& b, double lambda) const {
    double f = max_value(b);
    if (lambda > 0.0) f += lambda * b.lpNorm<1>();
    return f;
}

std::size_t argmax_lowest(const VectorXd& values, double tie_tol) {
    const double top = values.maxCoeff();
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) >= top - tie_tol) return static_cast<std::size_t>(i);
    return 0;
}

VectorXd soft_threshold(const VectorXd& v, double t) {
    return v.unaryExpr([t](double x) { return x > t ? x - t : (x < -t ? x + t : 0.0); });
}

VectorXd single_block_lasso(const BlockQuadratic& q, double lambda, const VectorXd& start, double tol,
                            std::size_t max_sweeps) {
    const Eigen::Index p = q.cross.size();
    VectorXd b = start.size() == p ? start : VectorXd::Zero(p);
    VectorXd gb = q.gram * b;
    const double half = lambda / 2.0;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
            const double gkk = q.gram(k, k);
            double next = 0.0;
            if (gkk > 0.0) {
                const double rho = q.cross(k) - (gb(k) - gkk * b(k));
                next = (rho > half ? rho - half : (rho < -half ? rho + half : 0.0)) / gkk;
            }
            const double d = next - b(k);
            if (d != 0.0) {
                gb += d * q.gram.col(k);
                b(k) = next;
                max_delta = std::max(max_delta, std::abs(d));
            }
        }
        if (sweep % 64 == 63) gb = q.gram * b;
        if (max_delta <= tol * (1.0 + b.cwiseAbs().maxCoeff())) break;
    }
    return b;
}

SolverOutcome solve_minimax(const MinimaxProblem& problem, double lambda, const VectorXd& start,
                            const SolverConfig& config) {
    config.validate();
    if (!(lambda >= 0.0)) throw DomainError("lambda must be non-negative");
    if (static_cast<std::size_t>(start.size()) != problem.dim())
        throw DomainError("starting point has the wrong dimension");

    SolverOutcome out;
    out.lower_bound = problem.lower_bound();
    StageResult sub = subgradient_stage(problem, lambda, start, config);
    out.beta = sub.beta;
    out.objective = sub.objective;
    out.iterations = sub.iterations;
    out.stage = sub.stage;
    out.gap = sub.gap;

    auto finish = [&]() {
        out.objective = problem.objective(out.beta, lambda);
        if (out.active_set.empty()) out.active_set = tied_blocks(problem.values(out.beta));
        return out;
    };

    if (sub.certified) {
        out.converged = true;
        return finish();
    }
    if (!config.refine) {
        out.converged = sub.stalled;
        return finish();
    }

    const double tol_abs = config.tolerance * scale_of(sub.objective);
    Barrier barrier(problem, lambda);
    const BarrierResult bar = barrier.run(sub.beta, sub.gap, tol_abs);
    out.iterations += bar.steps;
    VectorXd weights;
    if (bar.ok) {
        const double fb = problem.objective(bar.beta, lambda);
        double gap = bar.gap_bound;
        if (lambda == 0.0) {
            VectorXd w = bar.weights.cwiseMax(0.0);
            if (w.sum() > 0.0) w /= w.sum();
            gap = std::max(0.0, fb - weighted_dual_bound(problem, 0.0, w, bar.beta));
        }
        if (fb <= out.objective + tol_abs) {
            out.beta = bar.beta;
            out.objective = fb;
            out.gap = gap;
            out.stage = "barrier";
            out.converged = gap <= tol_abs;
            weights = bar.weights;
        }
    }

    KktPolisher polisher(problem, lambda);
    const PolishResult pol = polisher.run(out.beta, weights, tol_abs);
    out.iterations += pol.steps;
    if (pol.ok) {
        const double fp = problem.objective(pol.beta, lambda);
        if (fp <= out.objective + 1e-12 * scale_of(out.objective) || !out.converged) {
            out.beta = pol.beta;
            out.objective = fp;
            out.gap = pol.gap;
            out.stage = "kkt";
            out.converged = true;
            out.weights = pol.weights;
            out.active_set = pol.active;
        }
    } else if (weights.size() > 0) {
        out.weights = weights;
        const double wmax = weights.maxCoeff();
        for (Eigen::Index i = 0; i < weights.size(); ++i)
            if (weights(i) > 1e-4 * wmax) out.active_set.push_back(static_cast<std::size_t>(i));
    }
    return finish();
}

}  // namespace sublinear
