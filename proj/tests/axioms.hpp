#pragma once

#include "sublinear/core_model.hpp"
#include "sublinear/random.hpp"

#include <array>
#include <cmath>
#include <string>

namespace axioms {

/// q(eps) = a + b eps + c eps^2; its linear expectation under one member is
/// a + b mu + c (sigma^2 + mu^2).
struct Quadratic {
    double a = 0.0, b = 0.0, c = 0.0;

    double expect(const sublinear::FamilyMember& f) const { return a + b * f.mean + c * f.raw_second_moment(); }
    Quadratic operator+(const Quadratic& o) const { return {a + o.a, b + o.b, c + o.c}; }
    Quadratic scaled(double s) const { return {s * a, s * b, s * c}; }
};

inline double upper(const sublinear::DistributionFamily& fam, const Quadratic& q) {
    return sublinear::sublinear_expectation(fam, [&q](const sublinear::FamilyMember& f) { return q.expect(f); }).value;
}

inline constexpr std::array<const char*, 6> kNames = {
    "monotonicity", "constant preservation", "sub-additivity", "positive homogeneity", "convexity",
    "cash translatability"};

struct Report {
    std::array<std::size_t, 6> failures{};
    std::size_t cases = 0;

    std::size_t total() const {
        std::size_t t = 0;
        for (auto f : failures) t += f;
        return t;
    }
};

/// Runs every property on `cases` random families and random quadratic variables.
inline Report run(std::size_t cases, std::uint64_t seed) {
    sublinear::RandomStream rng(seed);
    Report rep;
    rep.cases = cases;
    auto rand_q = [&rng] { return Quadratic{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-2, 2)}; };
    for (std::size_t t = 0; t < cases; ++t) {
        const std::size_t size = 1 + static_cast<std::size_t>(rng.uniform() * 6.0);
        std::vector<sublinear::FamilyMember> members;
        for (std::size_t i = 0; i < size; ++i) members.push_back({rng.uniform(-5, 5), rng.uniform(0, 4)});
        const sublinear::DistributionFamily fam(members);

        const Quadratic u = rand_q();
        const Quadratic v = rand_q();
        const double eu = upper(fam, u);
        const double ev = upper(fam, v);
        const double scale = 1.0 + std::abs(eu) + std::abs(ev);
        const double tol = 1e-12 * scale;

        // U + W >= U for W = c0 + c2 (eps - d)^2 with c0, c2 >= 0
        const double c0 = rng.uniform(0, 3), c2 = rng.uniform(0, 3), d = rng.uniform(-5, 5);
        const Quadratic w{c0 + c2 * d * d, -2.0 * c2 * d, c2};
        if (upper(fam, u + w) < eu - tol * (1.0 + c0 + c2 * (1.0 + d * d))) ++rep.failures[0];

        const double k = rng.uniform(-10, 10);
        if (upper(fam, Quadratic{k, 0, 0}) != k) ++rep.failures[1];

        if (upper(fam, u + v) > eu + ev + tol) ++rep.failures[2];

        const double lam = rng.uniform(0, 10);
        if (std::abs(upper(fam, u.scaled(lam)) - lam * eu) > tol * (1.0 + lam)) ++rep.failures[3];

        const double alpha = rng.uniform();
        if (upper(fam, u.scaled(alpha) + v.scaled(1.0 - alpha)) > alpha * eu + (1.0 - alpha) * ev + tol)
            ++rep.failures[4];

        if (std::abs(upper(fam, u + Quadratic{k, 0, 0}) - (eu + k)) > tol * (1.0 + std::abs(k))) ++rep.failures[5];
    }
    return rep;
}

}  // namespace axioms
