#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "zbus/reference_networks.hpp"

namespace zbus::testing {

struct ConvergedRun {
    std::uint64_t seed = 0;
    CVector solution;
};

struct GuaranteeStats {
    std::size_t networks = 0;
    std::size_t runs = 0;
    std::size_t not_converged = 0;
    std::size_t ball_violations = 0;
    std::size_t rate_violations = 0;
    std::size_t geometric_violations = 0;
    double worst_rate_margin = -INFINITY;  // max of empirical rate - certified alpha
    double worst_pairwise_gap = 0.0;
    std::vector<ConvergedRun> converged;
};

inline Feeder guarantee_network(std::uint64_t seed) { return random_small_network({seed, 1 + seed % 5, 0.5}); }

/// Certifies random networks (Λ alternating identity / diag-w) until `networks`
/// are feasible, then runs `inits` solves per network from points of D'_{r_max}
/// and checks every claim of the convergence theorems on each trajectory.
inline GuaranteeStats check_guarantees(std::uint64_t first_seed, std::size_t networks, std::size_t inits) {
    GuaranteeStats st;
    std::mt19937_64 rng(first_seed * 31 + 7);
    for (std::uint64_t seed = first_seed; st.networks < networks && seed < first_seed + 20 * networks; ++seed) {
        Feeder const f = guarantee_network(seed);
        LambdaChoice const choice = seed % 2 ? LambdaChoice::identity() : LambdaChoice::diag_w();
        SystemMatrices const sys = assemble_system(f.network, f.loads);
        CertificateResult const cert = certify(f.network, f.loads, sys, choice);
        if (!cert.feasible) continue;
        ++st.networks;
        double const radius = cert.r_max;
        double const alpha = condition_values(cert.coefficients, radius).c4_value;
        CVector const lambda = choice.resolve(sys);
        double lambda_min = INFINITY;
        for (Complex l : lambda) lambda_min = std::min(lambda_min, std::abs(l));
        double const lambda_max = max_abs(lambda);

        std::vector<CVector> finals;
        for (std::size_t n = 0; n < inits; ++n) {
            SolveConfig cfg;
            cfg.init = InitialVoltage::custom;
            cfg.custom_initial = random_point_in_ball(sys.w, lambda, radius, rng, n);
            cfg.max_iters = 1000;
            SolveTrace const t = solve(f.network, f.loads, sys, cfg);
            ++st.runs;
            if (t.status != SolveStatus::converged) {
                ++st.not_converged;
                continue;
            }
            for (CVector const& v : t.iterates) {
                if (!membership_in_ball(v, sys.w, lambda, radius)) ++st.ball_violations;
            }
            if (t.iterates.size() >= 3) {
                double const margin = empirical_rate(t, lambda) - alpha;
                st.worst_rate_margin = std::max(st.worst_rate_margin, margin);
                if (margin > 1e-6) ++st.rate_violations;
            }
            // the last iterate stands in for the fixed point; widen by how far it can be from it
            double const last_step = ball_distance(t.iterates.back(), t.iterates[t.iterates.size() - 2], lambda);
            double const proxy_gap = lambda_max * alpha / (1.0 - alpha) * last_step;
            double const slack = (lambda_max / lambda_min + 1.0) * proxy_gap;
            if (first_geometric_violation(t, lambda, alpha, slack)) ++st.geometric_violations;
            finals.push_back(*t.solution);
            st.converged.push_back({seed, *t.solution});
        }
        for (std::size_t a = 1; a < finals.size(); ++a) {
            st.worst_pairwise_gap = std::max(st.worst_pairwise_gap, inf_norm(subtract(finals[a], finals[0])));
        }
    }
    return st;
}

}  // namespace zbus::testing
