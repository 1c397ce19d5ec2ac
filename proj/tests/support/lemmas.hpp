#pragma once

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "zbus/loads.hpp"
#include "zbus/feeder.hpp"
#include "zbus/reference_networks.hpp"
#include "zbus/system.hpp"

namespace zbus::testing {

struct LemmaSides {
    CVector direct_pq, paired_pq, direct_i, paired_i;
};

// Left: Z applied to the delta injections evaluated phase by phase.
// Right: the same currents regrouped per pair through the Z^Δ columns.
inline LemmaSides evaluate_lemma_sides(Feeder const& f, CVector const& v) {
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    CVector const ones(sys.size(), 1.0);
    PairedColumns const pc = paired_columns(f, sys, ones);
    IndexMap const& index = f.network.index();
    std::size_t const n = sys.size();

    // per-index delta injections from the library, node by node
    CVector power(n), current(n);
    for (std::size_t node = 0; node < f.network.nodes().size(); ++node) {
        NodeSpec const& spec = f.network.node(node);
        if (spec.kind != NodeKind::delta) continue;
        CVector const vn = f.network.node_voltage(v, node);
        InjectionParts const inj = delta_injection(spec, vn, f.loads.delta(node));
        auto const idx = index.indices_of(node);
        for (std::size_t p = 0; p < idx.size(); ++p) {
            power[idx[p]] = inj.power[p];
            current[idx[p]] = inj.current[p];
        }
    }

    LemmaSides out{CVector(n), CVector(n), CVector(n), CVector(n)};
    for (std::size_t col = 0; col < pc.delta.size(); ++col) {
        std::size_t const k = pc.delta[col];
        for (std::size_t j = 0; j < n; ++j) {
            out.direct_pq[j] += sys.z(j, k) * power[k];
            out.direct_i[j] += sys.z(j, k) * current[k];
        }
        if (pc.s_delta[col] == Complex{} && pc.i_delta[col] == Complex{}) continue;
        auto const partner = index.find(index.node_of(k), right_shift(index.phase_of(k)));
        Complex const u = v[k] - v[*partner];
        for (std::size_t j = 0; j < n; ++j) {
            out.paired_pq[j] -= pc.z_delta[col][j] * std::conj(pc.s_delta[col] / u);
            out.paired_i[j] -= pc.z_delta[col][j] * pc.i_delta[col] * u / std::abs(u);
        }
    }
    return out;
}

struct LemmaGaps {
    double power = 0.0;
    double current = 0.0;
};

/// Largest disagreement between the two sides over `count` random delta networks.
inline LemmaGaps lemma_gaps(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.05);
    LemmaGaps gaps;
    for (std::uint64_t s = 1; s <= count; ++s) {
        Feeder const f = random_small_network({s, 1 + s % 5, 1.0});
        SystemMatrices const sys = assemble_system(f.network, f.loads);
        CVector v = sys.w;
        for (auto& x : v) x += Complex{g(rng), g(rng)};
        LemmaSides const sides = evaluate_lemma_sides(f, v);
        for (std::size_t j = 0; j < v.size(); ++j) {
            gaps.power = std::max(gaps.power, std::abs(sides.direct_pq[j] - sides.paired_pq[j]));
            gaps.current = std::max(gaps.current, std::abs(sides.direct_i[j] - sides.paired_i[j]));
        }
    }
    return gaps;
}

/// Pairs violating |x/|x| - y/|y|| <= 2|x - y|/|x| (up to rounding).
inline std::size_t unit_phasor_violations(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(-6.0, 3.0);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    std::size_t violations = 0;
    for (std::size_t n = 0; n < count; ++n) {
        Complex const x = std::polar(std::pow(10.0, mag(rng)), ang(rng));
        Complex const y = n % 4 == 0 ? x + std::polar(std::pow(10.0, mag(rng) - 3.0), ang(rng))
                                     : std::polar(std::pow(10.0, mag(rng)), ang(rng));
        double const lhs = std::abs(x / std::abs(x) - y / std::abs(y));
        double const rhs = 2.0 * std::abs(x - y) / std::abs(x);
        if (lhs > rhs * (1.0 + 1e-12)) ++violations;
    }
    return violations;
}

}  // namespace zbus::testing
