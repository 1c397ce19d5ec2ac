#pragma once

// Reference computations written straight from the defining formulas,
// without going through the library's assembly or certificate code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "zbus/certificate.hpp"
#include "zbus/feeder.hpp"
#include "zbus/solver.hpp"
#include "zbus/system.hpp"

namespace zbus::testing {

using PhaseVoltages = std::map<Phase, Complex>;

inline std::map<std::string, PhaseVoltages> voltages_by_node(NetworkModel const& net, CVector const& v) {
    std::map<std::string, PhaseVoltages> out;
    for (NodeSpec const& node : net.nodes()) {
        PhaseVoltages& pv = out[node.id];
        if (node.kind == NodeKind::slack) {
            for (Phase p : kAllPhases) pv[p] = net.slack_voltage()[phase_position(p)];
        }
    }
    IndexMap const& index = net.index();
    for (std::size_t j = 0; j < index.size(); ++j) out[net.node(index.node_of(j)).id][index.phase_of(j)] = v[j];
    return out;
}

/// Current leaving every (node, phase) through branches and shunts minus the
/// current injected by the loads there. Zero at a power flow solution.
inline CVector kcl_mismatch(Feeder const& feeder, CVector const& v) {
    NetworkModel const& net = feeder.network;
    auto volts = voltages_by_node(net, v);
    std::map<std::string, PhaseVoltages> leaving;
    std::map<std::string, PhaseVoltages> injected;

    for (BranchSpec const& b : net.branches()) {
        std::size_t const dim = b.phases.size();
        for (std::size_t r = 0; r < dim; ++r) {
            Complex from_out{}, to_out{};
            for (std::size_t c = 0; c < dim; ++c) {
                Complex const drop = volts[b.from][b.phases[c]] - volts[b.to][b.phases[c]];
                from_out += b.series(r, c) * drop;
                to_out -= b.series(r, c) * drop;
                if (b.shunt_from.rows() > 0) from_out += b.shunt_from(r, c) * volts[b.from][b.phases[c]];
                if (b.shunt_to.rows() > 0) to_out += b.shunt_to(r, c) * volts[b.to][b.phases[c]];
            }
            leaving[b.from][b.phases[r]] += from_out;
            leaving[b.to][b.phases[r]] += to_out;
        }
    }
    for (NodeSpec const& node : net.nodes()) {
        for (std::size_t p = 0; p < node.shunt.size(); ++p) {
            leaving[node.id][node.phases[p]] += node.shunt[p] * volts[node.id][node.phases[p]];
        }
    }
    for (WyeLoadEntry const& e : feeder.loads.wye_entries()) {
        Complex const x = volts[e.node][e.phase];
        injected[e.node][e.phase] +=
            -std::conj(e.zip.power / x) - e.zip.current * x / std::abs(x) - e.zip.admittance * x;
    }
    for (DeltaLoadEntry const& e : feeder.loads.delta_entries()) {
        Complex const u = volts[e.node][e.first] - volts[e.node][e.second];
        Complex const i = -std::conj(e.zip.power / u) - e.zip.current * u / std::abs(u) - e.zip.admittance * u;
        injected[e.node][e.first] += i;
        injected[e.node][e.second] -= i;
    }

    IndexMap const& index = net.index();
    CVector out(index.size());
    for (std::size_t j = 0; j < index.size(); ++j) {
        std::string const& id = net.node(index.node_of(j)).id;
        Phase const p = index.phase_of(j);
        out[j] = leaving[id][p] - injected[id][p];
    }
    return out;
}

inline double max_abs(CVector const& v) {
    double m = 0.0;
    for (Complex z : v) m = std::max(m, std::abs(z));
    return m;
}

/// Per-index load aliases and delta columns built from the pairing rule
/// "phase φ carries the pair (φ, r(φ)) when r(φ) is present".
struct PairedColumns {
    std::vector<std::size_t> wye;         // linear indices
    std::vector<std::size_t> delta;       // linear indices
    std::vector<Complex> s_wye, i_wye, s_delta, i_delta, w_delta;
    std::vector<double> lambda_delta;
    std::vector<CVector> z_delta;  // one column per delta index
};

inline PairedColumns paired_columns(Feeder const& feeder, SystemMatrices const& sys, CVector const& lambda) {
    NetworkModel const& net = feeder.network;
    IndexMap const& index = net.index();
    PairedColumns out;
    std::map<std::pair<std::string, Phase>, ZipLoad> wye_loads;
    for (auto const& e : feeder.loads.wye_entries()) wye_loads[{e.node, e.phase}] = e.zip;
    std::map<std::pair<std::string, Phase>, ZipLoad> pair_loads;  // keyed by (node, φ) for pair (φ, r(φ))
    for (auto const& e : feeder.loads.delta_entries()) {
        Phase const lead = right_shift(e.first) == e.second ? e.first : e.second;
        pair_loads[{e.node, lead}] = e.zip;
    }
    for (std::size_t j = 0; j < index.size(); ++j) {
        NodeSpec const& node = net.node(index.node_of(j));
        Phase const phi = index.phase_of(j);
        if (node.kind == NodeKind::wye) {
            out.wye.push_back(j);
            ZipLoad const zip = wye_loads.count({node.id, phi}) ? wye_loads[{node.id, phi}] : ZipLoad{};
            out.s_wye.push_back(zip.power);
            out.i_wye.push_back(zip.current);
            continue;
        }
        out.delta.push_back(j);
        double lam = 0.0;
        for (std::size_t k : index.indices_of(index.node_of(j))) lam = std::max(lam, std::abs(lambda[k]));
        out.lambda_delta.push_back(lam);
        Phase const next = right_shift(phi);
        auto partner = index.find(index.node_of(j), next);
        CVector column(index.size());
        if (partner) {
            ZipLoad const zip = pair_loads.count({node.id, phi}) ? pair_loads[{node.id, phi}] : ZipLoad{};
            out.s_delta.push_back(zip.power);
            out.i_delta.push_back(zip.current);
            out.w_delta.push_back(sys.w[j] - sys.w[*partner]);
            for (std::size_t r = 0; r < index.size(); ++r) column[r] = sys.z(r, j) - sys.z(r, *partner);
        } else {
            // two-phase node: the other phase present is the left neighbour
            Phase const other = right_shift(right_shift(phi));
            auto o = index.find(index.node_of(j), other);
            out.s_delta.push_back({});
            out.i_delta.push_back({});
            out.w_delta.push_back(sys.w[j] - sys.w[*o]);
        }
        out.z_delta.push_back(std::move(column));
    }
    return out;
}

inline ConditionCoefficients reference_coefficients(Feeder const& feeder, SystemMatrices const& sys,
                                                    CVector const& lambda) {
    PairedColumns const pc = paired_columns(feeder, sys, lambda);
    std::size_t const n = lambda.size();
    ConditionCoefficients c;
    double w_min = INFINITY, rho_min = INFINITY, lam_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        w_min = std::min(w_min, std::abs(sys.w[j]));
        lam_max = std::max(lam_max, std::abs(lambda[j]));
    }
    for (Complex x : pc.w_delta) rho_min = std::min(rho_min, std::abs(x));
    bool delta_loaded = false;
    for (std::size_t k = 0; k < pc.delta.size(); ++k) {
        delta_loaded = delta_loaded || pc.s_delta[k] != Complex{} || pc.i_delta[k] != Complex{};
    }
    c.a1 = lam_max / w_min;
    c.delta_active = delta_loaded;
    c.a2 = delta_loaded ? 2.0 * lam_max / rho_min : 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double const li = 1.0 / std::abs(lambda[r]);
        double ay = 0, by = 0, cy = 0, dy = 0, ad = 0, bd = 0, cd = 0, dd = 0;
        for (std::size_t k = 0; k < pc.wye.size(); ++k) {
            std::size_t const j = pc.wye[k];
            if (pc.s_wye[k] == Complex{} && pc.i_wye[k] == Complex{}) continue;
            double const z = std::abs(sys.z(r, j)), w = std::abs(sys.w[j]), l = std::abs(lambda[j]);
            ay += z * std::abs(pc.s_wye[k]) / w;
            by += z * std::abs(pc.i_wye[k]);
            cy += z * std::abs(pc.s_wye[k]) * l / (w * w);
            dy += z * std::abs(pc.i_wye[k]) * l / w;
        }
        for (std::size_t k = 0; k < pc.delta.size(); ++k) {
            if (pc.s_delta[k] == Complex{} && pc.i_delta[k] == Complex{}) continue;
            double const z = std::abs(pc.z_delta[k][r]), w = std::abs(pc.w_delta[k]), l = pc.lambda_delta[k];
            ad += z * std::abs(pc.s_delta[k]) / w;
            bd += z * std::abs(pc.i_delta[k]);
            cd += z * std::abs(pc.s_delta[k]) * l / (w * w);
            dd += z * std::abs(pc.i_delta[k]) * l / w;
        }
        c.a_wye = std::max(c.a_wye, li * ay);
        c.b_wye = std::max(c.b_wye, li * by);
        c.c_wye = std::max(c.c_wye, li * cy);
        c.d_wye = std::max(c.d_wye, li * dy);
        c.a_delta = std::max(c.a_delta, li * ad);
        c.b_delta = std::max(c.b_delta, li * bd);
        c.c_delta = std::max(c.c_delta, li * cd);
        c.d_delta = std::max(c.d_delta, li * dd);
    }
    return c;
}

/// Point w + Λξ with ||ξ||_inf <= radius. Every third draw puts one entry on the sphere.
inline CVector random_point_in_ball(CVector const& w, CVector const& lambda, double radius, std::mt19937_64& rng,
                                    std::size_t draw) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CVector v(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        double const mag = radius * std::sqrt(unit(rng));
        v[j] = w[j] + lambda[j] * std::polar(mag, 2.0 * M_PI * unit(rng));
    }
    if (draw % 3 == 0 && !w.empty()) {
        std::size_t const j = draw % w.size();
        v[j] = w[j] + lambda[j] * std::polar(radius * (1.0 - 1e-14), 2.0 * M_PI * unit(rng));
    }
    return v;
}

}  // namespace zbus::testing
