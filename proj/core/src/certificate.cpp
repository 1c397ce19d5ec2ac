#include "zbus/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zbus/errors.hpp"

namespace zbus {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Keeps R_cap strictly inside the open C1/C2 region.
constexpr double kCapShrink = 1e-12;

}  // namespace

CertificateQuantities compute_quantities(NetworkModel const& network, LoadSet const& loads,
                                         SystemMatrices const& system, LambdaChoice const& lambda_choice) {
    IndexMap const& index = network.index();
    std::size_t const size = index.size();
    if (size == 0) throw InputError("network has no non-slack phases to certify");

    CertificateQuantities q;
    q.lambda = lambda_choice.resolve(system);
    IndexedLoads const indexed = index_loads(network, loads);

    q.w_min = kInfinity;
    q.lambda_min = kInfinity;
    for (std::size_t k = 0; k < size; ++k) {
        q.w_min = std::min(q.w_min, std::abs(system.w[k]));
        q.lambda_max = std::max(q.lambda_max, std::abs(q.lambda[k]));
        q.lambda_min = std::min(q.lambda_min, std::abs(q.lambda[k]));
    }

    auto const wye = index.wye_indices();
    q.z_wye = CMatrix(size, wye.size());
    for (std::size_t col = 0; col < wye.size(); ++col) {
        std::size_t const k = wye[col];
        q.s_wye.push_back(indexed.power[k]);
        q.i_wye.push_back(indexed.current[k]);
        q.w_wye.push_back(system.w[k]);
        q.lambda_wye.push_back(q.lambda[k]);
        for (std::size_t j = 0; j < size; ++j) q.z_wye(j, col) = system.z(j, k);
        bool const loaded = indexed.power[k] != Complex{} || indexed.current[k] != Complex{};
        if (loaded && std::abs(system.w[k]) < kSingularVoltageThreshold) {
            NodeSpec const& node = network.node(index.node_of(k));
            throw CertificateUndefinedError("no-load voltage is zero at loaded node '" + node.id + "' phase " +
                                            std::string(1, to_char(index.phase_of(k))));
        }
    }

    auto const delta = index.delta_indices();
    q.rho_min = kInfinity;
    q.z_delta = CMatrix(size, delta.size());
    for (std::size_t col = 0; col < delta.size(); ++col) {
        std::size_t const k = delta[col];
        std::size_t const n = index.node_of(k);
        DeltaPairing const& pairing = *indexed.pairing[k];
        CVector const w_node = network.node_voltage(system.w, n);
        Complex const w_line = pairing.selector.apply(w_node);

        double node_lambda = 0.0;
        for (std::size_t l : index.indices_of(n)) node_lambda = std::max(node_lambda, std::abs(q.lambda[l]));

        q.s_delta.push_back(indexed.power[k]);
        q.i_delta.push_back(indexed.current[k]);
        q.w_delta.push_back(w_line);
        q.lambda_delta.push_back(node_lambda);
        q.rho_min = std::min(q.rho_min, std::abs(w_line));

        if (pairing.paired) {
            std::size_t const partner = index.lin(n, pairing.partner);
            for (std::size_t j = 0; j < size; ++j) q.z_delta(j, col) = system.z(j, k) - system.z(j, partner);
        }
        bool const loaded = indexed.power[k] != Complex{} || indexed.current[k] != Complex{};
        if (loaded) {
            q.has_delta_load = true;
            if (std::abs(w_line) < kSingularVoltageThreshold) {
                throw CertificateUndefinedError("no-load line-to-line voltage is zero at loaded node '" +
                                                network.node(n).id + "' pair " + to_char(pairing.phase) +
                                                to_char(pairing.partner));
            }
        }
    }
    return q;
}

ConditionCoefficients compute_coefficients(CertificateQuantities const& q) {
    ConditionCoefficients c;
    c.a1 = q.lambda_max / q.w_min;
    c.delta_active = q.has_delta_load;
    c.a2 = c.delta_active ? 2.0 * q.lambda_max / q.rho_min : 0.0;

    std::size_t const rows = q.lambda.size();
    for (std::size_t j = 0; j < rows; ++j) {
        double const inv_lambda = 1.0 / std::abs(q.lambda[j]);
        double a_y = 0.0, b_y = 0.0, c_y = 0.0, d_y = 0.0;
        for (std::size_t col = 0; col < q.s_wye.size(); ++col) {
            double const s = std::abs(q.s_wye[col]);
            double const i = std::abs(q.i_wye[col]);
            if (s == 0.0 && i == 0.0) continue;
            double const z = std::abs(q.z_wye(j, col));
            double const w = std::abs(q.w_wye[col]);
            double const l = std::abs(q.lambda_wye[col]);
            a_y += z * s / w;
            b_y += z * i;
            c_y += z * s * l / (w * w);
            d_y += z * i * l / w;
        }
        double a_d = 0.0, b_d = 0.0, c_d = 0.0, d_d = 0.0;
        for (std::size_t col = 0; col < q.s_delta.size(); ++col) {
            double const s = std::abs(q.s_delta[col]);
            double const i = std::abs(q.i_delta[col]);
            if (s == 0.0 && i == 0.0) continue;
            double const z = std::abs(q.z_delta(j, col));
            double const w = std::abs(q.w_delta[col]);
            double const l = q.lambda_delta[col];
            a_d += z * s / w;
            b_d += z * i;
            c_d += z * s * l / (w * w);
            d_d += z * i * l / w;
        }
        c.a_wye = std::max(c.a_wye, a_y * inv_lambda);
        c.b_wye = std::max(c.b_wye, b_y * inv_lambda);
        c.c_wye = std::max(c.c_wye, c_y * inv_lambda);
        c.d_wye = std::max(c.d_wye, d_y * inv_lambda);
        c.a_delta = std::max(c.a_delta, a_d * inv_lambda);
        c.b_delta = std::max(c.b_delta, b_d * inv_lambda);
        c.c_delta = std::max(c.c_delta, c_d * inv_lambda);
        c.d_delta = std::max(c.d_delta, d_d * inv_lambda);
    }
    return c;
}

ConditionValues condition_values(ConditionCoefficients const& coeffs, double radius) {
    if (!(radius >= 0.0)) throw InputError("radius must be nonnegative");
    ConditionValues v;
    v.c1 = 1.0 - radius * coeffs.a1;
    v.c2 = coeffs.delta_active ? 1.0 - radius * coeffs.a2 : kInfinity;
    if (!v.c1_holds() || !v.c2_holds()) {
        v.c3_slack = -kInfinity;
        v.c4_value = kInfinity;
        return v;
    }
    double const inv1 = 1.0 / v.c1;
    double const inv2 = coeffs.delta_active ? 1.0 / v.c2 : 0.0;
    v.c3_slack = radius - (coeffs.a_wye * inv1 + coeffs.a_delta * inv2 + coeffs.b_wye + coeffs.b_delta);
    v.c4_value = coeffs.c_wye * inv1 * inv1 + 2.0 * coeffs.c_delta * inv2 * inv2 + 2.0 * coeffs.d_wye * inv1 +
                 4.0 * coeffs.d_delta * inv2;
    return v;
}

double radius_cap(ConditionCoefficients const& coeffs) {
    double cap = coeffs.a1 > 0.0 ? 1.0 / coeffs.a1 : kInfinity;
    if (coeffs.delta_active && coeffs.a2 > 0.0) cap = std::min(cap, 1.0 / coeffs.a2);
    return cap;
}

CertificateResult solve_region(ConditionCoefficients const& coeffs, RegionOptions const& options) {
    CertificateResult result;
    result.coefficients = coeffs;
    double const cap = radius_cap(coeffs);
    if (!(cap > 0.0) || !std::isfinite(cap) || options.scan_points < 2) return result;

    double const r_hi = cap * (1.0 - kCapShrink);
    std::size_t const n = options.scan_points;
    auto radius_at = [&](std::size_t i) { return r_hi * static_cast<double>(i) / static_cast<double>(n); };
    auto feasible = [&](double r) { return r > 0.0 && condition_values(coeffs, r).all_hold(); };

    // Shrinks [infeasible, feasible] (in either order) to the tolerance; returns the feasible end.
    auto refine = [&](double bad, double good) {
        while (std::abs(good - bad) > options.boundary_tolerance) {
            double const mid = 0.5 * (bad + good);
            if (mid == bad || mid == good) break;
            (feasible(mid) ? good : bad) = mid;
        }
        return good;
    };

    bool const unloaded = coeffs.load_total() == 0.0;
    std::size_t i = 1;
    while (i <= n) {
        if (!feasible(radius_at(i))) {
            ++i;
            continue;
        }
        std::size_t first = i;
        while (i + 1 <= n && feasible(radius_at(i + 1))) ++i;
        std::size_t last = i;

        RadiusInterval interval;
        if (first == 1 && unloaded) {
            // self-mapping reduces to 0 <= R; the interval reaches down to the open end at 0
            interval.r_min = 0.0;
        } else {
            interval.r_min = refine(radius_at(first - 1), radius_at(first));
        }
        interval.r_max = last == n ? r_hi : refine(radius_at(last + 1), radius_at(last));
        result.intervals.push_back(interval);
        ++i;
    }

    if (result.intervals.empty()) return result;
    result.feasible = true;
    result.r_min = result.intervals.front().r_min;
    result.r_max = result.intervals.front().r_max;
    result.alpha_at_rmin = condition_values(coeffs, result.r_min).c4_value;

    std::size_t const samples = std::max<std::size_t>(options.curve_samples, 1);
    for (std::size_t s = 0; s < samples; ++s) {
        double const t = samples == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(samples - 1);
        double const r = result.r_min + t * (result.r_max - result.r_min);
        result.alpha_curve.emplace_back(r, condition_values(coeffs, r).c4_value);
    }
    return result;
}

CertificateResult certify(NetworkModel const& network, LoadSet const& loads, SystemMatrices const& system,
                          LambdaChoice const& lambda, RegionOptions const& options) {
    CertificateQuantities const q = compute_quantities(network, loads, system, lambda);
    return solve_region(compute_coefficients(q), options);
}

CertificateResult certify(NetworkModel const& network, LoadSet const& loads, LambdaChoice const& lambda,
                          RegionOptions const& options) {
    return certify(network, loads, assemble_system(network, loads), lambda, options);
}

}  // namespace zbus
