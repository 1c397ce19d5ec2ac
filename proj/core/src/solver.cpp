#include "zbus/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zbus/errors.hpp"

namespace zbus {

CVector LambdaChoice::resolve(SystemMatrices const& system) const {
    std::size_t const size = system.size();
    CVector lambda;
    switch (mode) {
        case LambdaMode::identity: lambda.assign(size, Complex{1.0, 0.0}); break;
        case LambdaMode::diag_w: lambda = system.w; break;
        case LambdaMode::custom:
            if (custom_entries.size() != size) {
                throw InputError("custom Lambda has " + std::to_string(custom_entries.size()) +
                                 " entries, network has " + std::to_string(size));
            }
            lambda = custom_entries;
            break;
    }
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (std::abs(lambda[j]) == 0.0 || !std::isfinite(std::abs(lambda[j]))) {
            throw InputError("Lambda entry " + std::to_string(j) + " is zero; Lambda must be invertible");
        }
    }
    return lambda;
}

std::string LambdaChoice::describe() const {
    switch (mode) {
        case LambdaMode::identity: return "identity";
        case LambdaMode::diag_w: return "diag-w";
        case LambdaMode::custom: return "custom";
    }
    return "identity";
}

void SolveConfig::validate() const {
    if (max_iters < 1) throw InputError("max_iters must be at least 1");
    if (!(tol > 0.0)) throw InputError("tol must be positive");
    if (!(divergence_threshold > 0.0)) throw InputError("divergence threshold must be positive");
}

std::string_view to_string(SolveStatus status) noexcept {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iters_reached: return "max_iters_reached";
        case SolveStatus::diverged: return "diverged";
        case SolveStatus::singular_voltage: return "singular_voltage";
    }
    return "max_iters_reached";
}

bool SolveTrace::non_contracting_tail() const {
    constexpr std::size_t kWindow = 10;
    if (status != SolveStatus::max_iters_reached || ratios.size() < kWindow) return false;
    double log_sum = 0.0;
    for (std::size_t i = ratios.size() - kWindow; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0)) return false;
        log_sum += std::log(ratios[i]);
    }
    return std::exp(log_sum / kWindow) >= 0.999;
}

CVector ZbusMap::apply(std::span<Complex const> v) const {
    InjectionParts const parts = evaluate_injections(network_, loads_, v);
    CVector next = system_.z * parts.nonlinear();
    for (std::size_t j = 0; j < next.size(); ++j) next[j] += system_.w[j];
    return next;
}

CVector ZbusMap::apply_scaled(std::span<Complex const> u, std::span<Complex const> lambda) const {
    CVector v(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) v[j] = lambda[j] * u[j];
    InjectionParts const parts = evaluate_injections(network_, loads_, v);
    CVector const zi = system_.z * parts.nonlinear();
    CVector out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = zi[j] / lambda[j] + system_.w[j] / lambda[j];
    return out;
}

CVector initial_voltage(NetworkModel const& network, SystemMatrices const& system, SolveConfig const& cfg) {
    switch (cfg.init) {
        case InitialVoltage::no_load: return system.w;
        case InitialVoltage::flat: return network.flat_profile();
        case InitialVoltage::custom:
            if (cfg.custom_initial.size() != system.size()) {
                throw InputError("initial voltage has " + std::to_string(cfg.custom_initial.size()) +
                                 " entries, network has " + std::to_string(system.size()));
            }
            return cfg.custom_initial;
    }
    return system.w;
}

SolveTrace solve(NetworkModel const& network, LoadSet const& loads, SystemMatrices const& system,
                 SolveConfig const& cfg) {
    cfg.validate();
    ZbusMap const map(network, loads, system);
    SolveTrace trace;
    CVector v = initial_voltage(network, system, cfg);
    trace.iterates.push_back(v);

    auto residual_at = [&](CVector const& x) {
        CVector const lhs = network_current(system, x);
        CVector const rhs = evaluate_injections(network, loads, x).total();
        return inf_norm(subtract(lhs, rhs));
    };

    for (std::size_t t = 0; t < cfg.max_iters; ++t) {
        CVector next;
        try {
            next = map.apply(v);
        } catch (SingularVoltageError const& e) {
            trace.status = SolveStatus::singular_voltage;
            trace.singular_iterate = t;
            trace.message = e.what();
            trace.residual = std::numeric_limits<double>::quiet_NaN();
            return trace;
        }
        double const diff = inf_norm(subtract(next, v));
        if (!trace.diffs.empty()) trace.ratios.push_back(diff / trace.diffs.back());
        trace.diffs.push_back(diff);
        trace.iterates.push_back(next);
        v = std::move(next);

        double const magnitude = inf_norm(v);
        if (!std::isfinite(magnitude) || magnitude > cfg.divergence_threshold) {
            trace.status = SolveStatus::diverged;
            trace.residual = std::numeric_limits<double>::quiet_NaN();
            return trace;
        }
        if (diff <= cfg.tol) {
            double residual = std::numeric_limits<double>::quiet_NaN();
            try {
                residual = residual_at(v);
            } catch (SingularVoltageError const&) {
            }
            trace.residual = residual;
            // a short step alone does not certify nodal balance
            if (residual <= kResidualTolerance) {
                trace.status = SolveStatus::converged;
                trace.solution = v;
                return trace;
            }
        }
    }
    trace.status = SolveStatus::max_iters_reached;
    try {
        trace.residual = residual_at(v);
    } catch (SingularVoltageError const&) {
        trace.residual = std::numeric_limits<double>::quiet_NaN();
    }
    return trace;
}

std::vector<CVector> scaled_trajectory(NetworkModel const& network, LoadSet const& loads,
                                       SystemMatrices const& system, std::span<Complex const> lambda,
                                       std::span<Complex const> v0, std::size_t steps) {
    ZbusMap const map(network, loads, system);
    CVector u(v0.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = v0[j] / lambda[j];
    std::vector<CVector> out{u};
    for (std::size_t t = 0; t < steps; ++t) {
        u = map.apply_scaled(u, lambda);
        out.push_back(u);
    }
    return out;
}

double ball_distance(std::span<Complex const> v, std::span<Complex const> w, std::span<Complex const> lambda) {
    if (v.size() != w.size() || v.size() != lambda.size()) throw InputError("ball_distance: length mismatch");
    double best = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) best = std::max(best, std::abs((v[j] - w[j]) / lambda[j]));
    return best;
}

bool membership_in_ball(std::span<Complex const> v, std::span<Complex const> w, std::span<Complex const> lambda,
                        double radius) {
    if (!(radius > 0.0)) throw InputError("ball radius must be positive");
    return ball_distance(v, w, lambda) <= radius + 1e-12;
}

bool membership_in_ball(std::span<Complex const> v, SystemMatrices const& system, LambdaChoice const& lambda,
                        double radius) {
    CVector const diag = lambda.resolve(system);
    return membership_in_ball(v, system.w, diag, radius);
}

double empirical_rate(SolveTrace const& trace, std::span<Complex const> lambda) {
    if (trace.iterates.size() < 3) {
        throw Error("empirical rate needs at least three iterates, trace has " +
                    std::to_string(trace.iterates.size()));
    }
    auto scaled_diff = [&](std::size_t t) {
        CVector const& a = trace.iterates[t + 1];
        CVector const& b = trace.iterates[t];
        double best = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            Complex const d = a[j] - b[j];
            best = std::max(best, std::abs(lambda.empty() ? d : d / lambda[j]));
        }
        return best;
    };
    double rate = 0.0;
    double previous = scaled_diff(0);
    for (std::size_t t = 1; t + 1 < trace.iterates.size(); ++t) {
        double const current = scaled_diff(t);
        if (previous > kRateFloor) rate = std::max(rate, current / previous);
        previous = current;
    }
    return rate;
}

double geometric_bound_constant(std::span<Complex const> lambda, std::span<Complex const> v0,
                                std::span<Complex const> v_fp) {
    double lambda_max = 0.0;
    double lambda_min = std::numeric_limits<double>::infinity();
    for (auto const& l : lambda) {
        lambda_max = std::max(lambda_max, std::abs(l));
        lambda_min = std::min(lambda_min, std::abs(l));
    }
    return lambda_max / lambda_min * inf_norm(subtract(v0, v_fp));
}

std::optional<std::size_t> first_geometric_violation(SolveTrace const& trace, std::span<Complex const> lambda,
                                                     double alpha, double slack) {
    if (trace.iterates.empty()) return std::nullopt;
    CVector const& final_v = trace.iterates.back();
    double const bound = geometric_bound_constant(lambda, trace.iterates.front(), final_v);
    double power = 1.0;
    for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
        double const error = inf_norm(subtract(trace.iterates[t], final_v));
        if (error > bound * power + slack) return t;
        power *= alpha;
    }
    return std::nullopt;
}

}  // namespace zbus
