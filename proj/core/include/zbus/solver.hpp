#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zbus/linalg.hpp"
#include "zbus/loads.hpp"
#include "zbus/network.hpp"
#include "zbus/system.hpp"

namespace zbus {

enum class LambdaMode { identity, diag_w, custom };

/// Invertible diagonal scaling Λ between voltages and scaled iterates u = Λ^{-1} v.
struct LambdaChoice {
    LambdaMode mode = LambdaMode::identity;
    CVector custom_entries;

    static LambdaChoice identity() { return {}; }
    static LambdaChoice diag_w() { return {LambdaMode::diag_w, {}}; }
    static LambdaChoice custom(CVector entries) { return {LambdaMode::custom, std::move(entries)}; }

    /// Diagonal of Λ for this system. Throws InputError on a zero entry or length mismatch.
    CVector resolve(SystemMatrices const& system) const;
    std::string describe() const;
};

enum class InitialVoltage { no_load, flat, custom };

struct SolveConfig {
    std::size_t max_iters = 100;
    /// Step tolerance on ||v[t+1] - v[t]||_inf.
    double tol = 1e-10;
    double divergence_threshold = 1e6;
    InitialVoltage init = InitialVoltage::no_load;
    CVector custom_initial;

    /// Throws InputError.
    void validate() const;
};

/// Nodal balance required before a small step is accepted as convergence.
inline constexpr double kResidualTolerance = 1e-6;

enum class SolveStatus { converged, max_iters_reached, diverged, singular_voltage };

std::string_view to_string(SolveStatus status) noexcept;

struct SolveTrace {
    /// v[0], v[1], ... including the initial point.
    std::vector<CVector> iterates;
    /// diffs[t] = ||v[t+1] - v[t]||_inf.
    std::vector<double> diffs;
    /// ratios[t] = diffs[t+1] / diffs[t].
    std::vector<double> ratios;
    SolveStatus status = SolveStatus::max_iters_reached;
    std::optional<CVector> solution;
    /// ||Y v + Y_NS v_S - i(v)||_inf at the last iterate (NaN when not evaluable).
    double residual = 0.0;
    /// Iterate at which a singular load voltage stopped the run.
    std::optional<std::size_t> singular_iterate;
    std::string message;

    std::size_t iterations() const noexcept { return diffs.size(); }
    /// True when the run hit max_iters and the last 10 ratios have geometric mean >= 0.999.
    bool non_contracting_tail() const;
};

/// One application of the Z-Bus map v -> Z[i_PQ(v) + i_I(v)] + w.
class ZbusMap {
  public:
    ZbusMap(NetworkModel const& network, LoadSet const& loads, SystemMatrices const& system)
        : network_(network), loads_(loads), system_(system) {}

    /// Throws SingularVoltageError.
    CVector apply(std::span<Complex const> v) const;
    /// Scaled map T(u) = Λ^{-1} Z[i_PQ(Λu) + i_I(Λu)] + Λ^{-1} w.
    CVector apply_scaled(std::span<Complex const> u, std::span<Complex const> lambda) const;

  private:
    NetworkModel const& network_;
    LoadSet const& loads_;
    SystemMatrices const& system_;
};

CVector initial_voltage(NetworkModel const& network, SystemMatrices const& system, SolveConfig const& cfg);

SolveTrace solve(NetworkModel const& network, LoadSet const& loads, SystemMatrices const& system,
                 SolveConfig const& cfg = {});

/// Runs the scaled iteration u[t+1] = T(u[t]) from u[0] = Λ^{-1} v[0] for
/// a fixed number of steps. Returns every u iterate.
std::vector<CVector> scaled_trajectory(NetworkModel const& network, LoadSet const& loads,
                                       SystemMatrices const& system, std::span<Complex const> lambda,
                                       std::span<Complex const> v0, std::size_t steps);

/// ||Λ^{-1}(v - w)||_inf.
double ball_distance(std::span<Complex const> v, std::span<Complex const> w, std::span<Complex const> lambda);

/// True iff ||Λ^{-1}(v - w)||_inf <= R + 1e-12.
bool membership_in_ball(std::span<Complex const> v, SystemMatrices const& system, LambdaChoice const& lambda,
                        double radius);
bool membership_in_ball(std::span<Complex const> v, std::span<Complex const> w, std::span<Complex const> lambda,
                        double radius);

/// Ratios below this denominator are ignored when estimating the empirical rate.
inline constexpr double kRateFloor = 1e-9;

/// Largest ||u[t+1]-u[t]|| / ||u[t]-u[t-1]|| along the trace, measured in
/// the Λ-scaled norm (identity when `lambda` is empty). Steps whose
/// previous difference is below kRateFloor are skipped. Throws Error when
/// the trace has fewer than three iterates.
double empirical_rate(SolveTrace const& trace, std::span<Complex const> lambda = {});

/// B = (max|λ| / min|λ|) ||v[0] - v_fp||_inf.
double geometric_bound_constant(std::span<Complex const> lambda, std::span<Complex const> v0,
                                std::span<Complex const> v_fp);

/// First t with ||v[t] - v_final||_inf > B α^t + slack, using the last
/// iterate as the fixed-point proxy; nullopt when every iterate is dominated.
std::optional<std::size_t> first_geometric_violation(SolveTrace const& trace, std::span<Complex const> lambda,
                                                     double alpha, double slack = 0.0);

}  // namespace zbus
