#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "zbus/linalg.hpp"
#include "zbus/loads.hpp"
#include "zbus/network.hpp"
#include "zbus/solver.hpp"
#include "zbus/system.hpp"

namespace zbus {

/// Network aggregates entering the four contraction conditions.
///
/// Vectors indexed "over wye" follow the order of IndexMap::wye_indices();
/// vectors "over delta" follow IndexMap::delta_indices() (the l_k order).
struct CertificateQuantities {
    double w_min = 0.0;       // min_k |w_k|
    double lambda_max = 0.0;  // max_k |λ_k|
    double lambda_min = 0.0;  // min_k |λ_k|
    double rho_min = 0.0;     // min over delta indices of |e_k^T w_n|; +inf without delta indices
    bool has_delta_load = false;

    CVector lambda;  // diagonal of Λ over all indices

    CVector s_wye, i_wye, w_wye, lambda_wye;
    CMatrix z_wye;  // J × |J_Y| columns of Z

    CVector s_delta, i_delta, w_delta;
    std::vector<double> lambda_delta;  // per-node max |λ_l| for each delta index
    CMatrix z_delta;                   // J × |J_Δ|, Z_{•k} - Z_{•k'} or zero
};

/// Throws CertificateUndefinedError when a loaded index sits on a zero
/// no-load voltage (or zero no-load line-to-line voltage).
CertificateQuantities compute_quantities(NetworkModel const& network, LoadSet const& loads,
                                         SystemMatrices const& system, LambdaChoice const& lambda);

/// Scalar coefficients of the four conditions as functions of R.
struct ConditionCoefficients {
    double a1 = 0.0;  // λ̄ / w̲
    double a2 = 0.0;  // 2λ̄ / ρ̲, zero when no delta load exists
    double a_wye = 0.0;
    double a_delta = 0.0;
    double b_wye = 0.0;
    double b_delta = 0.0;
    double c_wye = 0.0;
    double c_delta = 0.0;
    double d_wye = 0.0;
    double d_delta = 0.0;
    /// When false the line-to-line condition is vacuous.
    bool delta_active = false;

    /// Combined constant of the self-mapping condition at R -> 0+.
    double load_total() const noexcept { return a_wye + a_delta + b_wye + b_delta; }

    friend bool operator==(ConditionCoefficients const&, ConditionCoefficients const&) = default;
};

ConditionCoefficients compute_coefficients(CertificateQuantities const& q);

struct ConditionValues {
    double c1 = 0.0;
    double c2 = 0.0;  // +inf when the delta condition is vacuous
    double c3_slack = 0.0;
    double c4_value = 0.0;

    bool c1_holds() const noexcept { return c1 > 0.0; }
    bool c2_holds() const noexcept { return c2 > 0.0; }
    bool c3_holds() const noexcept { return c1_holds() && c2_holds() && c3_slack >= 0.0; }
    bool c4_holds() const noexcept { return c1_holds() && c2_holds() && c4_value < 1.0; }
    bool all_hold() const noexcept { return c3_holds() && c4_holds(); }
};

/// Evaluates the four conditions at radius R > 0. Violated C1/C2 make
/// c3_slack = -inf and c4_value = +inf rather than throwing.
ConditionValues condition_values(ConditionCoefficients const& coeffs, double radius);

struct RadiusInterval {
    double r_min = 0.0;
    double r_max = 0.0;
};

struct RegionOptions {
    std::size_t scan_points = 100000;
    std::size_t curve_samples = 200;
    double boundary_tolerance = 1e-9;
};

struct CertificateResult {
    bool feasible = false;
    /// Lowest feasible interval; meaningful only when feasible.
    double r_min = 0.0;
    double r_max = 0.0;
    double alpha_at_rmin = 0.0;
    /// Every feasible interval found, in increasing R.
    std::vector<RadiusInterval> intervals;
    /// (R, C4 left side) sampled across [r_min, r_max].
    std::vector<std::pair<double, double>> alpha_curve;
    ConditionCoefficients coefficients;
};

/// Largest radius before C1 or C2 fails.
double radius_cap(ConditionCoefficients const& coeffs);

/// Feasible radii by dense scan over (0, R_cap] and bisection of each boundary.
CertificateResult solve_region(ConditionCoefficients const& coeffs, RegionOptions const& options = {});

CertificateResult certify(NetworkModel const& network, LoadSet const& loads, LambdaChoice const& lambda,
                          RegionOptions const& options = {});
CertificateResult certify(NetworkModel const& network, LoadSet const& loads, SystemMatrices const& system,
                          LambdaChoice const& lambda, RegionOptions const& options = {});

}  // namespace zbus
