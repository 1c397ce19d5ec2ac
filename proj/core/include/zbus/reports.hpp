#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zbus/certificate.hpp"
#include "zbus/feeder.hpp"
#include "zbus/solver.hpp"

namespace zbus {

struct CertConfigEcho {
    std::string feeder;
    std::string lambda = "identity";
    std::size_t curve_samples = 200;
};

/// Serialized certificate. Unavailable numbers (infeasible cases) are nullopt.
struct CertReport {
    std::string schema_version = "1";
    CertConfigEcho config;
    bool feasible = false;
    std::optional<double> r_min;
    std::optional<double> r_max;
    std::optional<double> alpha_at_rmin;
    std::vector<RadiusInterval> intervals;
    ConditionCoefficients coefficients;
    std::vector<std::pair<double, double>> alpha_curve;
};

CertReport make_cert_report(CertificateResult const& result, CertConfigEcho config);
std::string emit_cert_report(CertReport const& report);
/// Throws InputError.
CertReport parse_cert_report(std::string_view text);

struct SolveConfigEcho {
    std::string feeder;
    std::string lambda = "identity";
    std::string init = "no-load";
    double tol = 1e-10;
    std::size_t max_iters = 100;
};

struct VoltageEntry {
    std::string node;
    Phase phase = Phase::a;
    Complex value;
};

struct SolveReport {
    std::string schema_version = "1";
    SolveConfigEcho config;
    SolveStatus status = SolveStatus::max_iters_reached;
    std::size_t iterations = 0;
    bool non_contracting_tail = false;
    std::optional<double> residual;
    std::optional<double> final_diff;
    std::optional<double> empirical_rate;
    std::string message;
    /// Final iterate by (node, phase); empty when the run stopped on a singular voltage.
    std::vector<VoltageEntry> voltages;
    std::vector<double> diffs;
};

SolveReport make_solve_report(NetworkModel const& network, SolveTrace const& trace, SolveConfigEcho config,
                              std::optional<double> empirical_rate);
std::string emit_solve_report(SolveReport const& report);
/// Throws InputError.
SolveReport parse_solve_report(std::string_view text);

/// CSV with header t,diff_inf_norm,empirical_ratio,max_abs_voltage and one
/// row per iterate. Row t reports ||v[t] - v[t-1]|| and the ratio of that
/// step to the previous one; undefined cells are left empty.
std::string trace_csv(SolveTrace const& trace);

/// Inclusive start:stop:step range.
struct ScaleRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
};

/// Throws InputError unless the text is "start:stop:step" with step > 0 and stop >= start.
ScaleRange parse_scale_range(std::string_view text);
/// start, start + step, ... up to stop (inclusive, with a 1e-9 relative
/// allowance for rounding). A step longer than the range yields only start.
std::vector<double> expand(ScaleRange const& range);

struct SweepRow {
    double scale = 0.0;
    bool feasible = false;
    std::optional<double> r_min;
    std::optional<double> r_max;
    std::optional<double> alpha_at_rmin;
    SolveStatus status = SolveStatus::max_iters_reached;
    std::size_t iterations = 0;
    std::optional<double> empirical_rate;
};

/// Certifies and solves the feeder with every PQ and I load multiplied by
/// each scale, in the given order.
std::vector<SweepRow> run_sweep(Feeder const& feeder, std::span<double const> scales, LambdaChoice const& lambda,
                                SolveConfig const& solve_config = {}, RegionOptions const& region = {});

/// Header scale,feasible,r_min,r_max,alpha_at_rmin,solve_status,iters,empirical_rate.
std::string sweep_csv(std::span<SweepRow const> rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace zbus
