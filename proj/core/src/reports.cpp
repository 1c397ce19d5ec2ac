#include "zbus/reports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "zbus/errors.hpp"

namespace zbus {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(std::optional<double> x) {
    if (!x || !std::isfinite(*x)) return nullptr;
    return *x;
}

std::optional<double> finite_or_none(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    return x;
}

Json const& at(Json const& obj, std::string_view key) {
    if (!obj.is_object()) throw InputError("report: expected an object around '" + std::string(key) + "'");
    auto it = obj.find(std::string(key));
    if (it == obj.end()) throw InputError("report: missing field '" + std::string(key) + "'");
    return *it;
}

double as_number(Json const& j, std::string_view what) {
    if (!j.is_number()) throw InputError("report: field '" + std::string(what) + "' must be a number");
    return j.get<double>();
}

std::optional<double> as_optional_number(Json const& j, std::string_view what) {
    if (j.is_null()) return std::nullopt;
    return as_number(j, what);
}

std::string as_string(Json const& j, std::string_view what) {
    if (!j.is_string()) throw InputError("report: field '" + std::string(what) + "' must be a string");
    return j.get<std::string>();
}

bool as_bool(Json const& j, std::string_view what) {
    if (!j.is_boolean()) throw InputError("report: field '" + std::string(what) + "' must be a boolean");
    return j.get<bool>();
}

std::size_t as_count(Json const& j, std::string_view what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw InputError("report: field '" + std::string(what) + "' must be a nonnegative integer");
    }
    return j.get<std::size_t>();
}

Json const& as_array(Json const& j, std::string_view what) {
    if (!j.is_array()) throw InputError("report: field '" + std::string(what) + "' must be an array");
    return j;
}

Json parse_document(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text.begin(), text.end());
    } catch (Json::parse_error const& e) {
        throw InputError(std::string("report: ") + e.what());
    }
    auto const version = as_string(at(root, "schema_version"), "schema_version");
    if (version != "1") throw InputError("report: unsupported schema_version '" + version + "'");
    return root;
}

SolveStatus parse_status(std::string_view text) {
    for (SolveStatus s : {SolveStatus::converged, SolveStatus::max_iters_reached, SolveStatus::diverged,
                          SolveStatus::singular_voltage}) {
        if (to_string(s) == text) return s;
    }
    throw InputError("report: unknown status '" + std::string(text) + "'");
}

std::string cell(std::optional<double> x) { return x && std::isfinite(*x) ? format_double(*x) : std::string{}; }

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    auto const* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw InputError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

CertReport make_cert_report(CertificateResult const& result, CertConfigEcho config) {
    CertReport r;
    r.config = std::move(config);
    r.feasible = result.feasible;
    if (result.feasible) {
        r.r_min = result.r_min;
        r.r_max = result.r_max;
        r.alpha_at_rmin = result.alpha_at_rmin;
    }
    r.intervals = result.intervals;
    r.coefficients = result.coefficients;
    r.alpha_curve = result.alpha_curve;
    return r;
}

std::string emit_cert_report(CertReport const& r) {
    Json root;
    root["schema_version"] = r.schema_version;
    root["config"] = {{"feeder", r.config.feeder},
                      {"lambda", r.config.lambda},
                      {"curve_samples", r.config.curve_samples}};
    root["feasible"] = r.feasible;
    root["r_min"] = number_or_null(r.r_min);
    root["r_max"] = number_or_null(r.r_max);
    root["alpha_at_rmin"] = number_or_null(r.alpha_at_rmin);
    Json intervals = Json::array();
    for (auto const& iv : r.intervals) intervals.push_back(Json::array({iv.r_min, iv.r_max}));
    root["intervals"] = std::move(intervals);
    auto const& c = r.coefficients;
    root["coefficients"] = {{"a1", number_or_null(c.a1)},      {"a2", number_or_null(c.a2)},
                            {"A_Y", number_or_null(c.a_wye)},  {"A_D", number_or_null(c.a_delta)},
                            {"B_Y", number_or_null(c.b_wye)},  {"B_D", number_or_null(c.b_delta)},
                            {"C_Y", number_or_null(c.c_wye)},  {"C_D", number_or_null(c.c_delta)},
                            {"D_Y", number_or_null(c.d_wye)},  {"D_D", number_or_null(c.d_delta)}};
    Json curve = Json::array();
    for (auto const& [radius, alpha] : r.alpha_curve) curve.push_back(Json::array({radius, alpha}));
    root["alpha_curve"] = std::move(curve);
    return root.dump(2) + "\n";
}

CertReport parse_cert_report(std::string_view text) {
    Json const root = parse_document(text);
    CertReport r;
    Json const& config = at(root, "config");
    r.config.feeder = as_string(at(config, "feeder"), "config.feeder");
    r.config.lambda = as_string(at(config, "lambda"), "config.lambda");
    r.config.curve_samples = as_count(at(config, "curve_samples"), "config.curve_samples");
    r.feasible = as_bool(at(root, "feasible"), "feasible");
    r.r_min = as_optional_number(at(root, "r_min"), "r_min");
    r.r_max = as_optional_number(at(root, "r_max"), "r_max");
    r.alpha_at_rmin = as_optional_number(at(root, "alpha_at_rmin"), "alpha_at_rmin");
    for (Json const& iv : as_array(at(root, "intervals"), "intervals")) {
        if (!iv.is_array() || iv.size() != 2) throw InputError("report: interval must be [r_min, r_max]");
        r.intervals.push_back({as_number(iv[0], "intervals"), as_number(iv[1], "intervals")});
    }
    Json const& c = at(root, "coefficients");
    auto coeff = [&](std::string_view key) {
        return as_optional_number(at(c, key), key).value_or(std::numeric_limits<double>::quiet_NaN());
    };
    r.coefficients.a1 = coeff("a1");
    r.coefficients.a2 = coeff("a2");
    r.coefficients.a_wye = coeff("A_Y");
    r.coefficients.a_delta = coeff("A_D");
    r.coefficients.b_wye = coeff("B_Y");
    r.coefficients.b_delta = coeff("B_D");
    r.coefficients.c_wye = coeff("C_Y");
    r.coefficients.c_delta = coeff("C_D");
    r.coefficients.d_wye = coeff("D_Y");
    r.coefficients.d_delta = coeff("D_D");
    r.coefficients.delta_active = r.coefficients.a2 > 0.0;
    for (Json const& point : as_array(at(root, "alpha_curve"), "alpha_curve")) {
        if (!point.is_array() || point.size() != 2) throw InputError("report: alpha_curve entries must be [R, alpha]");
        r.alpha_curve.emplace_back(as_number(point[0], "alpha_curve"), as_number(point[1], "alpha_curve"));
    }
    return r;
}

SolveReport make_solve_report(NetworkModel const& network, SolveTrace const& trace, SolveConfigEcho config,
                              std::optional<double> empirical_rate) {
    SolveReport r;
    r.config = std::move(config);
    r.status = trace.status;
    r.iterations = trace.iterations();
    r.non_contracting_tail = trace.non_contracting_tail();
    r.residual = finite_or_none(trace.residual);
    if (!trace.diffs.empty()) r.final_diff = finite_or_none(trace.diffs.back());
    if (empirical_rate) r.empirical_rate = finite_or_none(*empirical_rate);
    r.message = trace.message;
    r.diffs = trace.diffs;
    if (trace.status != SolveStatus::singular_voltage && !trace.iterates.empty()) {
        CVector const& v = trace.solution ? *trace.solution : trace.iterates.back();
        IndexMap const& index = network.index();
        for (std::size_t j = 0; j < index.size(); ++j) {
            r.voltages.push_back({network.node(index.node_of(j)).id, index.phase_of(j), v[j]});
        }
    }
    return r;
}

std::string emit_solve_report(SolveReport const& r) {
    Json root;
    root["schema_version"] = r.schema_version;
    root["config"] = {{"feeder", r.config.feeder},
                      {"lambda", r.config.lambda},
                      {"init", r.config.init},
                      {"tol", r.config.tol},
                      {"max_iters", r.config.max_iters}};
    root["status"] = std::string(to_string(r.status));
    root["converged"] = r.status == SolveStatus::converged;
    root["iterations"] = r.iterations;
    root["non_contracting_tail"] = r.non_contracting_tail;
    root["residual"] = number_or_null(r.residual);
    root["final_diff"] = number_or_null(r.final_diff);
    root["empirical_rate"] = number_or_null(r.empirical_rate);
    root["message"] = r.message;
    Json voltages = Json::array();
    for (auto const& e : r.voltages) {
        voltages.push_back({{"node", e.node},
                            {"phase", std::string(1, to_char(e.phase))},
                            {"v", Json::array({e.value.real(), e.value.imag()})}});
    }
    root["voltages"] = std::move(voltages);
    Json diffs = Json::array();
    for (double d : r.diffs) diffs.push_back(number_or_null(d));
    root["diffs"] = std::move(diffs);
    return root.dump(2) + "\n";
}

SolveReport parse_solve_report(std::string_view text) {
    Json const root = parse_document(text);
    SolveReport r;
    Json const& config = at(root, "config");
    r.config.feeder = as_string(at(config, "feeder"), "config.feeder");
    r.config.lambda = as_string(at(config, "lambda"), "config.lambda");
    r.config.init = as_string(at(config, "init"), "config.init");
    r.config.tol = as_number(at(config, "tol"), "config.tol");
    r.config.max_iters = as_count(at(config, "max_iters"), "config.max_iters");
    r.status = parse_status(as_string(at(root, "status"), "status"));
    if (as_bool(at(root, "converged"), "converged") != (r.status == SolveStatus::converged)) {
        throw InputError("report: 'converged' disagrees with 'status'");
    }
    r.iterations = as_count(at(root, "iterations"), "iterations");
    r.non_contracting_tail = as_bool(at(root, "non_contracting_tail"), "non_contracting_tail");
    r.residual = as_optional_number(at(root, "residual"), "residual");
    r.final_diff = as_optional_number(at(root, "final_diff"), "final_diff");
    r.empirical_rate = as_optional_number(at(root, "empirical_rate"), "empirical_rate");
    r.message = as_string(at(root, "message"), "message");
    for (Json const& e : as_array(at(root, "voltages"), "voltages")) {
        VoltageEntry entry;
        entry.node = as_string(at(e, "node"), "voltages.node");
        auto const phase = parse_phase(as_string(at(e, "phase"), "voltages.phase"));
        if (!phase) throw InputError("report: invalid phase in voltages");
        entry.phase = *phase;
        Json const& v = at(e, "v");
        if (!v.is_array() || v.size() != 2) throw InputError("report: voltage must be [re, im]");
        entry.value = {as_number(v[0], "voltages.v"), as_number(v[1], "voltages.v")};
        r.voltages.push_back(std::move(entry));
    }
    for (Json const& d : as_array(at(root, "diffs"), "diffs")) {
        r.diffs.push_back(as_optional_number(d, "diffs").value_or(std::numeric_limits<double>::quiet_NaN()));
    }
    return r;
}

std::string trace_csv(SolveTrace const& trace) {
    std::ostringstream out;
    out << "t,diff_inf_norm,empirical_ratio,max_abs_voltage\n";
    for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
        std::optional<double> diff;
        std::optional<double> ratio;
        if (t >= 1 && t - 1 < trace.diffs.size()) diff = trace.diffs[t - 1];
        if (t >= 2 && t - 2 < trace.ratios.size()) ratio = trace.ratios[t - 2];
        double max_abs = 0.0;
        for (Complex z : trace.iterates[t]) max_abs = std::max(max_abs, std::abs(z));
        out << t << ',' << cell(diff) << ',' << cell(ratio) << ',' << format_double(max_abs) << '\n';
    }
    return out.str();
}

ScaleRange parse_scale_range(std::string_view text) {
    auto const first = text.find(':');
    auto const second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        throw InputError("scale range must look like start:stop:step, got '" + std::string(text) + "'");
    }
    ScaleRange r{parse_double(text.substr(0, first), "scale start"),
                 parse_double(text.substr(first + 1, second - first - 1), "scale stop"),
                 parse_double(text.substr(second + 1), "scale step")};
    if (!std::isfinite(r.start) || !std::isfinite(r.stop) || !std::isfinite(r.step)) {
        throw InputError("scale range must be finite");
    }
    if (r.step <= 0.0) throw InputError("scale step must be positive");
    if (r.stop < r.start) throw InputError("scale stop must not be below start");
    return r;
}

std::vector<double> expand(ScaleRange const& range) {
    double const span = range.stop - range.start;
    auto const count =
        static_cast<std::size_t>(std::floor(span / range.step * (1.0 + 1e-9) + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        double const x = range.start + static_cast<double>(k) * range.step;
        out.push_back(std::round(x * 1e12) / 1e12);
    }
    return out;
}

std::vector<SweepRow> run_sweep(Feeder const& feeder, std::span<double const> scales, LambdaChoice const& lambda,
                                SolveConfig const& solve_config, RegionOptions const& region) {
    SystemMatrices const system = assemble_system(feeder.network, feeder.loads);
    CVector const lambda_diag = lambda.resolve(system);
    std::vector<SweepRow> rows;
    rows.reserve(scales.size());
    for (double scale : scales) {
        LoadSet const loads = feeder.loads.scaled(scale);
        SweepRow row;
        row.scale = scale;
        try {
            CertificateResult const cert = certify(feeder.network, loads, system, lambda, region);
            row.feasible = cert.feasible;
            if (cert.feasible) {
                row.r_min = cert.r_min;
                row.r_max = cert.r_max;
                row.alpha_at_rmin = cert.alpha_at_rmin;
            }
        } catch (CertificateUndefinedError const&) {
            row.feasible = false;
        }
        SolveTrace const trace = solve(feeder.network, loads, system, solve_config);
        row.status = trace.status;
        row.iterations = trace.iterations();
        if (trace.iterates.size() >= 3) row.empirical_rate = empirical_rate(trace, lambda_diag);
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(std::span<SweepRow const> rows) {
    std::ostringstream out;
    out << "scale,feasible,r_min,r_max,alpha_at_rmin,solve_status,iters,empirical_rate\n";
    for (SweepRow const& row : rows) {
        out << format_double(row.scale) << ',' << (row.feasible ? "true" : "false") << ',' << cell(row.r_min) << ','
            << cell(row.r_max) << ',' << cell(row.alpha_at_rmin) << ',' << to_string(row.status) << ','
            << row.iterations << ',' << cell(row.empirical_rate) << '\n';
    }
    return out.str();
}

}  // namespace zbus
