#include "zbus_cli/cli.hpp"

#include <fstream>
#include <functional>
#include <optional>

#include "CLI11.hpp"
#include "zbus/certificate.hpp"
#include "zbus/errors.hpp"
#include "zbus/feeder_io.hpp"
#include "zbus/reference_networks.hpp"
#include "zbus/reports.hpp"
#include "zbus/solver.hpp"

namespace zbus::cli {

namespace {

constexpr std::string_view kFilePrefix = "file:";

std::optional<std::string> file_argument(std::string const& value) {
    if (value.rfind(kFilePrefix, 0) != 0) return std::nullopt;
    std::string path = value.substr(kFilePrefix.size());
    if (path.empty()) throw InputError("empty path after 'file:'");
    return path;
}

LambdaChoice parse_lambda(std::string const& value) {
    if (value == "identity") return LambdaChoice::identity();
    if (value == "diag-w") return LambdaChoice::diag_w();
    if (auto path = file_argument(value)) return LambdaChoice::custom(parse_complex_vector_file(*path));
    throw InputError("--lambda must be identity, diag-w or file:<path>, got '" + value + "'");
}

void apply_init(std::string const& value, SolveConfig& cfg) {
    if (value == "no-load") {
        cfg.init = InitialVoltage::no_load;
    } else if (value == "flat") {
        cfg.init = InitialVoltage::flat;
    } else if (auto path = file_argument(value)) {
        cfg.init = InitialVoltage::custom;
        cfg.custom_initial = parse_complex_vector_file(*path);
    } else {
        throw InputError("--init must be no-load, flat or file:<path>, got '" + value + "'");
    }
}

void write_file(std::string const& path, std::string const& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot write '" + path + "'");
    file << content;
    if (!file) throw InputError("failed writing '" + path + "'");
}

struct SolveOptions {
    std::string feeder;
    std::string lambda = "identity";
    std::string init = "no-load";
    double tol = 1e-10;
    std::size_t max_iters = 100;
    std::string trace;
    std::string out;
};

struct CertifyOptions {
    std::string feeder;
    std::string lambda = "identity";
    std::string out;
    std::size_t curve_samples = 200;
};

struct SweepOptions {
    std::string feeder;
    std::string scale;
    std::string lambda = "identity";
    std::string init = "no-load";
    double tol = 1e-10;
    std::size_t max_iters = 100;
    std::string out;
};

int cmd_solve(SolveOptions const& o, std::ostream& out) {
    Feeder const feeder = parse_feeder_file(o.feeder);
    SolveConfig cfg;
    cfg.tol = o.tol;
    cfg.max_iters = o.max_iters;
    apply_init(o.init, cfg);
    cfg.validate();
    LambdaChoice const lambda = parse_lambda(o.lambda);

    SystemMatrices const system = assemble_system(feeder.network, feeder.loads);
    CVector const lambda_diag = lambda.resolve(system);
    SolveTrace const trace = solve(feeder.network, feeder.loads, system, cfg);

    std::optional<double> rate;
    if (trace.iterates.size() >= 3) rate = empirical_rate(trace, lambda_diag);
    SolveReport const report =
        make_solve_report(feeder.network, trace, {o.feeder, lambda.describe(), o.init, o.tol, o.max_iters}, rate);

    if (!o.trace.empty()) write_file(o.trace, trace_csv(trace));
    std::string const json = emit_solve_report(report);
    if (o.out.empty()) {
        out << json;
    } else {
        write_file(o.out, json);
        out << to_string(trace.status) << " after " << trace.iterations() << " iterations";
        if (report.non_contracting_tail) out << " (non-contracting tail)";
        out << '\n';
    }
    return trace.status == SolveStatus::converged ? kOk : kNotConverged;
}

int cmd_certify(CertifyOptions const& o, std::ostream& out) {
    Feeder const feeder = parse_feeder_file(o.feeder);
    LambdaChoice const lambda = parse_lambda(o.lambda);
    RegionOptions region;
    region.curve_samples = o.curve_samples;
    CertificateResult const result = certify(feeder.network, feeder.loads, lambda, region);
    std::string const json = emit_cert_report(make_cert_report(result, {o.feeder, lambda.describe(), o.curve_samples}));
    if (o.out.empty()) {
        out << json;
    } else {
        write_file(o.out, json);
        if (result.feasible) {
            out << "feasible: R in [" << format_double(result.r_min) << ", " << format_double(result.r_max)
                << "], alpha(r_min) = " << format_double(result.alpha_at_rmin) << '\n';
        } else {
            out << "infeasible\n";
        }
    }
    return result.feasible ? kOk : kInfeasible;
}

int cmd_sweep(SweepOptions const& o, std::ostream& out) {
    auto const scales = expand(parse_scale_range(o.scale));
    Feeder const feeder = parse_feeder_file(o.feeder);
    SolveConfig cfg;
    cfg.tol = o.tol;
    cfg.max_iters = o.max_iters;
    apply_init(o.init, cfg);
    cfg.validate();
    auto const rows = run_sweep(feeder, scales, parse_lambda(o.lambda), cfg);
    std::string const csv = sweep_csv(rows);
    if (o.out.empty()) out << csv;
    else write_file(o.out, csv);
    return kOk;
}

}  // namespace

int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Z-Bus load flow with contraction certificates for three-phase networks", "zbuscert"};
    app.require_subcommand(1);
    std::function<int()> action;

    SolveOptions solve_opts;
    auto* solve_cmd = app.add_subcommand("solve", "Run the Z-Bus iteration on a feeder");
    solve_cmd->add_option("feeder", solve_opts.feeder, "Feeder JSON file")->required();
    solve_cmd->add_option("--lambda", solve_opts.lambda, "identity | diag-w | file:<path>")->capture_default_str();
    solve_cmd->add_option("--init", solve_opts.init, "no-load | flat | file:<path>")->capture_default_str();
    solve_cmd->add_option("--tol", solve_opts.tol, "Step tolerance")->capture_default_str();
    solve_cmd->add_option("--max-iters", solve_opts.max_iters, "Iteration limit")->capture_default_str();
    solve_cmd->add_option("--trace", solve_opts.trace, "Write the per-iteration CSV trace here");
    solve_cmd->add_option("--out", solve_opts.out, "Write the JSON report here instead of stdout");
    solve_cmd->callback([&] { action = [&] { return cmd_solve(solve_opts, out); }; });

    CertifyOptions cert_opts;
    auto* cert_cmd = app.add_subcommand("certify", "Compute the guaranteed-convergence radius interval");
    cert_cmd->add_option("feeder", cert_opts.feeder, "Feeder JSON file")->required();
    cert_cmd->add_option("--lambda", cert_opts.lambda, "identity | diag-w | file:<path>")->capture_default_str();
    cert_cmd->add_option("--out", cert_opts.out, "Write the JSON report here instead of stdout");
    cert_cmd->add_option("--curve-samples", cert_opts.curve_samples, "Points on the alpha(R) curve")
        ->capture_default_str();
    cert_cmd->callback([&] { action = [&] { return cmd_certify(cert_opts, out); }; });

    SweepOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "Certify and solve across load scalings");
    sweep_cmd->add_option("feeder", sweep_opts.feeder, "Feeder JSON file")->required();
    sweep_cmd->add_option("--scale", sweep_opts.scale, "start:stop:step, inclusive")->required();
    sweep_cmd->add_option("--lambda", sweep_opts.lambda, "identity | diag-w | file:<path>")->capture_default_str();
    sweep_cmd->add_option("--init", sweep_opts.init, "no-load | flat | file:<path>")->capture_default_str();
    sweep_cmd->add_option("--tol", sweep_opts.tol, "Step tolerance")->capture_default_str();
    sweep_cmd->add_option("--max-iters", sweep_opts.max_iters, "Iteration limit")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_opts.out, "Write the CSV here instead of stdout");
    sweep_cmd->callback([&] { action = [&] { return cmd_sweep(sweep_opts, out); }; });

    auto* example_cmd = app.add_subcommand("example", "Print a built-in reference feeder");
    example_cmd->require_subcommand(1);
    TwoNodeParams two;
    auto* two_cmd = example_cmd->add_subcommand("two-node", "Slack plus one decoupled three-phase node");
    two_cmd->add_option("--s-l", two.s_l, "Constant-power load per phase")->capture_default_str();
    two_cmd->add_option("--y-t", two.y_t, "Line admittance")->capture_default_str();
    two_cmd->add_option("--y-l", two.y_l, "Constant-impedance load")->capture_default_str();
    two_cmd->add_option("--i-l", two.i_l, "Constant-current load")->capture_default_str();
    two_cmd->callback([&] { action = [&] { out << emit_feeder(two_node(two)); return int{kOk}; }; });
    ThreeNodeParams three;
    auto* three_cmd = example_cmd->add_subcommand("three-node", "Three-node chain with scaled constant-power loads");
    three_cmd->add_option("--theta", three.theta, "Load scaling in (0, 1]")->capture_default_str();
    three_cmd->callback([&] { action = [&] { out << emit_feeder(three_node(three)); return int{kOk}; }; });

    std::vector<std::string> argv_storage{"zbuscert"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char const*> argv;
    for (auto const& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        return action();
    } catch (Error const& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

}  // namespace zbus::cli
