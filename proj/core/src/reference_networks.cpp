#include "zbus/reference_networks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "zbus/errors.hpp"

namespace zbus {

namespace {

// Three-node constants, per unit.
constexpr double kSlackBranch[3][3][2] = {
    {{0.077, -5.33}, {0.01, -0.09}, {0.02, -0.08}},
    {{0.01, -0.09}, {0.087, -8.0}, {0.03, -0.07}},
    {{0.02, -0.08}, {0.03, -0.07}, {0.07, -1.5}},
};
constexpr double kLateralBranch[3][3][2] = {
    {{0.056, -8.66}, {0.0, 0.0}, {0.02, -0.07}},
    {{0.0, 0.0}, {0.02, -4.8}, {0.03, -0.05}},
    {{0.02, -0.07}, {0.03, -0.05}, {0.03, -3.8}},
};
constexpr double kLoads[2][3][2] = {
    {{0.7, 1.5}, {0.8, 1.5}, {0.8, 2.5}},
    {{0.6, 2.5}, {0.6, 0.5}, {0.3, 0.5}},
};

CMatrix to_matrix(double const (&table)[3][3][2]) {
    CMatrix m(3, 3);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = Complex{table[r][c][0], table[r][c][1]};
    }
    return m;
}

NodeSpec slack_node() { return {"S", NodeKind::slack, {Phase::a, Phase::b, Phase::c}, {}}; }

}  // namespace

Feeder two_node(TwoNodeParams const& p) {
    std::vector<NodeSpec> nodes{slack_node(), {"1", NodeKind::wye, {Phase::a, Phase::b, Phase::c}, {}}};
    CMatrix series = CMatrix::identity(3);
    series *= p.y_t;
    std::vector<BranchSpec> branches{{"S", "1", {Phase::a, Phase::b, Phase::c}, series, {}, {}}};
    NetworkModel network = NetworkModel::create(std::move(nodes), std::move(branches));

    std::vector<WyeLoadEntry> wye;
    for (Phase phase : kAllPhases) wye.push_back({"1", phase, ZipLoad{p.s_l, p.i_l, p.y_l}});
    LoadSet loads = LoadSet::create(network, wye, {});
    return {std::move(network), std::move(loads), {}};
}

std::vector<double> two_node_real_roots(TwoNodeParams const& p) {
    double const a = p.y_t + p.y_l;
    double const b = p.i_l - p.y_t;
    double const c = p.s_l;
    if (a == 0.0) {
        if (b == 0.0) return {};
        return {-c / b};
    }
    double const disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {};
    double const root = std::sqrt(disc);
    std::vector<double> out{(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)};
    if (disc == 0.0) out.pop_back();
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<double> two_node_nonnegative_solution(TwoNodeParams const& p) {
    auto const roots = two_node_real_roots(p);
    std::optional<double> best;
    for (double r : roots) {
        if (r >= 0.0 && (!best || r > *best)) best = r;
    }
    return best;
}

CMatrix three_node_slack_branch() { return to_matrix(kSlackBranch); }
CMatrix three_node_lateral_branch() { return to_matrix(kLateralBranch); }

std::array<Complex, 3> three_node_load(int node) {
    if (node != 1 && node != 2) throw InputError("three-node loads exist for nodes 1 and 2 only");
    auto const& row = kLoads[node - 1];
    return {Complex{row[0][0], row[0][1]}, Complex{row[1][0], row[1][1]}, Complex{row[2][0], row[2][1]}};
}

double three_node_fixture_checksum() {
    double sum = 0.0;
    double weight = 1.0;
    auto fold = [&](double x) {
        sum += weight * x;
        weight += 1.0;
    };
    for (auto const& row : kSlackBranch)
        for (auto const& e : row) { fold(e[0]); fold(e[1]); }
    for (auto const& row : kLateralBranch)
        for (auto const& e : row) { fold(e[0]); fold(e[1]); }
    for (auto const& row : kLoads)
        for (auto const& e : row) { fold(e[0]); fold(e[1]); }
    return sum;
}

Feeder three_node(ThreeNodeParams const& params) {
    if (!(params.theta > 0.0 && params.theta <= 1.0)) {
        throw InputError("three-node theta must lie in (0, 1], got " + std::to_string(params.theta));
    }
    std::vector<Phase> const abc{Phase::a, Phase::b, Phase::c};
    std::vector<NodeSpec> nodes{slack_node(), {"1", NodeKind::wye, abc, {}}, {"2", NodeKind::wye, abc, {}}};
    std::vector<BranchSpec> branches{
        {"1", "S", abc, three_node_slack_branch(), {}, {}},
        {"1", "2", abc, three_node_lateral_branch(), {}, {}},
    };
    NetworkModel network = NetworkModel::create(std::move(nodes), std::move(branches));

    std::vector<WyeLoadEntry> wye;
    for (int n = 1; n <= 2; ++n) {
        auto const s = three_node_load(n);
        for (Phase phase : kAllPhases) {
            wye.push_back({std::to_string(n), phase, ZipLoad{params.theta * s[phase_position(phase)], {}, {}}});
        }
    }
    LoadSet loads = LoadSet::create(network, wye, {});
    return {std::move(network), std::move(loads), {}};
}

Feeder random_small_network(RandomNetworkParams const& params) {
    if (params.node_count < 1 || params.node_count > 5) {
        throw InputError("random_small_network supports 1 to 5 non-slack nodes");
    }
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    auto random_complex = [&](double max_mag) { return std::polar(max_mag * unit(rng), uniform(-M_PI, M_PI)); };

    std::vector<NodeSpec> nodes{slack_node()};
    std::vector<BranchSpec> branches;
    std::vector<WyeLoadEntry> wye_loads;
    std::vector<DeltaLoadEntry> delta_loads;

    for (std::size_t i = 1; i <= params.node_count; ++i) {
        bool const want_delta = unit(rng) < params.delta_fraction;
        std::vector<std::size_t> parents;
        for (std::size_t p = 0; p < nodes.size(); ++p) {
            if (!want_delta || nodes[p].phases.size() >= 2) parents.push_back(p);
        }
        NodeSpec const& parent = nodes[parents[static_cast<std::size_t>(unit(rng) * parents.size()) % parents.size()]];

        // child phases are a random subset of the parent's so every phase stays energized
        std::vector<Phase> phases = parent.phases;
        std::size_t const min_count = want_delta ? 2 : 1;
        std::size_t const count =
            min_count + static_cast<std::size_t>(unit(rng) * (phases.size() - min_count + 1)) % (phases.size() - min_count + 1);
        std::shuffle(phases.begin(), phases.end(), rng);
        phases.resize(count);
        std::sort(phases.begin(), phases.end());

        NodeSpec node{std::to_string(i), want_delta ? NodeKind::delta : NodeKind::wye, phases, {}};

        std::size_t const dim = phases.size();
        CMatrix series(dim, dim);
        for (std::size_t r = 0; r < dim; ++r) {
            series(r, r) = Complex{uniform(1.0, 3.0), -uniform(5.0, 15.0)};
            for (std::size_t c = r + 1; c < dim; ++c) {
                Complex const coupling{uniform(0.0, 0.05), -uniform(0.0, 0.1)};
                series(r, c) = coupling;
                series(c, r) = coupling;
            }
        }
        branches.push_back({parent.id, node.id, phases, series, {}, {}});

        double const m = params.max_load;
        if (node.kind == NodeKind::wye) {
            for (Phase phase : phases) {
                wye_loads.push_back({node.id, phase, ZipLoad{random_complex(m), random_complex(m), random_complex(m)}});
            }
        } else {
            for (std::size_t a = 0; a < dim; ++a) {
                for (std::size_t b = a + 1; b < dim; ++b) {
                    delta_loads.push_back(
                        {node.id, phases[a], phases[b], ZipLoad{random_complex(m), random_complex(m), random_complex(m)}});
                }
            }
        }
        nodes.push_back(std::move(node));
    }

    NetworkModel network = NetworkModel::create(std::move(nodes), std::move(branches));
    LoadSet loads = LoadSet::create(network, wye_loads, delta_loads);
    return {std::move(network), std::move(loads), {}};
}

}  // namespace zbus
