#pragma once

#include <cstdint>
#include <vector>

#include <array>
#include <optional>

#include "zbus/feeder.hpp"
#include "zbus/linalg.hpp"

namespace zbus {

/// Slack connected to one three-phase wye node through a decoupled line
/// of real admittance y_t; identical real ZIP loads on every phase.
struct TwoNodeParams {
    double y_t = 0.5;
    double y_l = 0.5;
    double i_l = 0.5;
    double s_l = -0.5;
};

Feeder two_node(TwoNodeParams const& params);

/// Real roots of (y_t + y_L) v^2 + (i_L - y_t) v + s_L = 0, ascending.
/// These are the phase-a voltages of balanced real solutions with v >= 0
/// once negative roots are discarded.
std::vector<double> two_node_real_roots(TwoNodeParams const& params);

/// Largest nonnegative root, if any.
std::optional<double> two_node_nonnegative_solution(TwoNodeParams const& params);

/// Slack - node 1 - node 2 chain with coupled three-phase lines and
/// θ-scaled constant-power wye loads on both non-slack nodes.
struct ThreeNodeParams {
    double theta = 0.1;
};

/// Throws InputError unless 0 < θ <= 1.
Feeder three_node(ThreeNodeParams const& params);

/// Series admittance of the slack-to-node-1 branch.
CMatrix three_node_slack_branch();
/// Series admittance of the node-1-to-node-2 branch.
CMatrix three_node_lateral_branch();
/// Unscaled constant-power loads of nodes 1 and 2, phases a, b, c.
std::array<Complex, 3> three_node_load(int node);

/// Weighted sum of every three-node constant; pins the transcription.
double three_node_fixture_checksum();

struct RandomNetworkParams {
    std::uint64_t seed = 1;
    std::size_t node_count = 3;  // non-slack nodes, at most 5
    double delta_fraction = 0.0;
    double max_load = 0.05;
};

/// Deterministic random radial network with diagonally dominant branch
/// blocks and small ZIP loads. Throws InputError for node_count outside [1, 5].
Feeder random_small_network(RandomNetworkParams const& params);

}  // namespace zbus
