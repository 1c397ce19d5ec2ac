#include "zbus/system.hpp"

#include "zbus/errors.hpp"

namespace zbus {

namespace {

// Global row/column of (node, phase) in the stacked [non-slack; slack] ordering.
struct Slot {
    bool slack = false;
    std::size_t index = 0;
};

Slot slot_of(NetworkModel const& network, std::size_t node, Phase phase) {
    if (node == network.slack_node()) return {true, phase_position(phase)};
    return {false, network.index().lin(node, phase)};
}

void accumulate(BusAdmittance& blocks, Slot row, Slot col, Complex value) {
    if (!row.slack && !col.slack) {
        blocks.y(row.index, col.index) += value;
    } else if (!row.slack && col.slack) {
        blocks.y_ns(row.index, col.index) += value;
    } else if (row.slack && !col.slack) {
        blocks.y_sn(row.index, col.index) += value;
    } else {
        blocks.y_ss(row.index, col.index) += value;
    }
}

}  // namespace

BusAdmittance assemble_bus_admittance(NetworkModel const& network) {
    std::size_t const size = network.index().size();
    BusAdmittance blocks{CMatrix(size, size), CMatrix(size, 3), CMatrix(3, size), CMatrix(3, 3)};

    for (BranchSpec const& branch : network.branches()) {
        std::size_t const from = *network.find_node(branch.from);
        std::size_t const to = *network.find_node(branch.to);
        std::size_t const dim = branch.phases.size();
        for (std::size_t p = 0; p < dim; ++p) {
            Slot const from_p = slot_of(network, from, branch.phases[p]);
            Slot const to_p = slot_of(network, to, branch.phases[p]);
            for (std::size_t q = 0; q < dim; ++q) {
                Slot const from_q = slot_of(network, from, branch.phases[q]);
                Slot const to_q = slot_of(network, to, branch.phases[q]);
                Complex const y = branch.series(p, q);
                accumulate(blocks, from_p, from_q, y);
                accumulate(blocks, to_p, to_q, y);
                accumulate(blocks, from_p, to_q, -y);
                accumulate(blocks, to_p, from_q, -y);
                if (!branch.shunt_from.empty()) accumulate(blocks, from_p, from_q, branch.shunt_from(p, q));
                if (!branch.shunt_to.empty()) accumulate(blocks, to_p, to_q, branch.shunt_to(p, q));
            }
        }
    }

    for (std::size_t n = 0; n < network.nodes().size(); ++n) {
        NodeSpec const& node = network.node(n);
        for (std::size_t p = 0; p < node.shunt.size(); ++p) {
            Slot const s = slot_of(network, n, node.phases[p]);
            accumulate(blocks, s, s, node.shunt[p]);
        }
    }
    return blocks;
}

SystemMatrices compute_fixed_point_data(BusAdmittance blocks, CMatrix y_load, std::array<Complex, 3> v_slack) {
    SystemMatrices system;
    system.v_slack = v_slack;
    CMatrix augmented = blocks.y + y_load;
    try {
        system.z = inverse(augmented);
    } catch (SingularMatrixError const& e) {
        throw IllPosedNetworkError(
            std::string("Y + Y_L is singular (") + e.what() +
            "); check for isolated or unloaded delta-connected subnetworks and consider a small shunt "
            "admittance to ground");
    }
    CVector const injected = blocks.y_ns * std::span<Complex const>(v_slack);
    system.w = system.z * injected;
    for (auto& x : system.w) x = -x;
    system.blocks = std::move(blocks);
    system.y_load = std::move(y_load);
    return system;
}

SystemMatrices assemble_system(NetworkModel const& network, LoadSet const& loads) {
    if (loads.size() != network.index().size()) throw InputError("load set does not match the network");
    return compute_fixed_point_data(assemble_bus_admittance(network), assemble_load_admittance(network, loads),
                                    network.slack_voltage());
}

CVector slack_injection(SystemMatrices const& system, std::span<Complex const> v) {
    return add(system.blocks.y_sn * v, system.blocks.y_ss * std::span<Complex const>(system.v_slack));
}

CVector network_current(SystemMatrices const& system, std::span<Complex const> v) {
    return add(system.blocks.y * v, system.blocks.y_ns * std::span<Complex const>(system.v_slack));
}

}  // namespace zbus
