#pragma once

#include <array>

#include "zbus/linalg.hpp"
#include "zbus/loads.hpp"
#include "zbus/network.hpp"

namespace zbus {

/// Partitioned bus admittance: non-slack block Y (J×J), couplings
/// Y_NS (J×3) and Y_SN (3×J), and the slack block Y_SS (3×3).
struct BusAdmittance {
    CMatrix y;
    CMatrix y_ns;
    CMatrix y_sn;
    CMatrix y_ss;
};

/// Nodal assembly of branch series and shunt blocks plus node shunts.
BusAdmittance assemble_bus_admittance(NetworkModel const& network);

/// Everything the fixed-point iteration and the certificate share.
struct SystemMatrices {
    BusAdmittance blocks;
    CMatrix y_load;
    /// (Y + Y_L)^{-1}
    CMatrix z;
    /// No-load voltage -Z·Y_NS·v_S.
    CVector w;
    std::array<Complex, 3> v_slack{};

    std::size_t size() const noexcept { return w.size(); }
};

/// Throws IllPosedNetworkError when Y + Y_L is singular.
SystemMatrices compute_fixed_point_data(BusAdmittance blocks, CMatrix y_load, std::array<Complex, 3> v_slack);

/// Full pipeline: bus admittance, load admittance, Z and w.
SystemMatrices assemble_system(NetworkModel const& network, LoadSet const& loads);

/// Slack current injection i_S = Y_SN·v + Y_SS·v_S.
CVector slack_injection(SystemMatrices const& system, std::span<Complex const> v);

/// Network-side current Y·v + Y_NS·v_S at the non-slack nodes.
CVector network_current(SystemMatrices const& system, std::span<Complex const> v);

}  // namespace zbus
