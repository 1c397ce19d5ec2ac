#pragma once

#include <optional>

#include "zbus/loads.hpp"
#include "zbus/network.hpp"

namespace zbus {

/// Base quantities carried through feeder files; never used in computation.
struct FeederBase {
    double s_base_va = 0.0;
    double v_base_v = 0.0;

    friend bool operator==(FeederBase const&, FeederBase const&) = default;
};

/// A network together with its validated loads.
struct Feeder {
    NetworkModel network;
    LoadSet loads;
    std::optional<FeederBase> base;
};

}  // namespace zbus
