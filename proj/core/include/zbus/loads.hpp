#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zbus/linalg.hpp"
#include "zbus/network.hpp"

namespace zbus {

/// Nominal constant-power, constant-current and constant-impedance parts of a load.
struct ZipLoad {
    Complex power{};
    Complex current{};
    Complex admittance{};

    bool empty() const noexcept { return *this == ZipLoad{}; }
    /// True when the load has a power or current part (the parts that make the map nonlinear).
    bool nonlinear() const noexcept { return power != Complex{} || current != Complex{}; }
    ZipLoad scaled(double factor) const { return {power * factor, current * factor, admittance}; }

    friend bool operator==(ZipLoad const&, ZipLoad const&) = default;
};

struct WyeLoadEntry {
    std::string node;
    Phase phase = Phase::a;
    ZipLoad zip;
};

struct DeltaLoadEntry {
    std::string node;
    Phase first = Phase::a;
    Phase second = Phase::b;
    ZipLoad zip;
};

/// Magnitude below which a voltage (or line-to-line voltage) feeding a
/// power or current load is treated as zero.
inline constexpr double kSingularVoltageThreshold = 1e-12;

/// Injection currents split by load type. Each vector has one entry per
/// phase of the evaluated node (or per linear index for whole networks).
struct InjectionParts {
    CVector power;
    CVector current;
    CVector impedance;

    CVector total() const;
    /// power + current, the part that stays outside Y_L.
    CVector nonlinear() const;
};

/// Load data for the three delta phase pairs of one node, keyed by the
/// leading phase of the pair: [a] = {a,b}, [b] = {b,c}, [c] = {c,a}.
using DeltaPairLoads = std::array<ZipLoad, 3>;

/// Key into DeltaPairLoads for the unordered pair {first, second}.
Phase delta_pair_key(Phase first, Phase second);

/// Wye ZIP injections at one node; `zips` is aligned with node.phases.
/// Throws SingularVoltageError.
InjectionParts wye_injection(NodeSpec const& node, std::span<Complex const> v_node,
                             std::span<ZipLoad const> zips);

/// Delta ZIP injections at one node, summing every incident phase pair.
/// Throws SingularVoltageError.
InjectionParts delta_injection(NodeSpec const& node, std::span<Complex const> v_node,
                               DeltaPairLoads const& pairs);

/// ZIP loads validated against a network.
class LoadSet {
  public:
    LoadSet() = default;

    /// Throws InputError on unknown nodes, unavailable phases, wrong
    /// connection kind, loads on the slack, or contradictory duplicates.
    static LoadSet create(NetworkModel const& network, std::span<WyeLoadEntry const> wye,
                          std::span<DeltaLoadEntry const> delta);
    static LoadSet none(NetworkModel const& network) { return create(network, {}, {}); }

    std::size_t size() const noexcept { return wye_by_index_.size(); }

    /// Wye load at linear index j (empty for delta indices).
    ZipLoad const& wye(std::size_t j) const { return wye_by_index_.at(j); }
    /// Pair loads of node n (all empty for wye nodes).
    DeltaPairLoads const& delta(std::size_t node) const { return delta_by_node_.at(node); }

    std::span<WyeLoadEntry const> wye_entries() const noexcept { return wye_entries_; }
    std::span<DeltaLoadEntry const> delta_entries() const noexcept { return delta_entries_; }

    bool has_nonlinear() const noexcept;
    bool has_nonlinear_delta() const noexcept;

    /// Copy with every power and current part multiplied by `factor`.
    LoadSet scaled(double factor) const;

  private:
    std::vector<ZipLoad> wye_by_index_;
    std::vector<DeltaPairLoads> delta_by_node_;
    std::vector<WyeLoadEntry> wye_entries_;
    std::vector<DeltaLoadEntry> delta_entries_;
};

/// Per-index aliases s_L^k, i_L^k and the delta selector e_k.
struct IndexedLoads {
    CVector power;
    CVector current;
    /// Set for delta indices only.
    std::vector<std::optional<DeltaPairing>> pairing;
};

IndexedLoads index_loads(NetworkModel const& network, LoadSet const& loads);

/// Direct evaluation of every ZIP injection at the full voltage vector.
/// Throws SingularVoltageError.
InjectionParts evaluate_injections(NetworkModel const& network, LoadSet const& loads,
                                   std::span<Complex const> v);

/// Constant-impedance matrix Y_L with i_Z(v) = -Y_L·v.
CMatrix assemble_load_admittance(NetworkModel const& network, LoadSet const& loads);

}  // namespace zbus
