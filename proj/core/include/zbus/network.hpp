#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "zbus/linalg.hpp"
#include "zbus/phase.hpp"

namespace zbus {

enum class NodeKind { wye, delta, slack };

std::string_view to_string(NodeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;

struct NodeSpec {
    std::string id;
    NodeKind kind = NodeKind::wye;
    /// Available phases; normalized to a < b < c on construction of the model.
    std::vector<Phase> phases;
    /// Optional per-phase admittance to ground, aligned with `phases`.
    CVector shunt;
};

struct BranchSpec {
    std::string from;
    std::string to;
    /// Phases carried by the branch; must be available at both endpoints.
    std::vector<Phase> phases;
    /// Series admittance block over `phases` (per unit).
    CMatrix series;
    /// Optional shunt blocks over `phases`, added at each endpoint.
    CMatrix shunt_from;
    CMatrix shunt_to;
};

/// Signed incidence vector e^{φφ'} over the phases of one node, so that
/// apply(v_n) = v_n^φ - v_n^φ'.
class LineToLineSelector {
  public:
    LineToLineSelector() = default;
    LineToLineSelector(std::size_t length, std::size_t plus, std::size_t minus);

    std::size_t length() const noexcept { return length_; }
    std::size_t plus() const noexcept { return plus_; }
    std::size_t minus() const noexcept { return minus_; }

    Complex apply(std::span<Complex const> v_node) const;
    std::vector<int> coefficients() const;
    LineToLineSelector reversed() const { return {length_, minus_, plus_}; }
    static constexpr double one_norm() noexcept { return 2.0; }

  private:
    std::size_t length_ = 0;
    std::size_t plus_ = 0;
    std::size_t minus_ = 0;
};

/// Role of one delta phase in the certificate bookkeeping.
///
/// A phase is paired when its right shift is also available; it then
/// carries the pair (φ, r(φ)). A two-phase delta node has exactly one
/// unpaired phase, whose selector spans the single other phase.
struct DeltaPairing {
    Phase phase = Phase::a;
    Phase partner = Phase::a;
    bool paired = false;
    LineToLineSelector selector;
};

/// Throws InputError when the node is not delta or φ is unavailable.
DeltaPairing delta_pairing(NodeSpec const& node, Phase phase);

/// Linear indexing of (node, phase) pairs over the non-slack nodes.
///
/// Indices are zero-based and follow node declaration order, then
/// a < b < c within a node.
class IndexMap {
  public:
    static IndexMap build(std::span<NodeSpec const> nodes);

    std::size_t size() const noexcept { return node_of_.size(); }
    std::size_t node_count() const noexcept { return node_indices_.size(); }

    /// Throws InputError when (node, phase) is unavailable or the node is the slack.
    std::size_t lin(std::size_t node, Phase phase) const;
    std::optional<std::size_t> find(std::size_t node, Phase phase) const;

    std::size_t node_of(std::size_t j) const { return node_of_.at(j); }
    Phase phase_of(std::size_t j) const { return phase_of_.at(j); }
    /// Position of j inside its node's phase list.
    std::size_t position_in_node(std::size_t j) const { return position_.at(j); }

    std::span<std::size_t const> indices_of(std::size_t node) const { return node_indices_.at(node); }

    std::span<std::size_t const> wye_indices() const noexcept { return wye_; }
    std::span<std::size_t const> delta_indices() const noexcept { return delta_; }
    bool is_delta(std::size_t j) const { return delta_order_.at(j).has_value(); }
    /// Order of j within the delta indices (l_k); nullopt for wye indices.
    std::optional<std::size_t> delta_order(std::size_t j) const { return delta_order_.at(j); }
    /// Order of j within the wye indices; nullopt for delta indices.
    std::optional<std::size_t> wye_order(std::size_t j) const { return wye_order_.at(j); }

    std::size_t slack_node() const noexcept { return slack_; }

  private:
    std::vector<std::size_t> node_of_;
    std::vector<Phase> phase_of_;
    std::vector<std::size_t> position_;
    std::vector<std::vector<std::size_t>> node_indices_;
    std::vector<std::size_t> wye_;
    std::vector<std::size_t> delta_;
    std::vector<std::optional<std::size_t>> delta_order_;
    std::vector<std::optional<std::size_t>> wye_order_;
    std::size_t slack_ = 0;
};

/// {1, e^{-j2π/3}, e^{j2π/3}}.
std::array<Complex, 3> default_slack_voltage();

/// Validated, immutable network: nodes, branches, slack voltage and index map.
class NetworkModel {
  public:
    /// Throws InputError on any structural inconsistency.
    static NetworkModel create(std::vector<NodeSpec> nodes, std::vector<BranchSpec> branches,
                               std::array<Complex, 3> slack_voltage = default_slack_voltage());

    std::span<NodeSpec const> nodes() const noexcept { return nodes_; }
    std::span<BranchSpec const> branches() const noexcept { return branches_; }
    NodeSpec const& node(std::size_t n) const { return nodes_.at(n); }
    std::optional<std::size_t> find_node(std::string_view id) const;
    IndexMap const& index() const noexcept { return index_; }
    std::size_t slack_node() const noexcept { return index_.slack_node(); }
    std::array<Complex, 3> const& slack_voltage() const noexcept { return slack_voltage_; }

    /// Entries of `v` that belong to node n, in phase order.
    CVector node_voltage(std::span<Complex const> v, std::size_t n) const;
    /// Slack voltage restricted to each node's phases; the flat start profile.
    CVector flat_profile() const;

  private:
    std::vector<NodeSpec> nodes_;
    std::vector<BranchSpec> branches_;
    std::array<Complex, 3> slack_voltage_{};
    IndexMap index_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace zbus
