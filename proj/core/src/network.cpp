#include "zbus/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "zbus/errors.hpp"

namespace zbus {

namespace {

std::string describe(NodeSpec const& node) { return "node '" + node.id + "'"; }

std::optional<std::size_t> position_of(std::span<Phase const> phases, Phase phase) {
    auto it = std::find(phases.begin(), phases.end(), phase);
    if (it == phases.end()) return std::nullopt;
    return static_cast<std::size_t>(it - phases.begin());
}

void normalize_phases(std::vector<Phase>& phases, std::string const& what) {
    std::sort(phases.begin(), phases.end());
    if (std::adjacent_find(phases.begin(), phases.end()) != phases.end()) {
        throw InputError(what + ": duplicate phase");
    }
}

}  // namespace

std::string_view to_string(NodeKind kind) noexcept {
    switch (kind) {
        case NodeKind::wye: return "wye";
        case NodeKind::delta: return "delta";
        case NodeKind::slack: return "slack";
    }
    return "wye";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
    if (text == "wye") return NodeKind::wye;
    if (text == "delta") return NodeKind::delta;
    if (text == "slack") return NodeKind::slack;
    return std::nullopt;
}

LineToLineSelector::LineToLineSelector(std::size_t length, std::size_t plus, std::size_t minus)
    : length_(length), plus_(plus), minus_(minus) {
    if (plus >= length || minus >= length || plus == minus) {
        throw InputError("line-to-line selector needs two distinct positions inside the node");
    }
}

Complex LineToLineSelector::apply(std::span<Complex const> v_node) const {
    return v_node[plus_] - v_node[minus_];
}

std::vector<int> LineToLineSelector::coefficients() const {
    std::vector<int> e(length_, 0);
    e[plus_] = 1;
    e[minus_] = -1;
    return e;
}

DeltaPairing delta_pairing(NodeSpec const& node, Phase phase) {
    if (node.kind != NodeKind::delta) throw InputError(describe(node) + " is not delta-connected");
    auto const pos = position_of(node.phases, phase);
    if (!pos) {
        throw InputError(describe(node) + " has no phase " + std::string(1, to_char(phase)));
    }
    std::size_t const length = node.phases.size();
    Phase const shifted = right_shift(phase);
    if (auto const partner_pos = position_of(node.phases, shifted)) {
        return {phase, shifted, true, LineToLineSelector(length, *pos, *partner_pos)};
    }
    if (length != 2) {
        throw InputError(describe(node) + ": delta node with three phases always pairs");
    }
    std::size_t const other_pos = 1 - *pos;
    return {phase, node.phases[other_pos], false, LineToLineSelector(length, *pos, other_pos)};
}

IndexMap IndexMap::build(std::span<NodeSpec const> nodes) {
    IndexMap map;
    std::unordered_map<std::string, std::size_t> seen;
    std::optional<std::size_t> slack;
    map.node_indices_.resize(nodes.size());

    for (std::size_t n = 0; n < nodes.size(); ++n) {
        NodeSpec const& node = nodes[n];
        if (node.id.empty()) throw InputError("node at position " + std::to_string(n) + " has an empty id");
        if (!seen.emplace(node.id, n).second) throw InputError("duplicate node id '" + node.id + "'");
        if (!std::is_sorted(node.phases.begin(), node.phases.end()) ||
            std::adjacent_find(node.phases.begin(), node.phases.end()) != node.phases.end()) {
            throw InputError(describe(node) + ": phases must be distinct and ordered a < b < c");
        }
        std::size_t const count = node.phases.size();
        switch (node.kind) {
            case NodeKind::slack:
                if (slack) {
                    throw InputError("multiple slack nodes ('" + nodes[*slack].id + "', '" + node.id + "')");
                }
                if (count != 3) throw InputError("slack " + describe(node) + " must carry all three phases");
                slack = n;
                continue;
            case NodeKind::delta:
                if (count < 2) throw InputError("delta " + describe(node) + " needs at least two phases");
                break;
            case NodeKind::wye:
                if (count < 1) throw InputError("wye " + describe(node) + " needs at least one phase");
                break;
        }
        for (std::size_t p = 0; p < count; ++p) {
            std::size_t const j = map.node_of_.size();
            map.node_of_.push_back(n);
            map.phase_of_.push_back(node.phases[p]);
            map.position_.push_back(p);
            map.node_indices_[n].push_back(j);
            if (node.kind == NodeKind::delta) {
                map.delta_order_.emplace_back(map.delta_.size());
                map.wye_order_.emplace_back(std::nullopt);
                map.delta_.push_back(j);
            } else {
                map.wye_order_.emplace_back(map.wye_.size());
                map.delta_order_.emplace_back(std::nullopt);
                map.wye_.push_back(j);
            }
        }
    }
    if (!slack) throw InputError("network has no slack node");
    map.slack_ = *slack;
    return map;
}

std::optional<std::size_t> IndexMap::find(std::size_t node, Phase phase) const {
    if (node >= node_indices_.size()) return std::nullopt;
    for (std::size_t j : node_indices_[node]) {
        if (phase_of_[j] == phase) return j;
    }
    return std::nullopt;
}

std::size_t IndexMap::lin(std::size_t node, Phase phase) const {
    if (auto j = find(node, phase)) return *j;
    std::ostringstream msg;
    msg << "no linear index for node " << node << " phase " << to_char(phase);
    throw InputError(msg.str());
}

std::array<Complex, 3> default_slack_voltage() {
    double const angle = 2.0 * std::numbers::pi / 3.0;
    return {Complex{1.0, 0.0}, std::polar(1.0, -angle), std::polar(1.0, angle)};
}

NetworkModel NetworkModel::create(std::vector<NodeSpec> nodes, std::vector<BranchSpec> branches,
                                  std::array<Complex, 3> slack_voltage) {
    NetworkModel model;
    for (auto& node : nodes) {
        std::vector<Phase> original = node.phases;
        normalize_phases(node.phases, describe(node));
        if (!node.shunt.empty()) {
            if (node.shunt.size() != node.phases.size()) {
                throw InputError(describe(node) + ": shunt needs one entry per phase");
            }
            // keep shunt aligned with the sorted phase list
            CVector aligned(node.shunt.size());
            for (std::size_t p = 0; p < original.size(); ++p) {
                aligned[*position_of(node.phases, original[p])] = node.shunt[p];
            }
            node.shunt = std::move(aligned);
        }
    }
    model.index_ = IndexMap::build(nodes);
    for (std::size_t n = 0; n < nodes.size(); ++n) model.by_id_.emplace(nodes[n].id, n);

    for (std::size_t b = 0; b < branches.size(); ++b) {
        BranchSpec& branch = branches[b];
        std::string const what = "branch " + std::to_string(b) + " (" + branch.from + " -> " + branch.to + ")";
        auto from = model.by_id_.find(branch.from);
        auto to = model.by_id_.find(branch.to);
        if (from == model.by_id_.end()) throw InputError(what + ": unknown node '" + branch.from + "'");
        if (to == model.by_id_.end()) throw InputError(what + ": unknown node '" + branch.to + "'");
        if (from->second == to->second) throw InputError(what + ": endpoints coincide");

        auto const& from_phases = nodes[from->second].phases;
        auto const& to_phases = nodes[to->second].phases;
        if (branch.phases.empty()) {
            std::set_intersection(from_phases.begin(), from_phases.end(), to_phases.begin(), to_phases.end(),
                                  std::back_inserter(branch.phases));
            if (branch.phases.empty()) throw InputError(what + ": endpoints share no phase");
        } else if (!std::is_sorted(branch.phases.begin(), branch.phases.end())) {
            throw InputError(what + ": phases must be listed in a < b < c order");
        }
        normalize_phases(branch.phases, what);
        for (Phase p : branch.phases) {
            if (!position_of(from_phases, p) || !position_of(to_phases, p)) {
                throw InputError(what + ": phase " + std::string(1, to_char(p)) +
                                 " is not available at both endpoints");
            }
        }
        std::size_t const dim = branch.phases.size();
        auto check_block = [&](CMatrix const& m, char const* name, bool optional) {
            if (optional && m.empty()) return;
            if (m.rows() != dim || m.cols() != dim) {
                throw InputError(what + ": " + name + " block must be " + std::to_string(dim) + "x" +
                                 std::to_string(dim));
            }
        };
        check_block(branch.series, "series", false);
        check_block(branch.shunt_from, "shunt_from", true);
        check_block(branch.shunt_to, "shunt_to", true);
    }

    model.nodes_ = std::move(nodes);
    model.branches_ = std::move(branches);
    model.slack_voltage_ = slack_voltage;
    return model;
}

std::optional<std::size_t> NetworkModel::find_node(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

CVector NetworkModel::node_voltage(std::span<Complex const> v, std::size_t n) const {
    auto const indices = index_.indices_of(n);
    CVector out;
    out.reserve(indices.size());
    for (std::size_t j : indices) out.push_back(v[j]);
    return out;
}

CVector NetworkModel::flat_profile() const {
    CVector v(index_.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = slack_voltage_[phase_position(index_.phase_of(j))];
    return v;
}

}  // namespace zbus
