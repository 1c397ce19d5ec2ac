#include "zbus/loads.hpp"

#include <cmath>
#include <unordered_map>

#include "zbus/errors.hpp"

namespace zbus {

namespace {

std::string phase_name(Phase p) { return std::string(1, to_char(p)); }

std::string pair_name(Phase first, Phase second) { return phase_name(first) + phase_name(second); }

void require_voltage(Complex v, ZipLoad const& zip, NodeSpec const& node, std::string const& location) {
    if (zip.nonlinear() && std::abs(v) < kSingularVoltageThreshold) {
        throw SingularVoltageError("zero voltage on loaded " + location + " of node '" + node.id + "'",
                                   node.id, location);
    }
}

InjectionParts zeros(std::size_t n) { return {CVector(n), CVector(n), CVector(n)}; }

}  // namespace

CVector InjectionParts::total() const {
    CVector out = add(power, current);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += impedance[i];
    return out;
}

CVector InjectionParts::nonlinear() const { return add(power, current); }

Phase delta_pair_key(Phase first, Phase second) {
    if (first == second) throw InputError("delta pair needs two distinct phases");
    return right_shift(first) == second ? first : second;
}

InjectionParts wye_injection(NodeSpec const& node, std::span<Complex const> v_node,
                             std::span<ZipLoad const> zips) {
    if (v_node.size() != node.phases.size() || zips.size() != node.phases.size()) {
        throw InputError("wye_injection: vector length does not match phases of node '" + node.id + "'");
    }
    InjectionParts out = zeros(v_node.size());
    for (std::size_t p = 0; p < v_node.size(); ++p) {
        ZipLoad const& zip = zips[p];
        Complex const v = v_node[p];
        require_voltage(v, zip, node, "phase " + phase_name(node.phases[p]));
        if (zip.power != Complex{}) out.power[p] = -std::conj(zip.power / v);
        if (zip.current != Complex{}) out.current[p] = -(v / std::abs(v)) * zip.current;
        out.impedance[p] = -zip.admittance * v;
    }
    return out;
}

InjectionParts delta_injection(NodeSpec const& node, std::span<Complex const> v_node,
                               DeltaPairLoads const& pairs) {
    std::size_t const n = node.phases.size();
    if (v_node.size() != n) {
        throw InputError("delta_injection: vector length does not match phases of node '" + node.id + "'");
    }
    InjectionParts out = zeros(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            ZipLoad const& zip = pairs[phase_position(delta_pair_key(node.phases[p], node.phases[q]))];
            if (zip.empty()) continue;
            Complex const u = v_node[p] - v_node[q];
            require_voltage(u, zip, node, "pair " + pair_name(node.phases[p], node.phases[q]));
            if (zip.power != Complex{}) out.power[p] -= std::conj(zip.power / u);
            if (zip.current != Complex{}) out.current[p] -= zip.current * (u / std::abs(u));
            out.impedance[p] -= zip.admittance * u;
        }
    }
    return out;
}

LoadSet LoadSet::create(NetworkModel const& network, std::span<WyeLoadEntry const> wye,
                        std::span<DeltaLoadEntry const> delta) {
    LoadSet set;
    IndexMap const& index = network.index();
    set.wye_by_index_.assign(index.size(), ZipLoad{});
    set.delta_by_node_.assign(network.nodes().size(), DeltaPairLoads{});

    auto locate = [&](std::string const& id, NodeKind expected, char const* kind) {
        auto const n = network.find_node(id);
        if (!n) throw InputError(std::string(kind) + " load references unknown node '" + id + "'");
        NodeSpec const& node = network.node(*n);
        if (node.kind == NodeKind::slack) {
            throw InputError(std::string(kind) + " load on slack node '" + id + "' is not allowed");
        }
        if (node.kind != expected) {
            throw InputError(std::string(kind) + " load on " + std::string(to_string(node.kind)) + " node '" +
                             id + "'");
        }
        return *n;
    };

    std::vector<bool> wye_seen(index.size(), false);
    for (WyeLoadEntry const& entry : wye) {
        std::size_t const n = locate(entry.node, NodeKind::wye, "wye");
        auto const j = index.find(n, entry.phase);
        if (!j) {
            throw InputError("wye load on node '" + entry.node + "' references unavailable phase " +
                             phase_name(entry.phase));
        }
        if (wye_seen[*j]) {
            throw InputError("duplicate wye load on node '" + entry.node + "' phase " + phase_name(entry.phase));
        }
        wye_seen[*j] = true;
        set.wye_by_index_[*j] = entry.zip;
        set.wye_entries_.push_back(entry);
    }

    std::vector<std::array<bool, 3>> delta_seen(network.nodes().size(), {false, false, false});
    for (DeltaLoadEntry const& entry : delta) {
        std::size_t const n = locate(entry.node, NodeKind::delta, "delta");
        if (entry.first == entry.second) {
            throw InputError("delta load on node '" + entry.node + "' needs two distinct phases");
        }
        if (!index.find(n, entry.first) || !index.find(n, entry.second)) {
            throw InputError("delta load on node '" + entry.node + "' references unavailable pair " +
                             pair_name(entry.first, entry.second));
        }
        std::size_t const key = phase_position(delta_pair_key(entry.first, entry.second));
        if (delta_seen[n][key]) {
            // {φ,φ'} and {φ',φ} name the same load; restating it is fine, contradicting it is not
            if (set.delta_by_node_[n][key] != entry.zip) {
                throw InputError("contradictory delta loads on node '" + entry.node + "' pair " +
                                 pair_name(entry.first, entry.second));
            }
            continue;
        }
        delta_seen[n][key] = true;
        set.delta_by_node_[n][key] = entry.zip;
        set.delta_entries_.push_back(entry);
    }
    return set;
}

bool LoadSet::has_nonlinear() const noexcept {
    for (auto const& z : wye_by_index_) {
        if (z.nonlinear()) return true;
    }
    return has_nonlinear_delta();
}

bool LoadSet::has_nonlinear_delta() const noexcept {
    for (auto const& pairs : delta_by_node_) {
        for (auto const& z : pairs) {
            if (z.nonlinear()) return true;
        }
    }
    return false;
}

LoadSet LoadSet::scaled(double factor) const {
    LoadSet out = *this;
    for (auto& z : out.wye_by_index_) z = z.scaled(factor);
    for (auto& pairs : out.delta_by_node_) {
        for (auto& z : pairs) z = z.scaled(factor);
    }
    for (auto& e : out.wye_entries_) e.zip = e.zip.scaled(factor);
    for (auto& e : out.delta_entries_) e.zip = e.zip.scaled(factor);
    return out;
}

IndexedLoads index_loads(NetworkModel const& network, LoadSet const& loads) {
    IndexMap const& index = network.index();
    std::size_t const size = index.size();
    IndexedLoads out{CVector(size), CVector(size), std::vector<std::optional<DeltaPairing>>(size)};
    for (std::size_t j = 0; j < size; ++j) {
        std::size_t const n = index.node_of(j);
        NodeSpec const& node = network.node(n);
        if (node.kind == NodeKind::wye) {
            out.power[j] = loads.wye(j).power;
            out.current[j] = loads.wye(j).current;
            continue;
        }
        DeltaPairing pairing = delta_pairing(node, index.phase_of(j));
        if (pairing.paired) {
            ZipLoad const& zip = loads.delta(n)[phase_position(pairing.phase)];
            out.power[j] = zip.power;
            out.current[j] = zip.current;
        }
        out.pairing[j] = pairing;
    }
    return out;
}

InjectionParts evaluate_injections(NetworkModel const& network, LoadSet const& loads,
                                   std::span<Complex const> v) {
    IndexMap const& index = network.index();
    if (v.size() != index.size()) throw InputError("voltage vector length does not match the network");
    InjectionParts out = zeros(index.size());
    for (std::size_t n = 0; n < network.nodes().size(); ++n) {
        NodeSpec const& node = network.node(n);
        if (node.kind == NodeKind::slack) continue;
        auto const indices = index.indices_of(n);
        CVector const v_node = network.node_voltage(v, n);
        InjectionParts part;
        if (node.kind == NodeKind::wye) {
            std::vector<ZipLoad> zips;
            zips.reserve(indices.size());
            for (std::size_t j : indices) zips.push_back(loads.wye(j));
            part = wye_injection(node, v_node, zips);
        } else {
            part = delta_injection(node, v_node, loads.delta(n));
        }
        for (std::size_t p = 0; p < indices.size(); ++p) {
            out.power[indices[p]] = part.power[p];
            out.current[indices[p]] = part.current[p];
            out.impedance[indices[p]] = part.impedance[p];
        }
    }
    return out;
}

CMatrix assemble_load_admittance(NetworkModel const& network, LoadSet const& loads) {
    IndexMap const& index = network.index();
    CMatrix y_load(index.size(), index.size());
    for (std::size_t j : index.wye_indices()) y_load(j, j) = loads.wye(j).admittance;

    for (std::size_t n = 0; n < network.nodes().size(); ++n) {
        NodeSpec const& node = network.node(n);
        if (node.kind != NodeKind::delta) continue;
        auto const& pairs = loads.delta(n);
        for (Phase p : node.phases) {
            for (Phase q : node.phases) {
                if (p == q) continue;
                Complex const y = pairs[phase_position(delta_pair_key(p, q))].admittance;
                std::size_t const j = index.lin(n, p);
                std::size_t const k = index.lin(n, q);
                y_load(j, j) += y;
                y_load(j, k) -= y;
            }
        }
    }
    return y_load;
}

}  // namespace zbus
