#include "zbus/feeder_io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace zbus {

namespace {

using Json = nlohmann::ordered_json;

struct Position {
    std::size_t line = 0;
    std::size_t column = 0;
};

Position position_of_offset(std::string_view text, std::size_t offset) {
    Position pos{1, 1};
    for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
        if (text[i] == '\n') {
            ++pos.line;
            pos.column = 1;
        } else {
            ++pos.column;
        }
    }
    return pos;
}

std::string escape_pointer_token(std::string_view token) {
    std::string out;
    for (char c : token) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

// Maps the JSON pointer of every value in a syntactically valid document to
// where that value starts. Only consulted after a semantic error.
std::unordered_map<std::string, Position> index_positions(std::string_view text) {
    struct Frame {
        bool object = false;
        bool expecting_key = false;
        std::size_t index = 0;
        std::string key;
    };
    std::unordered_map<std::string, Position> out;
    std::vector<Frame> stack;
    Position pos{1, 1};
    std::size_t i = 0;

    auto advance = [&] {
        if (text[i] == '\n') {
            ++pos.line;
            pos.column = 1;
        } else {
            ++pos.column;
        }
        ++i;
    };
    auto read_string = [&] {
        std::string s;
        advance();  // opening quote
        while (i < text.size() && text[i] != '"') {
            if (text[i] == '\\' && i + 1 < text.size()) advance();
            s += text[i];
            advance();
        }
        if (i < text.size()) advance();
        return s;
    };
    auto pointer = [&] {
        std::string p;
        for (Frame const& f : stack) p += "/" + (f.object ? escape_pointer_token(f.key) : std::to_string(f.index));
        return p;
    };

    while (i < text.size()) {
        char const c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ':') {
            advance();
            continue;
        }
        if (c == ',') {
            if (!stack.empty()) {
                if (stack.back().object) stack.back().expecting_key = true;
                else ++stack.back().index;
            }
            advance();
            continue;
        }
        if (c == '}' || c == ']') {
            if (!stack.empty()) stack.pop_back();
            advance();
            continue;
        }
        if (!stack.empty() && stack.back().object && stack.back().expecting_key) {
            if (c == '"') {
                stack.back().key = read_string();
                stack.back().expecting_key = false;
            } else {
                advance();
            }
            continue;
        }
        out.emplace(pointer(), pos);
        if (c == '{') {
            stack.push_back({true, true, 0, {}});
            advance();
        } else if (c == '[') {
            stack.push_back({false, false, 0, {}});
            advance();
        } else if (c == '"') {
            read_string();
        } else {
            while (i < text.size() && std::string_view(",]} \t\r\n").find(text[i]) == std::string_view::npos) advance();
        }
    }
    return out;
}

// Semantic error raised while walking the document; located afterwards.
struct LocatedError {
    std::string pointer;
    std::string message;
};

[[noreturn]] void fail(std::string pointer, std::string message) {
    throw LocatedError{std::move(pointer), std::move(message)};
}

std::string child(std::string const& ptr, std::string_view key) { return ptr + "/" + escape_pointer_token(key); }
std::string child(std::string const& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

void require_object(Json const& j, std::string const& ptr, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) fail(ptr, "expected an object");
    for (auto const& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(child(ptr, key), "unknown field '" + key + "'");
        }
    }
}

Json const* find_member(Json const& obj, std::string_view key) {
    auto it = obj.find(std::string(key));
    return it == obj.end() ? nullptr : &*it;
}

Json const& require_member(Json const& obj, std::string const& ptr, std::string_view key) {
    Json const* m = find_member(obj, key);
    if (m == nullptr) fail(ptr, "missing required field '" + std::string(key) + "'");
    return *m;
}

std::string read_string(Json const& j, std::string const& ptr) {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
}

double read_number(Json const& j, std::string const& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
}

Json const& require_array(Json const& j, std::string const& ptr) {
    if (!j.is_array()) fail(ptr, "expected an array");
    return j;
}

Complex read_complex(Json const& j, std::string const& ptr) {
    if (!j.is_array() || j.size() != 2) fail(ptr, "expected a complex number as [re, im]");
    return {read_number(j[0], child(ptr, std::size_t{0})), read_number(j[1], child(ptr, std::size_t{1}))};
}

CVector read_complex_list(Json const& j, std::string const& ptr) {
    require_array(j, ptr);
    CVector out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(read_complex(j[k], child(ptr, k)));
    return out;
}

Phase read_phase(Json const& j, std::string const& ptr) {
    auto const text = read_string(j, ptr);
    auto const phase = parse_phase(text);
    if (!phase) fail(ptr, "unknown phase '" + text + "'");
    return *phase;
}

std::vector<Phase> read_phases(Json const& j, std::string const& ptr) {
    require_array(j, ptr);
    std::vector<Phase> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        Phase const p = read_phase(j[k], child(ptr, k));
        if (std::find(out.begin(), out.end(), p) != out.end()) {
            fail(child(ptr, k), std::string("phase '") + to_char(p) + "' listed twice");
        }
        out.push_back(p);
    }
    return out;
}

CMatrix read_block(Json const& j, std::string const& ptr, std::size_t dim) {
    CVector flat = read_complex_list(j, ptr);
    if (flat.size() != dim * dim) {
        fail(ptr, "expected " + std::to_string(dim * dim) + " entries for a " + std::to_string(dim) + "x" +
                      std::to_string(dim) + " block, got " + std::to_string(flat.size()));
    }
    return CMatrix(dim, dim, std::move(flat));
}

bool has_phase(NodeSpec const& node, Phase p) {
    return std::find(node.phases.begin(), node.phases.end(), p) != node.phases.end();
}

std::string phase_text(Phase p) { return std::string(1, to_char(p)); }

ZipLoad read_zip(Json const& j, std::string const& ptr) {
    ZipLoad zip;
    if (Json const* s = find_member(j, "s")) zip.power = read_complex(*s, child(ptr, "s"));
    if (Json const* i = find_member(j, "i")) zip.current = read_complex(*i, child(ptr, "i"));
    if (Json const* y = find_member(j, "y")) zip.admittance = read_complex(*y, child(ptr, "y"));
    return zip;
}

Feeder build_feeder(Json const& root) {
    std::string const top;
    require_object(root, top, {"schema_version", "base", "slack", "nodes", "branches", "loads"});
    auto const version = read_string(require_member(root, top, "schema_version"), "/schema_version");
    if (version != kSchemaVersion) fail("/schema_version", "unsupported schema_version '" + version + "'");

    std::optional<FeederBase> base;
    if (Json const* b = find_member(root, "base")) {
        require_object(*b, "/base", {"s_base_va", "v_base_v"});
        base = FeederBase{read_number(require_member(*b, "/base", "s_base_va"), "/base/s_base_va"),
                          read_number(require_member(*b, "/base", "v_base_v"), "/base/v_base_v")};
    }

    Json const& slack = require_member(root, top, "slack");
    require_object(slack, "/slack", {"id", "voltage"});
    std::string const slack_id = read_string(require_member(slack, "/slack", "id"), "/slack/id");
    auto slack_voltage = default_slack_voltage();
    if (Json const* v = find_member(slack, "voltage")) {
        CVector values = read_complex_list(*v, "/slack/voltage");
        if (values.size() != 3) fail("/slack/voltage", "slack voltage needs exactly three phases");
        std::copy(values.begin(), values.end(), slack_voltage.begin());
    }

    std::vector<NodeSpec> nodes{{slack_id, NodeKind::slack, {Phase::a, Phase::b, Phase::c}, {}}};
    std::unordered_map<std::string, std::size_t> by_id{{slack_id, 0}};
    Json const& node_list = require_array(require_member(root, top, "nodes"), "/nodes");
    for (std::size_t k = 0; k < node_list.size(); ++k) {
        std::string const ptr = child("/nodes", k);
        Json const& j = node_list[k];
        require_object(j, ptr, {"id", "kind", "phases", "shunt"});
        NodeSpec node;
        node.id = read_string(require_member(j, ptr, "id"), child(ptr, "id"));
        auto const kind_text = read_string(require_member(j, ptr, "kind"), child(ptr, "kind"));
        auto const kind = parse_node_kind(kind_text);
        if (!kind || *kind == NodeKind::slack) fail(child(ptr, "kind"), "kind must be 'wye' or 'delta', got '" + kind_text + "'");
        node.kind = *kind;
        node.phases = read_phases(require_member(j, ptr, "phases"), child(ptr, "phases"));
        if (node.phases.empty()) fail(child(ptr, "phases"), "node '" + node.id + "' has no phases");
        if (node.kind == NodeKind::delta && node.phases.size() < 2) {
            fail(child(ptr, "phases"), "delta node '" + node.id + "' needs at least two phases");
        }
        if (Json const* s = find_member(j, "shunt")) {
            node.shunt = read_complex_list(*s, child(ptr, "shunt"));
            if (node.shunt.size() != node.phases.size()) {
                fail(child(ptr, "shunt"), "shunt of node '" + node.id + "' must have one entry per phase");
            }
        }
        if (!by_id.emplace(node.id, nodes.size()).second) fail(child(ptr, "id"), "duplicate node id '" + node.id + "'");
        nodes.push_back(std::move(node));
    }

    auto lookup = [&](Json const& j, std::string const& ptr) -> NodeSpec const& {
        auto const id = read_string(j, ptr);
        auto it = by_id.find(id);
        if (it == by_id.end()) fail(ptr, "unknown node '" + id + "'");
        return nodes[it->second];
    };

    std::vector<BranchSpec> branches;
    if (Json const* list = find_member(root, "branches")) {
        require_array(*list, "/branches");
        for (std::size_t k = 0; k < list->size(); ++k) {
            std::string const ptr = child("/branches", k);
            Json const& j = (*list)[k];
            require_object(j, ptr, {"from", "to", "phases", "series", "shunt_from", "shunt_to"});
            NodeSpec const& from = lookup(require_member(j, ptr, "from"), child(ptr, "from"));
            NodeSpec const& to = lookup(require_member(j, ptr, "to"), child(ptr, "to"));
            if (from.id == to.id) fail(ptr, "branch connects node '" + from.id + "' to itself");
            BranchSpec branch{from.id, to.id, {}, {}, {}, {}};
            if (Json const* p = find_member(j, "phases")) {
                branch.phases = read_phases(*p, child(ptr, "phases"));
                if (!std::is_sorted(branch.phases.begin(), branch.phases.end())) {
                    fail(child(ptr, "phases"), "branch phases must be listed in a < b < c order");
                }
                for (Phase phase : branch.phases) {
                    for (NodeSpec const* end : {&from, &to}) {
                        if (!has_phase(*end, phase)) {
                            fail(child(ptr, "phases"),
                                 "phase '" + phase_text(phase) + "' is not available at node '" + end->id + "'");
                        }
                    }
                }
            } else {
                for (Phase phase : kAllPhases) {
                    if (has_phase(from, phase) && has_phase(to, phase)) branch.phases.push_back(phase);
                }
            }
            if (branch.phases.empty()) fail(ptr, "branch carries no phases");
            std::size_t const dim = branch.phases.size();
            branch.series = read_block(require_member(j, ptr, "series"), child(ptr, "series"), dim);
            if (Json const* s = find_member(j, "shunt_from")) branch.shunt_from = read_block(*s, child(ptr, "shunt_from"), dim);
            if (Json const* s = find_member(j, "shunt_to")) branch.shunt_to = read_block(*s, child(ptr, "shunt_to"), dim);
            branches.push_back(std::move(branch));
        }
    }

    std::vector<WyeLoadEntry> wye;
    std::vector<DeltaLoadEntry> delta;
    if (Json const* loads = find_member(root, "loads")) {
        require_object(*loads, "/loads", {"wye", "delta"});
        if (Json const* list = find_member(*loads, "wye")) {
            require_array(*list, "/loads/wye");
            for (std::size_t k = 0; k < list->size(); ++k) {
                std::string const ptr = child("/loads/wye", k);
                Json const& j = (*list)[k];
                require_object(j, ptr, {"node", "phase", "s", "i", "y"});
                NodeSpec const& node = lookup(require_member(j, ptr, "node"), child(ptr, "node"));
                if (node.kind == NodeKind::slack) fail(child(ptr, "node"), "load on slack node '" + node.id + "'");
                if (node.kind != NodeKind::wye) {
                    fail(child(ptr, "node"), "wye load on delta node '" + node.id + "'");
                }
                Phase const phase = read_phase(require_member(j, ptr, "phase"), child(ptr, "phase"));
                if (!has_phase(node, phase)) {
                    fail(child(ptr, "phase"), "phase '" + phase_text(phase) + "' is not available at node '" + node.id + "'");
                }
                wye.push_back({node.id, phase, read_zip(j, ptr)});
            }
        }
        if (Json const* list = find_member(*loads, "delta")) {
            require_array(*list, "/loads/delta");
            for (std::size_t k = 0; k < list->size(); ++k) {
                std::string const ptr = child("/loads/delta", k);
                Json const& j = (*list)[k];
                require_object(j, ptr, {"node", "pair", "s", "i", "y"});
                NodeSpec const& node = lookup(require_member(j, ptr, "node"), child(ptr, "node"));
                if (node.kind == NodeKind::slack) fail(child(ptr, "node"), "load on slack node '" + node.id + "'");
                if (node.kind != NodeKind::delta) {
                    fail(child(ptr, "node"), "delta load on wye node '" + node.id + "'");
                }
                std::string const pair_ptr = child(ptr, "pair");
                auto const pair = read_phases(require_member(j, ptr, "pair"), pair_ptr);
                if (pair.size() != 2) fail(pair_ptr, "pair needs two distinct phases");
                for (Phase phase : pair) {
                    if (!has_phase(node, phase)) {
                        fail(pair_ptr, "phase '" + phase_text(phase) + "' is not available at node '" + node.id + "'");
                    }
                }
                delta.push_back({node.id, pair[0], pair[1], read_zip(j, ptr)});
            }
        }
    }

    NetworkModel network = NetworkModel::create(std::move(nodes), std::move(branches), slack_voltage);
    LoadSet load_set = LoadSet::create(network, wye, delta);
    return {std::move(network), std::move(load_set), base};
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json complex_list_json(std::span<Complex const> values) {
    Json out = Json::array();
    for (Complex z : values) out.push_back(complex_json(z));
    return out;
}

Json block_json(CMatrix const& m) {
    Json out = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out.push_back(complex_json(m(r, c)));
    return out;
}

Json phases_json(std::span<Phase const> phases) {
    Json out = Json::array();
    for (Phase p : phases) out.push_back(phase_text(p));
    return out;
}

void zip_json(Json& j, ZipLoad const& zip) {
    j["s"] = complex_json(zip.power);
    j["i"] = complex_json(zip.current);
    j["y"] = complex_json(zip.admittance);
}

Json parse_json(std::string_view text, std::string_view source) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (Json::parse_error const& e) {
        Position const pos = position_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
        throw FeederFormatError(std::string(source) + ":" + std::to_string(pos.line) + ":" +
                                    std::to_string(pos.column) + ": syntax error: " + e.what(),
                                "", pos.line, pos.column);
    }
}

template <typename F>
auto with_locations(std::string_view text, std::string_view source, F&& body) {
    try {
        return body();
    } catch (LocatedError const& e) {
        auto const positions = index_positions(text);
        auto it = positions.find(e.pointer);
        std::string const where = e.pointer.empty() ? "document root" : e.pointer;
        if (it == positions.end()) {
            throw FeederFormatError(std::string(source) + ": " + where + ": " + e.message, e.pointer, 0, 0);
        }
        throw FeederFormatError(std::string(source) + ":" + std::to_string(it->second.line) + ":" +
                                    std::to_string(it->second.column) + ": " + where + ": " + e.message,
                                e.pointer, it->second.line, it->second.column);
    } catch (FeederFormatError const&) {
        throw;
    } catch (InputError const& e) {
        throw InputError(std::string(source) + ": " + e.what());
    }
}

}  // namespace

std::string read_text_file(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw InputError("cannot read '" + path.string() + "'");
    return buffer.str();
}

Feeder parse_feeder(std::string_view text, std::string_view source) {
    Json const root = parse_json(text, source);
    return with_locations(text, source, [&] { return build_feeder(root); });
}

Feeder parse_feeder_file(std::filesystem::path const& path) {
    return parse_feeder(read_text_file(path), path.string());
}

std::string emit_feeder(Feeder const& feeder) {
    NetworkModel const& net = feeder.network;
    Json root;
    root["schema_version"] = std::string(kSchemaVersion);
    if (feeder.base) root["base"] = {{"s_base_va", feeder.base->s_base_va}, {"v_base_v", feeder.base->v_base_v}};
    root["slack"] = {{"id", net.node(net.slack_node()).id}, {"voltage", complex_list_json(net.slack_voltage())}};

    Json nodes = Json::array();
    for (NodeSpec const& node : net.nodes()) {
        if (node.kind == NodeKind::slack) continue;
        Json j;
        j["id"] = node.id;
        j["kind"] = std::string(to_string(node.kind));
        j["phases"] = phases_json(node.phases);
        if (!node.shunt.empty()) j["shunt"] = complex_list_json(node.shunt);
        nodes.push_back(std::move(j));
    }
    root["nodes"] = std::move(nodes);

    Json branches = Json::array();
    for (BranchSpec const& b : net.branches()) {
        Json j;
        j["from"] = b.from;
        j["to"] = b.to;
        j["phases"] = phases_json(b.phases);
        j["series"] = block_json(b.series);
        if (b.shunt_from.rows() > 0) j["shunt_from"] = block_json(b.shunt_from);
        if (b.shunt_to.rows() > 0) j["shunt_to"] = block_json(b.shunt_to);
        branches.push_back(std::move(j));
    }
    root["branches"] = std::move(branches);

    Json wye = Json::array();
    for (WyeLoadEntry const& e : feeder.loads.wye_entries()) {
        Json j;
        j["node"] = e.node;
        j["phase"] = phase_text(e.phase);
        zip_json(j, e.zip);
        wye.push_back(std::move(j));
    }
    Json delta = Json::array();
    for (DeltaLoadEntry const& e : feeder.loads.delta_entries()) {
        Json j;
        j["node"] = e.node;
        j["pair"] = Json::array({phase_text(e.first), phase_text(e.second)});
        zip_json(j, e.zip);
        delta.push_back(std::move(j));
    }
    root["loads"] = {{"wye", std::move(wye)}, {"delta", std::move(delta)}};
    return root.dump(2) + "\n";
}

CVector parse_complex_vector(std::string_view text, std::string_view source) {
    Json const root = parse_json(text, source);
    return with_locations(text, source, [&] {
        if (root.is_array()) return read_complex_list(root, "");
        require_object(root, "", {"schema_version", "values"});
        auto const version = read_string(require_member(root, "", "schema_version"), "/schema_version");
        if (version != kSchemaVersion) fail("/schema_version", "unsupported schema_version '" + version + "'");
        return read_complex_list(require_member(root, "", "values"), "/values");
    });
}

CVector parse_complex_vector_file(std::filesystem::path const& path) {
    return parse_complex_vector(read_text_file(path), path.string());
}

std::string emit_complex_vector(std::span<Complex const> values) {
    Json root;
    root["schema_version"] = std::string(kSchemaVersion);
    root["values"] = complex_list_json(values);
    return root.dump(2) + "\n";
}

}  // namespace zbus
