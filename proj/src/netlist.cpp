#include "avgcell/netlist.hpp"

#include "avgcell/format.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <numeric>
#include <sstream>

namespace avgcell {

namespace {

struct KindInfo {
    ElementKind kind;
    std::string_view keyword;
    int arity;
    int value_count;  // numeric fields after the node list
};

// Longest keywords first so prefix matching is unambiguous.
constexpr std::array<KindInfo, 8> kKinds{{
    {ElementKind::VDC, "VDC", 2, 1},
    {ElementKind::IDC, "IDC", 2, 1},
    {ElementKind::SCN, "SCN", 3, 2},
    {ElementKind::SCD, "SCD", 3, 2},
    {ElementKind::FBN, "FBN", 3, 3},
    {ElementKind::FBD, "FBD", 3, 3},
    {ElementKind::R, "R", 2, 1},
    {ElementKind::C, "C", 2, 2},
}};

const KindInfo& info(ElementKind kind) {
    for (const auto& k : kKinds) {
        if (k.kind == kind) {
            return k;
        }
    }
    throw Error("unhandled element kind");
}

bool iequals_prefix(std::string_view token, std::string_view keyword) {
    if (token.size() < keyword.size()) {
        return false;
    }
    for (std::size_t i = 0; i < keyword.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(token[i])) != keyword[i]) {
            return false;
        }
    }
    return true;
}

bool is_label_text(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::optional<NodeId> parse_node(std::string_view text) {
    NodeId id = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
    if (ec != std::errc{} || ptr != text.data() + text.size() || id < 0) {
        return std::nullopt;
    }
    return id;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void parse_directive(const std::vector<std::string_view>& tokens, int line, RunParams& params) {
    if (lower(tokens[0]) != ".param") {
        throw NetlistError(NetlistErrorKind::UnknownDirective, line,
                           "unknown directive '" + std::string(tokens[0]) + "'");
    }
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto eq = tokens[i].find('=');
        if (eq == std::string_view::npos) {
            throw NetlistError(NetlistErrorKind::ArityError, line,
                               "expected key=value, got '" + std::string(tokens[i]) + "'");
        }
        auto key = lower(tokens[i].substr(0, eq));
        auto value = parse_double(tokens[i].substr(eq + 1));
        if (!value) {
            throw NetlistError(NetlistErrorKind::NumericError, line,
                               "bad number in '" + std::string(tokens[i]) + "'");
        }
        if (key == "d") {
            params.duty = *value;
        } else if (key == "fs") {
            params.switching_frequency = *value;
        } else if (key == "tend") {
            params.t_end = *value;
        } else {
            throw NetlistError(NetlistErrorKind::UnknownDirective, line,
                               "unknown parameter '" + key + "'");
        }
    }
}

Element parse_element(const std::vector<std::string_view>& tokens, int line) {
    const KindInfo* match = nullptr;
    for (const auto& k : kKinds) {
        if (iequals_prefix(tokens[0], k.keyword)) {
            match = &k;
            break;
        }
    }
    if (match == nullptr || !is_label_text(tokens[0].substr(match->keyword.size()))) {
        throw NetlistError(NetlistErrorKind::UnknownElementKind, line,
                           "unknown element kind '" + std::string(tokens[0]) + "'");
    }

    const std::size_t expected = 2 + match->arity + match->value_count;
    if (tokens.size() != expected) {
        throw NetlistError(NetlistErrorKind::ArityError, line,
                           std::string(match->keyword) + " takes " +
                               std::to_string(expected - 1) + " fields, got " +
                               std::to_string(tokens.size() - 1));
    }

    Element el;
    el.kind = match->kind;
    el.line = line;
    el.suffix = std::string(tokens[0].substr(match->keyword.size()));
    el.index = std::string(tokens[1]);
    if (!is_label_text(el.index)) {
        throw NetlistError(NetlistErrorKind::ArityError, line,
                           "bad element index '" + el.index + "'");
    }
    if (el.suffix == el.index) {
        el.suffix.clear();
    }

    for (int i = 0; i < match->arity; ++i) {
        auto tok = tokens[2 + i];
        auto node = parse_node(tok);
        if (!node) {
            throw NetlistError(NetlistErrorKind::NumericError, line,
                               "bad node id '" + std::string(tok) + "'");
        }
        el.nodes.push_back(*node);
    }

    std::vector<double> values;
    for (std::size_t i = 2 + match->arity; i < tokens.size(); ++i) {
        auto v = parse_double(tokens[i]);
        if (!v) {
            throw NetlistError(NetlistErrorKind::NumericError, line,
                               "bad number '" + std::string(tokens[i]) + "'");
        }
        values.push_back(*v);
    }
    el.value = values[0];
    if (match->kind == ElementKind::C || match->kind == ElementKind::SCN ||
        match->kind == ElementKind::SCD) {
        el.initial = values[1];
    } else if (is_flyback(match->kind)) {
        el.turns = values[1];
        el.initial = values[2];
    }
    return el;
}

// Nodes not reachable from ground through elements for which `use` holds.
template <class Pred>
std::set<NodeId> unreachable_from_ground(const CircuitDescription& c, Pred use) {
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const auto& el : c.elements) {
        if (!use(el)) {
            continue;
        }
        for (std::size_t i = 1; i < el.nodes.size(); ++i) {
            adj[el.nodes[0]].push_back(el.nodes[i]);
            adj[el.nodes[i]].push_back(el.nodes[0]);
        }
    }
    std::set<NodeId> seen{kGround};
    std::vector<NodeId> stack{kGround};
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        for (NodeId m : adj[n]) {
            if (seen.insert(m).second) {
                stack.push_back(m);
            }
        }
    }
    std::set<NodeId> out;
    for (NodeId n : c.node_ids) {
        if (!seen.count(n)) {
            out.insert(n);
        }
    }
    return out;
}

std::string join_nodes(const std::set<NodeId>& nodes) {
    std::string s = "{";
    for (auto it = nodes.begin(); it != nodes.end(); ++it) {
        if (it != nodes.begin()) {
            s += ",";
        }
        s += std::to_string(*it);
    }
    return s + "}";
}

}  // namespace

std::string_view to_string(ElementKind kind) { return info(kind).keyword; }

bool is_cell(ElementKind kind) {
    return kind == ElementKind::SCN || kind == ElementKind::SCD || is_flyback(kind);
}

bool is_flyback(ElementKind kind) { return kind == ElementKind::FBN || kind == ElementKind::FBD; }

bool has_diode(ElementKind kind) { return kind == ElementKind::SCD || kind == ElementKind::FBD; }

int arity(ElementKind kind) { return info(kind).arity; }

std::string Element::label() const {
    std::string out(to_string(kind));
    if (!suffix.empty()) {
        out += suffix + "_";
    }
    return out + index;
}

const Element& CircuitDescription::find(std::string_view label) const {
    auto pos = position(label);
    if (!pos) {
        throw UnknownLabel(std::string(label));
    }
    return elements[*pos];
}

std::optional<std::size_t> CircuitDescription::position(std::string_view label) const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (elements[i].label() == label) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t CircuitDescription::count(ElementKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        elements.begin(), elements.end(), [kind](const Element& e) { return e.kind == kind; }));
}

std::size_t CircuitDescription::cell_count() const {
    return static_cast<std::size_t>(std::count_if(
        elements.begin(), elements.end(), [](const Element& e) { return is_cell(e.kind); }));
}

NetlistError::NetlistError(NetlistErrorKind kind, int line, const std::string& message,
                           std::set<NodeId> nodes)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      kind_(kind), line_(line), nodes_(std::move(nodes)) {}

CircuitDescription parse_netlist(std::string_view text) {
    CircuitDescription circuit;
    std::set<std::string> labels;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0].front() == '#') {
            continue;
        }
        if (tokens[0].front() == '.') {
            parse_directive(tokens, line_no, circuit.params);
            continue;
        }
        Element el = parse_element(tokens, line_no);
        if (!labels.insert(el.label()).second) {
            throw NetlistError(NetlistErrorKind::DuplicateLabel, line_no,
                               "duplicate label '" + el.label() + "'");
        }
        circuit.node_ids.insert(el.nodes.begin(), el.nodes.end());
        circuit.elements.push_back(std::move(el));
    }

    if (!circuit.node_ids.count(kGround)) {
        throw NetlistError(NetlistErrorKind::MissingGround, 0, "no element references node 0");
    }
    auto isolated = unreachable_from_ground(circuit, [](const Element&) { return true; });
    if (!isolated.empty()) {
        throw NetlistError(NetlistErrorKind::DisconnectedGraph, 0,
                           "nodes " + join_nodes(isolated) + " are not connected to ground",
                           isolated);
    }
    return circuit;
}

std::vector<Diagnostic> validate(const CircuitDescription& circuit) {
    std::vector<Diagnostic> out;

    if (!circuit.node_ids.count(kGround)) {
        out.push_back({0, "missing ground node 0"});
    } else {
        auto isolated = unreachable_from_ground(circuit, [](const Element&) { return true; });
        if (!isolated.empty()) {
            out.push_back({0, "disconnected nodes " + join_nodes(isolated)});
        } else {
            auto cut = unreachable_from_ground(
                circuit, [](const Element& e) { return e.kind != ElementKind::IDC; });
            if (!cut.empty()) {
                out.push_back({0, "current source cutset isolates nodes " + join_nodes(cut)});
            }
        }
    }

    for (const auto& el : circuit.elements) {
        for (NodeId n : el.nodes) {
            if (!circuit.node_ids.count(n)) {
                out.push_back({el.line, el.label() + ": node " + std::to_string(n) +
                                            " is not in the node set"});
            }
        }
        switch (el.kind) {
            case ElementKind::R:
                if (!(el.value > 0.0)) {
                    out.push_back({el.line, el.label() + ": non-positive resistance"});
                }
                break;
            case ElementKind::C:
                if (!(el.value > 0.0)) {
                    out.push_back({el.line, el.label() + ": non-positive capacitance"});
                }
                break;
            case ElementKind::SCN:
            case ElementKind::SCD:
            case ElementKind::FBN:
            case ElementKind::FBD:
                if (!(el.value > 0.0)) {
                    out.push_back({el.line, el.label() + ": non-positive inductance"});
                }
                if (!(el.turns > 0.0)) {
                    out.push_back({el.line, el.label() + ": non-positive turns ratio"});
                }
                break;
            default:
                break;
        }
    }

    // Union-find over voltage sources: an edge joining an already connected
    // pair closes a loop of ideal voltage sources.
    std::map<NodeId, NodeId> parent;
    auto root = [&parent](NodeId n) {
        parent.try_emplace(n, n);
        while (parent[n] != n) {
            parent[n] = parent[parent[n]];
            n = parent[n];
        }
        return n;
    };
    for (const auto& el : circuit.elements) {
        if (el.kind != ElementKind::VDC) {
            continue;
        }
        NodeId a = root(el.nodes[0]);
        NodeId b = root(el.nodes[1]);
        if (a == b) {
            out.push_back({el.line, el.label() + ": voltage source loop"});
        } else {
            parent[a] = b;
        }
    }
    return out;
}

std::string to_text(const CircuitDescription& circuit) {
    std::ostringstream os;
    const auto& p = circuit.params;
    if (p.duty || p.switching_frequency || p.t_end) {
        os << ".param";
        if (p.duty) {
            os << " D=" << format_shortest(*p.duty);
        }
        if (p.switching_frequency) {
            os << " fs=" << format_shortest(*p.switching_frequency);
        }
        if (p.t_end) {
            os << " tend=" << format_shortest(*p.t_end);
        }
        os << '\n';
    }
    for (const auto& el : circuit.elements) {
        os << to_string(el.kind) << el.suffix << ' ' << el.index;
        for (NodeId n : el.nodes) {
            os << ' ' << n;
        }
        os << ' ' << format_shortest(el.value);
        if (is_flyback(el.kind)) {
            os << ' ' << format_shortest(el.turns);
        }
        if (el.kind == ElementKind::C || is_cell(el.kind)) {
            os << ' ' << format_shortest(el.initial);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace avgcell
