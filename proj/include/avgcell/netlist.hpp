#pragma once

#include "avgcell/error.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace avgcell {

using NodeId = int;
inline constexpr NodeId kGround = 0;

enum class ElementKind { VDC, IDC, R, C, SCN, SCD, FBN, FBD };

[[nodiscard]] std::string_view to_string(ElementKind kind);
[[nodiscard]] bool is_cell(ElementKind kind);
[[nodiscard]] bool is_flyback(ElementKind kind);
[[nodiscard]] bool has_diode(ElementKind kind);
/// Number of node references the kind takes (2 or 3).
[[nodiscard]] int arity(ElementKind kind);

/// One netlist line.
///
/// `value` carries the kind's primary parameter: volts (VDC), amperes (IDC),
/// ohms (R), farads (C), or the (magnetizing) inductance in henries for
/// cells. `initial` is the capacitor start voltage or the cell's initial
/// inductor current; it is zero for kinds without one.
struct Element {
    ElementKind kind = ElementKind::R;
    std::string suffix;  // text glued to the keyword, "1" in "SCN1"
    std::string index;
    std::vector<NodeId> nodes;
    double value = 0.0;
    double turns = 1.0;
    double initial = 0.0;
    int line = 0;

    [[nodiscard]] std::string label() const;

    // Source line is not part of the structure.
    [[nodiscard]] bool operator==(const Element& other) const {
        return kind == other.kind && suffix == other.suffix && index == other.index &&
               nodes == other.nodes && value == other.value && turns == other.turns &&
               initial == other.initial;
    }
};

/// Run parameters optionally supplied by a `.param` directive.
struct RunParams {
    std::optional<double> duty;
    std::optional<double> switching_frequency;
    std::optional<double> t_end;

    [[nodiscard]] bool operator==(const RunParams&) const = default;
};

struct CircuitDescription {
    std::vector<Element> elements;
    std::set<NodeId> node_ids;
    RunParams params;

    [[nodiscard]] const Element& find(std::string_view label) const;
    [[nodiscard]] std::optional<std::size_t> position(std::string_view label) const;
    [[nodiscard]] std::size_t count(ElementKind kind) const;
    [[nodiscard]] std::size_t cell_count() const;

    [[nodiscard]] bool operator==(const CircuitDescription&) const = default;
};

enum class NetlistErrorKind {
    UnknownElementKind,
    UnknownDirective,
    ArityError,
    NumericError,
    DuplicateLabel,
    DisconnectedGraph,
    MissingGround,
};

class NetlistError : public Error {
public:
    NetlistError(NetlistErrorKind kind, int line, const std::string& message,
                 std::set<NodeId> nodes = {});

    [[nodiscard]] NetlistErrorKind kind() const noexcept { return kind_; }
    /// 1-based source line, 0 when the error is not tied to a line.
    [[nodiscard]] int line() const noexcept { return line_; }
    /// Offending nodes for DisconnectedGraph.
    [[nodiscard]] const std::set<NodeId>& nodes() const noexcept { return nodes_; }

private:
    NetlistErrorKind kind_;
    int line_;
    std::set<NodeId> nodes_;
};

struct Diagnostic {
    int line = 0;
    std::string message;
};

/// Parses the element-per-line netlist format. Blank lines and lines
/// starting with '#' are skipped. Throws NetlistError on the first
/// structural problem, including a missing ground or a disconnected graph.
[[nodiscard]] CircuitDescription parse_netlist(std::string_view text);

/// Semantic checks on a structurally valid circuit: connectivity, ground,
/// parameter positivity, voltage-source-only loops and current-source-only
/// cutsets. An empty result means the circuit can be simulated.
[[nodiscard]] std::vector<Diagnostic> validate(const CircuitDescription& circuit);

/// Canonical text form; parse_netlist(to_text(c)) == c.
[[nodiscard]] std::string to_text(const CircuitDescription& circuit);

}  // namespace avgcell
