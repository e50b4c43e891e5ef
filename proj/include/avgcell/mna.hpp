#pragma once

#include "avgcell/cells.hpp"
#include "avgcell/dense.hpp"
#include "avgcell/netlist.hpp"

#include <map>
#include <vector>

namespace avgcell {

/// Row assignment of the averaged system: node voltages in ascending id
/// order, then VDC branch currents in netlist order, then one (i_S, i_D)
/// pair per switching cell in netlist order.
struct MnaLayout {
    std::vector<NodeId> nodes;
    std::vector<std::size_t> vdc_elements;
    std::vector<std::size_t> cell_elements;
    std::vector<std::size_t> capacitor_elements;
    std::map<NodeId, int> node_rows;
    std::vector<int> element_rows;  // per element: VDC branch row or cell i_S row, else -1
    int order = 0;

    /// -1 for ground.
    [[nodiscard]] int node_row(NodeId node) const;
    [[nodiscard]] int vdc_row(std::size_t element) const { return element_rows.at(element); }
    [[nodiscard]] int switch_row(std::size_t element) const { return element_rows.at(element); }
    [[nodiscard]] int diode_row(std::size_t element) const { return element_rows.at(element) + 1; }
};

/// Trapezoidal companion conductance 2C/T_s.
[[nodiscard]] inline double capacitor_conductance(double capacitance, double t_s) {
    return 2.0 * capacitance / t_s;
}

/// T_s/L, the per-period inductor gain used in the cell rows.
[[nodiscard]] inline double cell_gain(double inductance, double t_s) { return t_s / inductance; }

/// History source for the next period: i0[n+1] = (4C/T_s) v[n] - i0[n].
[[nodiscard]] inline double next_history_current(double capacitance, double t_s, double voltage,
                                                 double history) {
    return 4.0 * capacitance / t_s * voltage - history;
}

struct MnaSystem {
    MnaLayout layout;
    double t_s = 0.0;
    DenseMatrix a;
    std::vector<double> z;
    std::vector<double> x;

    [[nodiscard]] int order() const noexcept { return layout.order; }
    /// Zero A, z and x, keeping the layout.
    void clear();
    /// Solved node voltage, 0 for ground.
    [[nodiscard]] double voltage(NodeId node) const;
};

/// Per-period cell geometry decided before assembly.
struct CellPrediction {
    double d = 0.0;
    double d_p = 0.0;
    ConductionMode mode = ConductionMode::CCM;
    double i_l0 = 0.0;
};

[[nodiscard]] MnaLayout build_layout(const CircuitDescription& circuit);
[[nodiscard]] MnaSystem make_system(const CircuitDescription& circuit, double t_s);

void stamp_resistor(MnaSystem& sys, const Element& el);
void stamp_vdc(MnaSystem& sys, const Element& el, std::size_t element_index);
void stamp_idc(MnaSystem& sys, const Element& el);
/// G_C = 2C/T_s between the terminals and +i0 injected at the first node.
void stamp_capacitor(MnaSystem& sys, const Element& el, double history_current);
/// Rows for the averaged switch and rectifier currents of one cell.
void stamp_cell(MnaSystem& sys, const Element& el, std::size_t element_index,
                const CellPrediction& prediction);

/// Factor and solve A x = z in place; returns x.
const std::vector<double>& solve(MnaSystem& sys);

}  // namespace avgcell
