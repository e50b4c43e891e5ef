#include "avgcell/mna.hpp"

#include <algorithm>

namespace avgcell {

namespace {

void add(MnaSystem& sys, int row, int col, double v) {
    if (row >= 0 && col >= 0) {
        sys.a(row, col) += v;
    }
}

void add_rhs(MnaSystem& sys, int row, double v) {
    if (row >= 0) {
        sys.z[row] += v;
    }
}

void stamp_conductance(MnaSystem& sys, NodeId n1, NodeId n2, double g) {
    const int r1 = sys.layout.node_row(n1);
    const int r2 = sys.layout.node_row(n2);
    add(sys, r1, r1, g);
    add(sys, r2, r2, g);
    add(sys, r1, r2, -g);
    add(sys, r2, r1, -g);
}

}  // namespace

int MnaLayout::node_row(NodeId node) const {
    if (node == kGround) {
        return -1;
    }
    return node_rows.at(node);
}

MnaLayout build_layout(const CircuitDescription& circuit) {
    MnaLayout layout;
    for (NodeId n : circuit.node_ids) {
        if (n != kGround) {
            layout.node_rows[n] = static_cast<int>(layout.nodes.size());
            layout.nodes.push_back(n);
        }
    }
    layout.element_rows.assign(circuit.elements.size(), -1);
    int row = static_cast<int>(layout.nodes.size());
    for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
        const auto kind = circuit.elements[i].kind;
        if (kind == ElementKind::VDC) {
            layout.vdc_elements.push_back(i);
            layout.element_rows[i] = row++;
        } else if (kind == ElementKind::C) {
            layout.capacitor_elements.push_back(i);
        }
    }
    for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
        if (is_cell(circuit.elements[i].kind)) {
            layout.cell_elements.push_back(i);
            layout.element_rows[i] = row;
            row += 2;
        }
    }
    layout.order = row;
    return layout;
}

MnaSystem make_system(const CircuitDescription& circuit, double t_s) {
    MnaSystem sys;
    sys.layout = build_layout(circuit);
    sys.t_s = t_s;
    sys.a = DenseMatrix(sys.layout.order, sys.layout.order);
    sys.z.assign(sys.layout.order, 0.0);
    sys.x.assign(sys.layout.order, 0.0);
    return sys;
}

void MnaSystem::clear() {
    a.fill(0.0);
    std::fill(z.begin(), z.end(), 0.0);
    std::fill(x.begin(), x.end(), 0.0);
}

double MnaSystem::voltage(NodeId node) const {
    const int r = layout.node_row(node);
    return r < 0 ? 0.0 : x[r];
}

void stamp_resistor(MnaSystem& sys, const Element& el) {
    stamp_conductance(sys, el.nodes[0], el.nodes[1], 1.0 / el.value);
}

void stamp_vdc(MnaSystem& sys, const Element& el, std::size_t element_index) {
    const int br = sys.layout.vdc_row(element_index);
    const int rp = sys.layout.node_row(el.nodes[0]);
    const int rn = sys.layout.node_row(el.nodes[1]);
    add(sys, rp, br, 1.0);
    add(sys, rn, br, -1.0);
    add(sys, br, rp, 1.0);
    add(sys, br, rn, -1.0);
    sys.z[br] += el.value;
}

void stamp_idc(MnaSystem& sys, const Element& el) {
    add_rhs(sys, sys.layout.node_row(el.nodes[0]), -el.value);
    add_rhs(sys, sys.layout.node_row(el.nodes[1]), el.value);
}

void stamp_capacitor(MnaSystem& sys, const Element& el, double history_current) {
    stamp_conductance(sys, el.nodes[0], el.nodes[1], capacitor_conductance(el.value, sys.t_s));
    add_rhs(sys, sys.layout.node_row(el.nodes[0]), history_current);
    add_rhs(sys, sys.layout.node_row(el.nodes[1]), -history_current);
}

void stamp_cell(MnaSystem& sys, const Element& el, std::size_t element_index,
                const CellPrediction& pred) {
    const int rs = sys.layout.switch_row(element_index);
    const int rd = sys.layout.diode_row(element_index);
    const auto inc = cell_incidence(el);
    const double g = cell_gain(el.value, sys.t_s);
    const double d = pred.d;
    const double dp = pred.d_p;
    // Rectifier row is written for the secondary current: the magnetizing average over n.
    const double inv_n = is_flyback(el.kind) ? 1.0 / el.turns : 1.0;

    // i_S - (d^2 G_L / 2) V_L1 = d i_L0
    sys.a(rs, rs) += 1.0;
    for (const auto& t : inc.first) {
        add(sys, rs, sys.layout.node_row(t.node), -0.5 * d * d * g * t.weight);
    }
    sys.z[rs] += d * pred.i_l0;

    // i_D - (d d_p G_L V_L1 + (d_p^2 G_L / 2) V_L2) / n = d_p i_L0 / n
    sys.a(rd, rd) += 1.0;
    for (const auto& t : inc.first) {
        add(sys, rd, sys.layout.node_row(t.node), -d * dp * g * t.weight * inv_n);
    }
    for (const auto& t : inc.second) {
        add(sys, rd, sys.layout.node_row(t.node), -0.5 * dp * dp * g * t.weight * inv_n);
    }
    sys.z[rd] += dp * pred.i_l0 * inv_n;

    // KCL: i_S along the switch path; the secondary current along the
    // rectifier path (weights scaled back by n).
    for (const auto& t : inc.first) {
        add(sys, sys.layout.node_row(t.node), rs, t.weight);
    }
    for (const auto& t : inc.second) {
        add(sys, sys.layout.node_row(t.node), rd, t.weight / inv_n);
    }
}

const std::vector<double>& solve(MnaSystem& sys) {
    sys.x = LuFactorization::factor(sys.a).solve(sys.z);
    return sys.x;
}

}  // namespace avgcell
