#include "avgcell/cells.hpp"

#include <cmath>

namespace avgcell {

CellParams CellParams::from_element(const Element& el) {
    if (!is_cell(el.kind)) {
        throw Error(el.label() + " is not a switching cell");
    }
    CellParams p;
    p.inductance = el.value;
    p.family = is_flyback(el.kind) ? CellFamily::Flyback : CellFamily::Basic;
    p.turns = p.family == CellFamily::Flyback ? el.turns : 1.0;
    p.rectifier = has_diode(el.kind) ? Rectifier::Diode : Rectifier::Synchronous;
    return p;
}

CellIncidence cell_incidence(const Element& cell) {
    const NodeId a = cell.nodes.at(0);
    const NodeId p = cell.nodes.at(1);
    const NodeId c = cell.nodes.at(2);
    if (is_flyback(cell.kind)) {
        const double inv_n = 1.0 / cell.turns;
        return {{{{a, 1.0}, {p, -1.0}}}, {{{p, inv_n}, {c, -inv_n}}}};
    }
    return {{{{a, 1.0}, {c, -1.0}}}, {{{p, 1.0}, {c, -1.0}}}};
}

DriveVoltages drive_voltages(const PortVoltages& ports, const CellParams& params) {
    if (params.family == CellFamily::Flyback) {
        return {ports.active - ports.passive, -(ports.common - ports.passive) / params.turns};
    }
    return {ports.active - ports.common, ports.passive - ports.common};
}

double compute_d2(double v_l1, double v_l2, double d) {
    if (v_l2 >= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -(v_l1 / v_l2) * d;
}

ModeResolution resolve_mode(double d, double d2, Rectifier rectifier) {
    if (rectifier == Rectifier::Synchronous || d + d2 >= 1.0) {
        return {ConductionMode::CCM, 1.0 - d};
    }
    return {ConductionMode::DCM, d2};
}

double avg_switch_current(double i_l0, double v_l1, double d, const CellParams& params,
                          double t_s) {
    return d * i_l0 + v_l1 / (2.0 * params.inductance) * d * d * t_s;
}

double avg_diode_current(double i_l0, const DriveVoltages& drive, double d, double d_p,
                         const CellParams& params, double t_s) {
    const double l = params.inductance;
    const double magnetizing = d_p * i_l0 + drive.first / l * d_p * d * t_s +
                               drive.second / (2.0 * l) * d_p * d_p * t_s;
    return magnetizing / params.turns;
}

InductorCurrents advance_inductor(double i_l0, const DriveVoltages& drive, double d, double d_p,
                                  const CellParams& params, double t_s, ConductionMode mode) {
    const double i_l1 = i_l0 + drive.first / params.inductance * d * t_s;
    double i_l2 = i_l1 + drive.second / params.inductance * d_p * t_s;
    if (mode == ConductionMode::DCM && std::abs(i_l2) < current_tolerance(i_l1)) {
        i_l2 = 0.0;
    }
    return {i_l1, i_l2};
}

double end_current_from_averages(double i_s_avg, double i_d_avg, double i_l0, double d,
                                 double d_p, const CellParams& params) {
    const double i_d = i_d_avg * params.turns;
    if (d < kDutyTolerance && d_p < kDutyTolerance) {
        throw DegenerateDuty("both switching intervals vanish");
    }
    if (d >= 1.0 - kDutyTolerance) {
        return 2.0 * i_s_avg - i_l0;
    }
    if (d_p >= 1.0 - kDutyTolerance) {
        return 2.0 * i_d - i_l0;
    }
    if (d_p < kDutyTolerance) {
        // Rectifier interval empty: the current holds i_L1.
        return 2.0 * i_s_avg / d - i_l0;
    }
    if (d < kDutyTolerance) {
        return 2.0 * i_d / d_p - i_l0;
    }
    return 2.0 * i_d / d_p - 2.0 * i_s_avg / d + i_l0;
}

double avg_inductor_voltage(double v_l1, double v_l2, double d, double d_p) {
    return d * v_l1 + d_p * v_l2;
}

}  // namespace avgcell
