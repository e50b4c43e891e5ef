#pragma once

#include "avgcell/netlist.hpp"

#include <array>
#include <limits>

namespace avgcell {

enum class Rectifier { Synchronous, Diode };
enum class CellFamily { Basic, Flyback };
enum class ConductionMode { CCM, DCM };

/// Degenerate duty threshold.
inline constexpr double kDutyTolerance = 1e-12;

/// Absolute current tolerance used for DCM end-current clamping and for
/// deciding that an inductor current "is zero".
[[nodiscard]] inline double current_tolerance(double reference_current) {
    const double mag = reference_current < 0 ? -reference_current : reference_current;
    return 1e-12 * (mag > 1.0 ? mag : 1.0);
}

struct CellParams {
    double inductance = 0.0;  // L, or the magnetizing inductance for flyback cells
    double turns = 1.0;       // secondary/primary ratio, exactly 1 for basic cells
    Rectifier rectifier = Rectifier::Synchronous;
    CellFamily family = CellFamily::Basic;

    [[nodiscard]] static CellParams from_element(const Element& el);
};

/// Averaged node voltages at the active, passive and common terminals.
struct PortVoltages {
    double active = 0.0;
    double passive = 0.0;
    double common = 0.0;
};

/// Inductor voltage during the switch-on interval (first) and the
/// rectifier interval (second). Flyback values are primary referred.
struct DriveVoltages {
    double first = 0.0;
    double second = 0.0;
};

struct InductorCurrents {
    double at_switch_off = 0.0;  // i_L1
    double at_period_end = 0.0;  // i_L2
};

struct ModeResolution {
    ConductionMode mode = ConductionMode::CCM;
    double d_p = 0.0;
};

/// Per-cell solution of one switching period.
struct CellState {
    double i_l0 = 0.0;
    double i_l1 = 0.0;
    double i_l2 = 0.0;
    ConductionMode mode = ConductionMode::CCM;
    double d = 0.0;
    double d_p = 0.0;
    double v_l1 = 0.0;
    double v_l2 = 0.0;
    double i_s_avg = 0.0;
    double i_d_avg = 0.0;  // secondary side for flyback cells
    double v_l_avg = 0.0;

    /// Period average of the piecewise-linear (magnetizing) inductor current.
    [[nodiscard]] double inductor_current_avg() const {
        return 0.5 * d * (i_l0 + i_l1) + 0.5 * d_p * (i_l1 + i_l2);
    }
};

/// Node weights of a cell conduction path. The same weights give the
/// inductor voltage (sum of weight * node voltage) and the node injection
/// of the path current, so the cell is power consistent.
struct TerminalWeight {
    NodeId node = kGround;
    double weight = 0.0;
};
using PathIncidence = std::array<TerminalWeight, 2>;

struct CellIncidence {
    PathIncidence first;   // switch-on path
    PathIncidence second;  // rectifier path, primary referred
};

[[nodiscard]] CellIncidence cell_incidence(const Element& cell);

[[nodiscard]] DriveVoltages drive_voltages(const PortVoltages& ports, const CellParams& params);

/// Diode conduction fraction in DCM. Returns +infinity when the second
/// interval voltage cannot bring the current back to zero (V_L2 >= 0),
/// which forces CCM.
[[nodiscard]] double compute_d2(double v_l1, double v_l2, double d);

[[nodiscard]] inline bool is_ccm_forced(double d2) {
    return d2 == std::numeric_limits<double>::infinity();
}

/// Boundary d + d2 == 1 counts as CCM.
[[nodiscard]] ModeResolution resolve_mode(double d, double d2, Rectifier rectifier);

[[nodiscard]] double avg_switch_current(double i_l0, double v_l1, double d,
                                        const CellParams& params, double t_s);

/// Secondary-side current for flyback cells (magnetizing average over n).
[[nodiscard]] double avg_diode_current(double i_l0, const DriveVoltages& drive, double d,
                                       double d_p, const CellParams& params, double t_s);

/// Inductor current at t = dT_s and at the end of the period. With mode ==
/// DCM an end current smaller than the tolerance is returned as exactly 0.
[[nodiscard]] InductorCurrents advance_inductor(double i_l0, const DriveVoltages& drive,
                                                double d, double d_p, const CellParams& params,
                                                double t_s,
                                                ConductionMode mode = ConductionMode::CCM);

/// End-of-period current recovered from the interval averages. For flyback
/// cells `i_d_avg` is the secondary current and is reflected back by n.
[[nodiscard]] double end_current_from_averages(double i_s_avg, double i_d_avg, double i_l0,
                                               double d, double d_p,
                                               const CellParams& params = {});

[[nodiscard]] double avg_inductor_voltage(double v_l1, double v_l2, double d, double d_p);

}  // namespace avgcell
