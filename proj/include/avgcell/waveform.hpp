#pragma once

#include "avgcell/cells.hpp"
#include "avgcell/engine.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace avgcell {

/// Polynomial piece c0 + c1*s + c2*s^2 with local time s = t - t_start.
struct Segment {
    double t_start = 0.0;
    double t_end = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    [[nodiscard]] double at(double t) const {
        const double s = t - t_start;
        return c0 + (c1 + c2 * s) * s;
    }
    [[nodiscard]] bool is_quadratic() const noexcept { return c2 != 0.0; }
};

struct Waveform {
    std::string name;
    std::string unit;
    std::vector<Segment> segments;

    [[nodiscard]] bool empty() const noexcept { return segments.empty(); }
    [[nodiscard]] double t_begin() const { return segments.front().t_start; }
    [[nodiscard]] double t_end() const { return segments.back().t_end; }
    /// Value at t, clamped to the span.
    [[nodiscard]] double value(double t) const;

    /// Append a line from (t0, v0) to (t1, v1); zero-length pieces are dropped.
    void add_line(double t0, double v0, double t1, double v1);
};

/// Ripple half-amplitudes of one period.
struct RippleModel {
    double delta_i_l1 = 0.0;
    double delta_i_l2 = 0.0;
    double delta_i_l = 0.0;
};

struct SignalStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double rms = 0.0;
};

/// Piecewise-linear inductor current through the period breakpoints
/// (0, dT_s, T_s in CCM; 0, dT_s, (d + d_p)T_s, T_s in DCM). Throws UnknownLabel.
[[nodiscard]] Waveform inductor_waveform(const SimulationResult& result, std::string_view cell);

/// Throws NotApplicable for DCM periods.
[[nodiscard]] RippleModel ripple_amplitude(const CellState& cell);

/// Capacitor voltage at the start of a period whose average is v_avg.
[[nodiscard]] double capacitor_start_voltage(double v_avg, double d, double delta_i_l,
                                             double f_s, double capacitance);

/// Ripple about the period-start voltage at normalized time tau in [0, 1].
[[nodiscard]] double capacitor_ripple(double tau, double d, double delta_i_l, double f_s,
                                      double capacitance);

/// Output capacitor of a buck-type stage: sits across the common and
/// passive terminals of a basic cell whose common node carries nothing
/// but loads. Returns the cell label and +1 or -1 for the capacitor's
/// orientation. Throws TopologyNotSupported otherwise, UnknownLabel for
/// an unknown capacitor.
struct OutputStage {
    std::string cell;
    double sign = 1.0;
};
[[nodiscard]] OutputStage buck_output_stage(const CircuitDescription& circuit,
                                            std::string_view capacitor);

/// Capacitor voltage with the linear-ripple reconstruction superimposed on
/// the interpolated averages. DCM periods carry no ripple.
/// Throws UnknownLabel or TopologyNotSupported.
[[nodiscard]] Waveform capacitor_waveform(const SimulationResult& result,
                                          std::string_view capacitor);

/// Capacitor averages joined linearly through the period midpoints; what
/// is emitted for capacitors outside a buck-type output stage.
[[nodiscard]] Waveform averaged_capacitor_waveform(const SimulationResult& result,
                                                   std::string_view capacitor);

/// Exact statistics of the waveform over [t_from, t_to]. Throws EmptyWindow
/// when the window is empty or misses the waveform.
[[nodiscard]] SignalStats stats(const Waveform& waveform, double t_from, double t_to);

}  // namespace avgcell
