#pragma once

#include "avgcell/engine.hpp"
#include "avgcell/oracle.hpp"
#include "avgcell/signals.hpp"
#include "avgcell/waveform.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace avgcell {

/// Reconstructed signal plus whether it only carries interpolated averages.
struct Reconstruction {
    Waveform waveform;
    bool averages_only = false;
};

/// iL(<cell>) for every cell, vC(<capacitor>) for every capacitor. Capacitors
/// outside a buck-type output stage fall back to interpolated averages.
[[nodiscard]] std::vector<Reconstruction> reconstruct(const SimulationResult& result);

/// Per-period averaged values of a named signal, one per record (initial
/// state excluded). Throws UnknownLabel.
[[nodiscard]] std::vector<double> period_series(const SimulationResult& result,
                                                std::string_view signal);

/// Names of the per-period signals, in column order: v(<node>), i(<VDC>),
/// iL(<cell>), vC(<capacitor>).
[[nodiscard]] std::vector<std::string> period_signals(const SimulationResult& result);

/// Column headers of averaged.csv after the n and t_start columns.
[[nodiscard]] std::vector<std::string> averaged_columns(const SimulationResult& result);

void write_averaged_csv(std::ostream& os, const SimulationResult& result,
                        const SignalFilter& filter);
void write_instantaneous_csv(std::ostream& os, const std::vector<Reconstruction>& signals,
                             const SignalFilter& filter);
/// Statistics over [t_from, t_end]: reconstructed signals exactly, node
/// voltages and VDC currents as per-period staircases.
void write_stats(std::ostream& os, const SimulationResult& result,
                 const std::vector<Reconstruction>& signals, double t_from,
                 const SignalFilter& filter);
void write_oracle_csv(std::ostream& os, const OracleResult& oracle, const SignalFilter& filter);

/// Deviation of the averaged engine from the oracle for one signal.
/// Differences are scaled by max(|oracle value|, |oracle steady-state mean|)
/// so signals passing through zero stay comparable.
struct Deviation {
    std::string signal;
    double engine_mean = 0.0;   // over the steady-state window
    double oracle_mean = 0.0;
    double transient = 0.0;     // max scaled deviation, first_period .. window start
    double steady_state = 0.0;  // max scaled deviation inside the window
};

/// Periods [window_start, end) form the steady-state window.
[[nodiscard]] Deviation compare_signal(const SimulationResult& result, const OracleResult& oracle,
                                       std::string_view signal, int first_period,
                                       int window_start);

void write_compare(std::ostream& os, const std::vector<Deviation>& deviations);

}  // namespace avgcell
