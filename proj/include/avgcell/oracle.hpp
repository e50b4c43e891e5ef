#pragma once

#include "avgcell/engine.hpp"
#include "avgcell/netlist.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace avgcell {

struct OracleConfig {
    int substeps_per_period = 1000;

    /// Throws InvalidConfig below 100 substeps.
    void validate() const;
};

/// Uniformly sampled signal; sample k is at t = k * dt.
struct SampledWaveform {
    std::string name;
    double dt = 0.0;
    int substeps_per_period = 0;
    std::vector<double> samples;

    [[nodiscard]] int periods() const {
        return substeps_per_period == 0
                   ? 0
                   : static_cast<int>((samples.size() - 1) / substeps_per_period);
    }
};

struct OracleResult {
    SimConfig config;
    OracleConfig oracle;
    std::vector<SampledWaveform> signals;

    /// Throws UnknownLabel for names not produced by the run.
    [[nodiscard]] const SampledWaveform& signal(std::string_view name) const;
};

/// Reference simulation of the switched circuit with ideal switches.
///
/// Each period the switch conducts on [0, dT_s) and the rectifier path on
/// [dT_s, T_s). The network is re-stamped on every topology change and
/// integrated with fixed-step trapezoidal rule; the first step after a
/// change is backward Euler so no history from the old topology leaks in.
/// Diode cells open when their current crosses zero (located by linear
/// interpolation inside the substep) and reconduct when the path voltage
/// turns positive.
///
/// Signals: v(<node>) for non-ground nodes, i(<VDC>), iL(<cell>) (primary
/// referred for flyback cells), vC(<capacitor>).
[[nodiscard]] OracleResult simulate_switched(const CircuitDescription& circuit,
                                             const SimConfig& config,
                                             const OracleConfig& oracle = {});

/// Trapezoidal mean of the samples covering period n (0-based).
[[nodiscard]] double period_average(const SampledWaveform& sampled, int n);

}  // namespace avgcell
