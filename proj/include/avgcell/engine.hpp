#pragma once

#include "avgcell/cells.hpp"
#include "avgcell/mna.hpp"
#include "avgcell/netlist.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace avgcell {

struct SimConfig {
    double duty = 0.5;
    double switching_frequency = 100e3;
    double t_end = 5e-3;
    /// Re-solve DCM periods once with d2 taken from the period's own
    /// voltages instead of the previous period's.
    bool dcm_refine = false;

    [[nodiscard]] double period() const { return 1.0 / switching_frequency; }
    [[nodiscard]] int n_periods() const;
    /// Throws InvalidConfig unless 0 < duty <= 1, fs > 0 and at least one period.
    void validate() const;
};

struct CapacitorRecord {
    double voltage = 0.0;       // averaged v over the period
    double history = 0.0;       // i0 stamped this period
    double next_history = 0.0;  // i0 for the next period
};

/// Averaged solution of one switching period [t_start, t_start + T_s).
/// Vectors follow the MnaLayout ordering of nodes, VDCs, cells and
/// capacitors.
struct PeriodRecord {
    int index = 0;
    double t_start = 0.0;
    std::vector<double> node_voltages;
    std::vector<double> vdc_currents;
    std::vector<CellState> cells;
    std::vector<CapacitorRecord> capacitors;
};

struct SimulationResult {
    SimConfig config;
    CircuitDescription circuit;
    MnaLayout layout;
    /// State at t = 0 (index -1): initial currents and capacitor voltages,
    /// node voltages from the bootstrap CCM solve.
    PeriodRecord initial;
    std::vector<PeriodRecord> periods;

    [[nodiscard]] double node_voltage(const PeriodRecord& rec, NodeId node) const;
    [[nodiscard]] std::size_t cell_slot(std::string_view label) const;
    [[nodiscard]] std::size_t capacitor_slot(std::string_view label) const;
    [[nodiscard]] std::size_t vdc_slot(std::string_view label) const;
};

/// Mode and rectifier duty for the coming period from the previous period's
/// drive voltages. A diode cell whose current has not returned to zero
/// keeps the CCM geometry.
[[nodiscard]] ModeResolution predict_mode(const CellParams& params, double d, double i_l0,
                                          const DriveVoltages& previous_drive);

/// Advances the averaged circuit one switching period at a time. Keeps the
/// LU factorization while the cell geometry is unchanged.
class PeriodStepper {
public:
    PeriodStepper(const CircuitDescription& circuit, const SimConfig& config);

    /// One CCM solve on the initial conditions; supplies the voltages the
    /// first mode prediction needs.
    [[nodiscard]] PeriodRecord bootstrap();
    [[nodiscard]] PeriodRecord step(const PeriodRecord& previous);

    [[nodiscard]] const MnaSystem& system() const noexcept { return sys_; }
    [[nodiscard]] int factorizations() const noexcept { return factorizations_; }

    /// Assemble A and z for the given cell predictions and capacitor history
    /// currents (layout order) without solving.
    void assemble(const std::vector<CellPrediction>& cells, const std::vector<double>& histories);

private:
    void solve_assembled(int period);
    [[nodiscard]] PortVoltages ports(std::size_t cell_slot) const;
    [[nodiscard]] PortVoltages ports(std::size_t cell_slot,
                                     const std::vector<double>& node_voltages) const;
    [[nodiscard]] PeriodRecord record(int index, const std::vector<CellPrediction>& cells,
                                      const std::vector<double>& histories) const;

    CircuitDescription circuit_;
    SimConfig config_;
    MnaSystem sys_;
    std::vector<CellParams> cell_params_;
    std::optional<LuFactorization> lu_;
    DenseMatrix factored_;
    int factorizations_ = 0;
};

/// Throws InvalidCircuit when validate() reports anything or the circuit
/// has no switching cell.
void require_simulable(const CircuitDescription& circuit);

/// Full averaged run: config.n_periods() records. Throws InvalidCircuit for
/// circuits failing validate() or without a switching cell.
[[nodiscard]] SimulationResult run(const CircuitDescription& circuit, const SimConfig& config);

}  // namespace avgcell
