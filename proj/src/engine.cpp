#include "avgcell/engine.hpp"

#include <cmath>
#include <sstream>

namespace avgcell {

int SimConfig::n_periods() const {
    return static_cast<int>(std::llround(t_end * switching_frequency));
}

void SimConfig::validate() const {
    if (!(duty > 0.0 && duty <= 1.0)) {
        throw InvalidConfig("duty ratio must be in (0, 1]");
    }
    if (!(switching_frequency > 0.0) || !std::isfinite(switching_frequency)) {
        throw InvalidConfig("switching frequency must be positive");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end) || n_periods() < 1) {
        throw InvalidConfig("run length must cover at least one switching period");
    }
}

double SimulationResult::node_voltage(const PeriodRecord& rec, NodeId node) const {
    const int r = layout.node_row(node);
    return r < 0 ? 0.0 : rec.node_voltages.at(r);
}

namespace {

std::size_t slot_of(const CircuitDescription& circuit, const std::vector<std::size_t>& elements,
                    std::string_view label) {
    for (std::size_t s = 0; s < elements.size(); ++s) {
        if (circuit.elements[elements[s]].label() == label) {
            return s;
        }
    }
    throw UnknownLabel(std::string(label));
}

}  // namespace

std::size_t SimulationResult::cell_slot(std::string_view label) const {
    return slot_of(circuit, layout.cell_elements, label);
}

std::size_t SimulationResult::capacitor_slot(std::string_view label) const {
    return slot_of(circuit, layout.capacitor_elements, label);
}

std::size_t SimulationResult::vdc_slot(std::string_view label) const {
    return slot_of(circuit, layout.vdc_elements, label);
}

ModeResolution predict_mode(const CellParams& params, double d, double i_l0,
                            const DriveVoltages& previous_drive) {
    if (params.rectifier == Rectifier::Synchronous || i_l0 > current_tolerance(i_l0)) {
        return {ConductionMode::CCM, 1.0 - d};
    }
    double d2 = compute_d2(previous_drive.first, previous_drive.second, d);
    if (d2 < 0.0) {
        // Switch-on voltage cannot build up current; nothing for the rectifier to carry.
        d2 = 0.0;
    }
    return resolve_mode(d, d2, Rectifier::Diode);
}

PeriodStepper::PeriodStepper(const CircuitDescription& circuit, const SimConfig& config)
    : circuit_(circuit), config_(config), sys_(make_system(circuit, config.period())) {
    for (std::size_t e : sys_.layout.cell_elements) {
        cell_params_.push_back(CellParams::from_element(circuit_.elements[e]));
    }
}

void PeriodStepper::assemble(const std::vector<CellPrediction>& cells,
                             const std::vector<double>& histories) {
    sys_.clear();
    std::size_t cap = 0;
    std::size_t cell = 0;
    for (std::size_t i = 0; i < circuit_.elements.size(); ++i) {
        const auto& el = circuit_.elements[i];
        switch (el.kind) {
            case ElementKind::R:
                stamp_resistor(sys_, el);
                break;
            case ElementKind::VDC:
                stamp_vdc(sys_, el, i);
                break;
            case ElementKind::IDC:
                stamp_idc(sys_, el);
                break;
            case ElementKind::C:
                stamp_capacitor(sys_, el, histories.at(cap++));
                break;
            default:
                stamp_cell(sys_, el, i, cells.at(cell++));
                break;
        }
    }
}

void PeriodStepper::solve_assembled(int period) {
    try {
        // A only changes when some cell's d_p does; reuse the factors otherwise.
        if (!lu_ || !(sys_.a == factored_)) {
            lu_ = LuFactorization::factor(sys_.a);
            factored_ = sys_.a;
            ++factorizations_;
        }
    } catch (const SingularSystem&) {
        throw SingularSystem("singular averaged system", period);
    }
    sys_.x = lu_->solve(sys_.z);
}

PortVoltages PeriodStepper::ports(std::size_t slot) const {
    const auto& el = circuit_.elements[sys_.layout.cell_elements[slot]];
    return {sys_.voltage(el.nodes[0]), sys_.voltage(el.nodes[1]), sys_.voltage(el.nodes[2])};
}

PortVoltages PeriodStepper::ports(std::size_t slot,
                                  const std::vector<double>& node_voltages) const {
    const auto& el = circuit_.elements[sys_.layout.cell_elements[slot]];
    auto v = [&](NodeId n) {
        const int r = sys_.layout.node_row(n);
        return r < 0 ? 0.0 : node_voltages[r];
    };
    return {v(el.nodes[0]), v(el.nodes[1]), v(el.nodes[2])};
}

PeriodRecord PeriodStepper::record(int index, const std::vector<CellPrediction>& cells,
                                   const std::vector<double>& histories) const {
    const auto& layout = sys_.layout;
    const double t_s = config_.period();
    PeriodRecord rec;
    rec.index = index;
    rec.t_start = index < 0 ? 0.0 : index * t_s;
    rec.node_voltages.assign(sys_.x.begin(), sys_.x.begin() + layout.nodes.size());
    for (std::size_t e : layout.vdc_elements) {
        rec.vdc_currents.push_back(sys_.x[layout.vdc_row(e)]);
    }
    for (std::size_t s = 0; s < layout.cell_elements.size(); ++s) {
        const std::size_t e = layout.cell_elements[s];
        const auto& params = cell_params_[s];
        const auto& pred = cells[s];
        CellState st;
        st.i_l0 = pred.i_l0;
        st.mode = pred.mode;
        st.d = pred.d;
        st.d_p = pred.d_p;
        const auto drive = drive_voltages(ports(s), params);
        st.v_l1 = drive.first;
        st.v_l2 = drive.second;
        st.i_s_avg = sys_.x[layout.switch_row(e)];
        st.i_d_avg = sys_.x[layout.diode_row(e)];
        st.v_l_avg = avg_inductor_voltage(drive.first, drive.second, pred.d, pred.d_p);
        const auto cur = advance_inductor(pred.i_l0, drive, pred.d, pred.d_p, params, t_s, pred.mode);
        st.i_l1 = cur.at_switch_off;
        st.i_l2 = cur.at_period_end;
        if (pred.mode == ConductionMode::DCM) {
            st.i_l2 = 0.0;
        }
        if (params.rectifier == Rectifier::Diode && st.i_l2 < 0.0) {
            // The rectifier blocks: current cannot reverse through a diode cell.
            st.i_l2 = 0.0;
        }
        rec.cells.push_back(st);
    }
    for (std::size_t k = 0; k < layout.capacitor_elements.size(); ++k) {
        const auto& el = circuit_.elements[layout.capacitor_elements[k]];
        CapacitorRecord cr;
        cr.voltage = sys_.voltage(el.nodes[0]) - sys_.voltage(el.nodes[1]);
        cr.history = histories[k];
        cr.next_history = next_history_current(el.value, t_s, cr.voltage, cr.history);
        rec.capacitors.push_back(cr);
    }
    return rec;
}

PeriodRecord PeriodStepper::bootstrap() {
    const double d = config_.duty;
    const double t_s = config_.period();
    std::vector<CellPrediction> cells;
    for (std::size_t e : sys_.layout.cell_elements) {
        cells.push_back({d, 1.0 - d, ConductionMode::CCM, circuit_.elements[e].initial});
    }
    std::vector<double> histories;
    for (std::size_t e : sys_.layout.capacitor_elements) {
        const auto& el = circuit_.elements[e];
        // Zero capacitor current assumed at t = 0.
        histories.push_back(capacitor_conductance(el.value, t_s) * el.initial);
    }
    assemble(cells, histories);
    solve_assembled(-1);
    PeriodRecord rec = record(-1, cells, histories);
    for (std::size_t s = 0; s < rec.cells.size(); ++s) {
        auto& st = rec.cells[s];
        st.i_l1 = st.i_l0;
        st.i_l2 = st.i_l0;
    }
    for (std::size_t k = 0; k < rec.capacitors.size(); ++k) {
        auto& cr = rec.capacitors[k];
        cr.voltage = circuit_.elements[sys_.layout.capacitor_elements[k]].initial;
        cr.next_history = histories[k];
    }
    return rec;
}

PeriodRecord PeriodStepper::step(const PeriodRecord& previous) {
    const double d = config_.duty;
    const int index = previous.index + 1;
    std::vector<CellPrediction> cells;
    for (std::size_t s = 0; s < cell_params_.size(); ++s) {
        const auto& params = cell_params_[s];
        const double i_l0 = previous.cells[s].i_l2;
        const auto prev_drive = drive_voltages(ports(s, previous.node_voltages), params);
        const auto mode = predict_mode(params, d, i_l0, prev_drive);
        cells.push_back({d, mode.d_p, mode.mode, i_l0});
    }
    std::vector<double> histories;
    for (const auto& cr : previous.capacitors) {
        histories.push_back(cr.next_history);
    }

    assemble(cells, histories);
    solve_assembled(index);

    if (config_.dcm_refine) {
        bool changed = false;
        for (std::size_t s = 0; s < cell_params_.size(); ++s) {
            const auto& params = cell_params_[s];
            const double i_l0 = previous.cells[s].i_l2;
            if (params.rectifier != Rectifier::Diode || i_l0 > current_tolerance(i_l0)) {
                continue;
            }
            const auto mode = predict_mode(params, d, i_l0, drive_voltages(ports(s), params));
            if (mode.mode != cells[s].mode || mode.d_p != cells[s].d_p) {
                cells[s] = {d, mode.d_p, mode.mode, i_l0};
                changed = true;
            }
        }
        if (changed) {
            assemble(cells, histories);
            solve_assembled(index);
        }
    }
    return record(index, cells, histories);
}

void require_simulable(const CircuitDescription& circuit) {
    auto diags = validate(circuit);
    if (!diags.empty()) {
        std::ostringstream os;
        os << "circuit is not valid:";
        for (const auto& dg : diags) {
            os << "\n  ";
            if (dg.line > 0) {
                os << "line " << dg.line << ": ";
            }
            os << dg.message;
        }
        throw InvalidCircuit(os.str());
    }
    if (circuit.cell_count() == 0) {
        throw InvalidCircuit("circuit has no switching cell");
    }
}

SimulationResult run(const CircuitDescription& circuit, const SimConfig& config) {
    config.validate();
    require_simulable(circuit);

    SimulationResult result;
    result.config = config;
    result.circuit = circuit;
    result.layout = build_layout(circuit);

    PeriodStepper stepper(circuit, config);
    result.initial = stepper.bootstrap();
    const int n = config.n_periods();
    result.periods.reserve(n);
    const PeriodRecord* prev = &result.initial;
    for (int i = 0; i < n; ++i) {
        result.periods.push_back(stepper.step(*prev));
        prev = &result.periods.back();
    }
    return result;
}

}  // namespace avgcell
