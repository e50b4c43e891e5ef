#include "avgcell/report.hpp"

#include "avgcell/format.hpp"

#include <algorithm>
#include <cmath>

namespace avgcell {

std::vector<Reconstruction> reconstruct(const SimulationResult& result) {
    std::vector<Reconstruction> out;
    for (std::size_t e : result.layout.cell_elements) {
        out.push_back({inductor_waveform(result, result.circuit.elements[e].label()), false});
    }
    for (std::size_t e : result.layout.capacitor_elements) {
        const std::string label = result.circuit.elements[e].label();
        try {
            out.push_back({capacitor_waveform(result, label), false});
        } catch (const TopologyNotSupported&) {
            out.push_back({averaged_capacitor_waveform(result, label), true});
        }
    }
    return out;
}

std::vector<std::string> period_signals(const SimulationResult& result) {
    std::vector<std::string> names;
    for (NodeId n : result.layout.nodes) {
        names.push_back(node_signal(n));
    }
    for (std::size_t e : result.layout.vdc_elements) {
        names.push_back(branch_signal(result.circuit.elements[e].label()));
    }
    for (std::size_t e : result.layout.cell_elements) {
        names.push_back(inductor_signal(result.circuit.elements[e].label()));
    }
    for (std::size_t e : result.layout.capacitor_elements) {
        names.push_back(capacitor_signal(result.circuit.elements[e].label()));
    }
    return names;
}

std::vector<double> period_series(const SimulationResult& result, std::string_view signal) {
    const auto& layout = result.layout;
    std::vector<double> out;
    out.reserve(result.periods.size());
    auto each = [&](auto&& f) {
        for (const auto& rec : result.periods) {
            out.push_back(f(rec));
        }
        return out;
    };
    for (std::size_t r = 0; r < layout.nodes.size(); ++r) {
        if (signal == node_signal(layout.nodes[r])) {
            return each([r](const PeriodRecord& p) { return p.node_voltages[r]; });
        }
    }
    for (std::size_t s = 0; s < layout.vdc_elements.size(); ++s) {
        if (signal == branch_signal(result.circuit.elements[layout.vdc_elements[s]].label())) {
            return each([s](const PeriodRecord& p) { return p.vdc_currents[s]; });
        }
    }
    for (std::size_t s = 0; s < layout.cell_elements.size(); ++s) {
        if (signal == inductor_signal(result.circuit.elements[layout.cell_elements[s]].label())) {
            return each([s](const PeriodRecord& p) { return p.cells[s].inductor_current_avg(); });
        }
    }
    for (std::size_t s = 0; s < layout.capacitor_elements.size(); ++s) {
        if (signal ==
            capacitor_signal(result.circuit.elements[layout.capacitor_elements[s]].label())) {
            return each([s](const PeriodRecord& p) { return p.capacitors[s].voltage; });
        }
    }
    throw UnknownLabel(std::string(signal));
}

std::vector<std::string> averaged_columns(const SimulationResult& result) {
    std::vector<std::string> cols;
    for (NodeId n : result.layout.nodes) {
        cols.push_back(node_signal(n));
    }
    for (std::size_t e : result.layout.vdc_elements) {
        cols.push_back(branch_signal(result.circuit.elements[e].label()));
    }
    for (std::size_t e : result.layout.cell_elements) {
        const std::string l = result.circuit.elements[e].label();
        for (const char* q : {"iS_avg", "iD_avg", "iL0", "iL2", "mode", "d_p"}) {
            cols.push_back(std::string(q) + "(" + l + ")");
        }
    }
    return cols;
}

void write_averaged_csv(std::ostream& os, const SimulationResult& result,
                        const SignalFilter& filter) {
    const auto cols = averaged_columns(result);
    std::vector<bool> keep;
    os << "n,t_start";
    for (const auto& c : cols) {
        keep.push_back(filter.matches(c));
        if (keep.back()) {
            os << ',' << c;
        }
    }
    os << '\n';

    auto row = [&](const PeriodRecord& rec) {
        std::vector<std::string> v;
        v.reserve(cols.size());
        for (double x : rec.node_voltages) {
            v.push_back(format_g17(x));
        }
        for (double x : rec.vdc_currents) {
            v.push_back(format_g17(x));
        }
        for (const auto& st : rec.cells) {
            v.push_back(format_g17(st.i_s_avg));
            v.push_back(format_g17(st.i_d_avg));
            v.push_back(format_g17(st.i_l0));
            v.push_back(format_g17(st.i_l2));
            v.push_back(st.mode == ConductionMode::DCM ? "1" : "0");
            v.push_back(format_g17(st.d_p));
        }
        os << rec.index << ',' << format_g17(rec.t_start);
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (keep[k]) {
                os << ',' << v[k];
            }
        }
        os << '\n';
    };
    row(result.initial);
    for (const auto& rec : result.periods) {
        row(rec);
    }
}

void write_instantaneous_csv(std::ostream& os, const std::vector<Reconstruction>& signals,
                             const SignalFilter& filter) {
    std::vector<const Reconstruction*> chosen;
    for (const auto& s : signals) {
        if (filter.matches(s.waveform.name)) {
            chosen.push_back(&s);
        }
    }
    std::vector<double> times;
    for (const auto* s : chosen) {
        for (const auto& seg : s->waveform.segments) {
            times.push_back(seg.t_start);
            times.push_back(seg.t_end);
            if (seg.is_quadratic()) {
                const double h = seg.t_end - seg.t_start;
                for (double f : {0.25, 0.5, 0.75}) {
                    times.push_back(seg.t_start + f * h);
                }
            }
        }
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    os << 't';
    for (const auto* s : chosen) {
        os << ',' << s->waveform.name;
        if (s->averages_only) {
            os << " [averaged]";
        }
    }
    os << '\n';
    for (double t : times) {
        os << format_g17(t);
        for (const auto* s : chosen) {
            os << ',' << format_g17(s->waveform.value(t));
        }
        os << '\n';
    }
}

namespace {

Waveform staircase(const SimulationResult& result, std::string_view signal) {
    const auto values = period_series(result, signal);
    const double t_s = result.config.period();
    Waveform w;
    w.name = std::string(signal);
    for (std::size_t n = 0; n < values.size(); ++n) {
        const double t0 = result.periods[n].t_start;
        w.segments.push_back({t0, t0 + t_s, values[n], 0.0, 0.0});
    }
    return w;
}

}  // namespace

void write_stats(std::ostream& os, const SimulationResult& result,
                 const std::vector<Reconstruction>& signals, double t_from,
                 const SignalFilter& filter) {
    const double t_end = result.periods.size() * result.config.period();
    os << "# window " << format_g17(t_from) << " .. " << format_g17(t_end) << " s\n";
    os << "signal,mean,min,max,rms\n";
    auto line = [&](const std::string& name, const SignalStats& s) {
        os << name << ',' << format_g17(s.mean) << ',' << format_g17(s.min) << ','
           << format_g17(s.max) << ',' << format_g17(s.rms) << '\n';
    };
    for (const auto& name : period_signals(result)) {
        if (name.rfind("iL(", 0) == 0 || name.rfind("vC(", 0) == 0 || !filter.matches(name)) {
            continue;
        }
        line(name, stats(staircase(result, name), t_from, t_end));
    }
    for (const auto& s : signals) {
        if (filter.matches(s.waveform.name)) {
            line(s.waveform.name, stats(s.waveform, t_from, t_end));
        }
    }
}

void write_oracle_csv(std::ostream& os, const OracleResult& oracle, const SignalFilter& filter) {
    std::vector<const SampledWaveform*> chosen;
    for (const auto& s : oracle.signals) {
        if (filter.matches(s.name)) {
            chosen.push_back(&s);
        }
    }
    os << "n,t_start";
    for (const auto* s : chosen) {
        os << ',' << s->name;
    }
    os << '\n';
    const int periods = oracle.signals.empty() ? 0 : oracle.signals.front().periods();
    const double t_s = oracle.config.period();
    for (int n = 0; n < periods; ++n) {
        os << n << ',' << format_g17(n * t_s);
        for (const auto* s : chosen) {
            os << ',' << format_g17(period_average(*s, n));
        }
        os << '\n';
    }
}

Deviation compare_signal(const SimulationResult& result, const OracleResult& oracle,
                         std::string_view signal, int first_period, int window_start) {
    const auto engine = period_series(result, signal);
    const auto& sampled = oracle.signal(signal);
    const int periods = std::min<int>(static_cast<int>(engine.size()), sampled.periods());
    if (window_start >= periods || window_start < 0) {
        throw OutOfRange("steady-state window outside the run");
    }
    std::vector<double> reference(periods);
    for (int n = 0; n < periods; ++n) {
        reference[n] = period_average(sampled, n);
    }

    Deviation dev;
    dev.signal = std::string(signal);
    const int window = periods - window_start;
    for (int n = window_start; n < periods; ++n) {
        dev.engine_mean += engine[n] / window;
        dev.oracle_mean += reference[n] / window;
    }
    const double floor = std::abs(dev.oracle_mean);
    for (int n = std::max(first_period, 0); n < periods; ++n) {
        const double scale = std::max(std::abs(reference[n]), floor);
        const double rel = scale > 0.0 ? std::abs(engine[n] - reference[n]) / scale : 0.0;
        double& slot = n < window_start ? dev.transient : dev.steady_state;
        slot = std::max(slot, rel);
    }
    return dev;
}

void write_compare(std::ostream& os, const std::vector<Deviation>& deviations) {
    os << "signal,engine_mean,oracle_mean,max_rel_dev_transient,max_rel_dev_steady\n";
    for (const auto& d : deviations) {
        os << d.signal << ',' << format_g17(d.engine_mean) << ',' << format_g17(d.oracle_mean)
           << ',' << format_g17(d.transient) << ',' << format_g17(d.steady_state) << '\n';
    }
}

}  // namespace avgcell
