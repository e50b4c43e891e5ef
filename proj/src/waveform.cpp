#include "avgcell/waveform.hpp"

#include "avgcell/signals.hpp"

#include <algorithm>
#include <cmath>

namespace avgcell {

double Waveform::value(double t) const {
    if (segments.empty()) {
        throw EmptyWindow("waveform " + name + " has no samples");
    }
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double x, const Segment& s) { return x < s.t_end; });
    if (it == segments.end()) {
        return segments.back().at(segments.back().t_end);
    }
    return it->at(std::max(t, it->t_start));
}

void Waveform::add_line(double t0, double v0, double t1, double v1) {
    if (t1 <= t0) {
        return;
    }
    segments.push_back({t0, t1, v0, (v1 - v0) / (t1 - t0), 0.0});
}

Waveform inductor_waveform(const SimulationResult& result, std::string_view cell) {
    const std::size_t slot = result.cell_slot(cell);
    const double t_s = result.config.period();
    Waveform w;
    w.name = inductor_signal(cell);
    w.unit = "A";
    for (const auto& rec : result.periods) {
        const auto& st = rec.cells[slot];
        const double t0 = rec.t_start;
        const double t_end = (rec.index + 1) * t_s;
        const double t1 = std::min(t0 + st.d * t_s, t_end);
        if (st.mode == ConductionMode::DCM) {
            const double t2 = std::min(t0 + (st.d + st.d_p) * t_s, t_end);
            w.add_line(t0, st.i_l0, t1, st.i_l1);
            w.add_line(t1, st.i_l1, t2, 0.0);
            w.add_line(t2, 0.0, t_end, 0.0);
        } else {
            w.add_line(t0, st.i_l0, t1, st.i_l1);
            w.add_line(t1, st.i_l1, t_end, st.i_l2);
        }
    }
    return w;
}

RippleModel ripple_amplitude(const CellState& cell) {
    if (cell.mode == ConductionMode::DCM) {
        throw NotApplicable("ripple amplitudes are defined for CCM periods only");
    }
    RippleModel r;
    r.delta_i_l1 = (cell.i_l1 - cell.i_l0) / 2.0;
    r.delta_i_l2 = (cell.i_l1 - cell.i_l2) / 2.0;
    r.delta_i_l = (r.delta_i_l1 + r.delta_i_l2) / 2.0;
    return r;
}

double capacitor_start_voltage(double v_avg, double d, double delta_i_l, double f_s,
                               double capacitance) {
    return v_avg + (2.0 * d - 1.0) / (6.0 * f_s * capacitance) * delta_i_l;
}

double capacitor_ripple(double tau, double d, double delta_i_l, double f_s, double capacitance) {
    const double k = delta_i_l / (f_s * capacitance);
    if (tau <= d) {
        return k * (tau * tau / d - tau);
    }
    return k * (tau - d) * (1.0 - tau) / (1.0 - d);
}

OutputStage buck_output_stage(const CircuitDescription& circuit, std::string_view capacitor) {
    const Element& cap = circuit.find(capacitor);
    if (cap.kind != ElementKind::C) {
        throw UnknownLabel(std::string(capacitor));
    }
    const Element* stage = nullptr;
    for (const auto& el : circuit.elements) {
        if (el.kind != ElementKind::SCN && el.kind != ElementKind::SCD) {
            continue;
        }
        const NodeId common = el.nodes[2];
        const NodeId passive = el.nodes[1];
        const bool across = (cap.nodes[0] == common && cap.nodes[1] == passive) ||
                            (cap.nodes[1] == common && cap.nodes[0] == passive);
        if (across && common != passive) {
            stage = &el;
            break;
        }
    }
    if (stage == nullptr) {
        throw TopologyNotSupported("capacitor " + std::string(capacitor) +
                                   " is not across a basic cell's inductor branch");
    }
    const NodeId common = stage->nodes[2];
    for (const auto& el : circuit.elements) {
        if (&el == stage || &el == &cap) {
            continue;
        }
        const bool touches =
            std::find(el.nodes.begin(), el.nodes.end(), common) != el.nodes.end();
        if (touches && (el.kind == ElementKind::VDC || el.kind == ElementKind::C ||
                        is_cell(el.kind))) {
            throw TopologyNotSupported("node " + std::to_string(common) +
                                       " carries more than the output load");
        }
    }
    return {stage->label(), cap.nodes[0] == common ? 1.0 : -1.0};
}

namespace {

struct Knot {
    double t;
    double v;
};

// Period-midpoint knots; held flat over the last half period.
std::vector<Knot> midpoint_knots(const SimulationResult& result, std::size_t cap,
                                 const std::vector<double>& offsets) {
    const double t_s = result.config.period();
    std::vector<Knot> knots;
    knots.reserve(result.periods.size() + 2);
    knots.push_back({0.0, result.initial.capacitors[cap].voltage});
    for (std::size_t n = 0; n < result.periods.size(); ++n) {
        const auto& rec = result.periods[n];
        knots.push_back({rec.t_start + 0.5 * t_s, rec.capacitors[cap].voltage + offsets[n]});
    }
    knots.push_back({result.periods.size() * t_s, knots.back().v});
    return knots;
}

double interpolate(const Knot& a, const Knot& b, double t) {
    return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
}

}  // namespace

Waveform averaged_capacitor_waveform(const SimulationResult& result,
                                     std::string_view capacitor) {
    const std::size_t cap = result.capacitor_slot(capacitor);
    const auto knots =
        midpoint_knots(result, cap, std::vector<double>(result.periods.size(), 0.0));
    Waveform w;
    w.name = capacitor_signal(capacitor);
    w.unit = "V";
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        w.add_line(knots[k].t, knots[k].v, knots[k + 1].t, knots[k + 1].v);
    }
    return w;
}

Waveform capacitor_waveform(const SimulationResult& result, std::string_view capacitor) {
    const std::size_t cap = result.capacitor_slot(capacitor);
    const OutputStage stage = buck_output_stage(result.circuit, capacitor);
    const std::size_t cell = result.cell_slot(stage.cell);
    const double capacitance = result.circuit.find(capacitor).value;
    const double f_s = result.config.switching_frequency;
    const double t_s = result.config.period();

    // Per period: signed ripple amplitude (zero in DCM) and the start-voltage offset.
    std::vector<double> amplitude(result.periods.size(), 0.0);
    std::vector<double> offsets(result.periods.size(), 0.0);
    for (std::size_t n = 0; n < result.periods.size(); ++n) {
        const auto& st = result.periods[n].cells[cell];
        if (st.mode == ConductionMode::CCM) {
            amplitude[n] = stage.sign * ripple_amplitude(st).delta_i_l;
            offsets[n] = capacitor_start_voltage(0.0, st.d, amplitude[n], f_s, capacitance);
        }
    }
    const auto knots = midpoint_knots(result, cap, offsets);

    Waveform w;
    w.name = capacitor_signal(capacitor);
    w.unit = "V";
    for (std::size_t n = 0; n < result.periods.size(); ++n) {
        const auto& rec = result.periods[n];
        const double d = rec.cells[cell].d;
        const double t0 = rec.t_start;
        const Knot& before = knots[n];
        const Knot& mid = knots[n + 1];
        const Knot& after = knots[n + 2];

        std::vector<double> cuts{0.0, 0.5, d, 1.0};
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k];
            const double b = cuts[k + 1];
            const double ta = a == 0.0 ? t0 : t0 + a * t_s;
            const double tb = b == 1.0 ? (rec.index + 1) * t_s : t0 + b * t_s;
            if (tb <= ta) {
                continue;
            }
            const Knot& l = a < 0.5 ? before : mid;
            const Knot& r = a < 0.5 ? mid : after;
            const double base0 = interpolate(l, r, ta);
            const double slope = (r.v - l.v) / (r.t - l.t);

            // Ripple branch as a quadratic in local time s = t - ta.
            Segment seg{ta, tb, 0.0, 0.0, 0.0};
            const double k0 = amplitude[n] / (f_s * capacitance);
            if (amplitude[n] != 0.0) {
                if (b <= d) {
                    // k0 * (tau^2/d - tau), tau = a + s/T
                    seg.c0 = k0 * (a * a / d - a);
                    seg.c1 = k0 * (2.0 * a / d - 1.0) / t_s;
                    seg.c2 = k0 / (d * t_s * t_s);
                } else {
                    // k0 * (tau - d)(1 - tau)/(1 - d)
                    const double g = k0 / (1.0 - d);
                    seg.c0 = g * (a - d) * (1.0 - a);
                    seg.c1 = g * (1.0 + d - 2.0 * a) / t_s;
                    seg.c2 = -g / (t_s * t_s);
                }
            }
            seg.c0 += base0;
            seg.c1 += slope;
            w.segments.push_back(seg);
        }
    }
    return w;
}

namespace {

// Integrals over s in [0, h] of p and p^2 for p = c0 + c1 s + c2 s^2.
double integral(const Segment& g, double h) {
    return h * (g.c0 + h * (g.c1 / 2.0 + h * g.c2 / 3.0));
}

double integral_sq(const Segment& g, double h) {
    const double a = g.c0;
    const double b = g.c1;
    const double c = g.c2;
    return h * (a * a +
                h * (a * b + h * ((b * b + 2.0 * a * c) / 3.0 + h * (b * c / 2.0 + h * c * c / 5.0))));
}

}  // namespace

SignalStats stats(const Waveform& waveform, double t_from, double t_to) {
    if (waveform.empty() || !(t_to > t_from)) {
        throw EmptyWindow("empty statistics window");
    }
    const double lo = std::max(t_from, waveform.t_begin());
    const double hi = std::min(t_to, waveform.t_end());
    if (!(hi > lo)) {
        throw EmptyWindow("statistics window misses the waveform span");
    }

    double sum = 0.0;
    double sum_sq = 0.0;
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    auto visit = [&](double v) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    };
    for (const auto& seg : waveform.segments) {
        const double a = std::max(lo, seg.t_start);
        const double b = std::min(hi, seg.t_end);
        if (!(b > a)) {
            continue;
        }
        // Re-base the polynomial at a.
        const double s = a - seg.t_start;
        Segment local{a, b, seg.at(a), seg.c1 + 2.0 * seg.c2 * s, seg.c2};
        const double h = b - a;
        sum += integral(local, h);
        sum_sq += integral_sq(local, h);
        visit(local.c0);
        visit(local.at(b));
        if (local.c2 != 0.0) {
            const double vertex = -local.c1 / (2.0 * local.c2);
            if (vertex > 0.0 && vertex < h) {
                visit(local.at(a + vertex));
            }
        }
    }
    const double span = hi - lo;
    SignalStats st;
    st.mean = sum / span;
    st.rms = std::sqrt(std::max(sum_sq / span, 0.0));
    st.min = vmin;
    st.max = vmax;
    // Rounding can push an exact mean a hair past a flat extreme.
    st.mean = std::clamp(st.mean, st.min, st.max);
    st.rms = std::max(st.rms, std::abs(st.mean));
    return st;
}

}  // namespace avgcell
