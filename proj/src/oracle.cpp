#include "avgcell/oracle.hpp"

#include "avgcell/cells.hpp"
#include "avgcell/dense.hpp"
#include "avgcell/signals.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace avgcell {

namespace {

enum class Path { On, Off, Open };
enum class Method { BackwardEuler, Trapezoidal };

struct CellInfo {
    PathIncidence on;
    PathIncidence off;
    double inductance = 0.0;
    bool diode = false;
};

struct CapInfo {
    NodeId n1 = kGround;
    NodeId n2 = kGround;
    double capacitance = 0.0;
};

struct State {
    std::vector<double> x;
    std::vector<double> v_cap;
    std::vector<double> i_cap;
    std::vector<double> i_l;
    std::vector<double> v_l;  // inductor voltage along the active path
};

State lerp(const State& a, const State& b, double theta) {
    auto mix = [theta](const std::vector<double>& u, const std::vector<double>& v) {
        std::vector<double> out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            out[i] = u[i] + theta * (v[i] - u[i]);
        }
        return out;
    };
    return {mix(a.x, b.x), mix(a.v_cap, b.v_cap), mix(a.i_cap, b.i_cap), mix(a.i_l, b.i_l),
            mix(a.v_l, b.v_l)};
}

/// Piecewise-linear network: node voltages, VDC currents, capacitor branch
/// currents and cell inductor currents as unknowns.
class SwitchedNetwork {
public:
    SwitchedNetwork(const CircuitDescription& circuit, double h) : circuit_(circuit), h_(h) {
        int row = 0;
        for (NodeId n : circuit.node_ids) {
            if (n != kGround) {
                node_rows_[n] = row++;
                nodes_.push_back(n);
            }
        }
        for (const auto& el : circuit.elements) {
            if (el.kind == ElementKind::VDC) {
                vdc_rows_.push_back(row++);
            }
        }
        for (const auto& el : circuit.elements) {
            if (el.kind == ElementKind::C) {
                caps_.push_back({el.nodes[0], el.nodes[1], el.value});
                cap_rows_.push_back(row++);
            }
        }
        for (const auto& el : circuit.elements) {
            if (is_cell(el.kind)) {
                const auto inc = cell_incidence(el);
                cells_.push_back({inc.first, inc.second, el.value, has_diode(el.kind)});
                cell_rows_.push_back(row++);
            }
        }
        order_ = row;

        state_.x.assign(order_, 0.0);
        for (const auto& el : circuit.elements) {
            if (el.kind == ElementKind::C) {
                state_.v_cap.push_back(el.initial);
            } else if (is_cell(el.kind)) {
                state_.i_l.push_back(el.initial);
            }
        }
        state_.i_cap.assign(caps_.size(), 0.0);
        state_.v_l.assign(cells_.size(), 0.0);
        paths_.assign(cells_.size(), Path::On);
    }

    [[nodiscard]] const std::vector<NodeId>& nodes() const { return nodes_; }
    [[nodiscard]] const State& state() const { return state_; }
    [[nodiscard]] double node_voltage(NodeId n) const { return voltage(state_.x, n); }
    [[nodiscard]] double vdc_current(std::size_t j) const { return state_.x[vdc_rows_[j]]; }

    /// Node voltages consistent with the initial capacitor voltages and
    /// inductor currents: a vanishing backward Euler step.
    void settle_initial() {
        State s = solve(1e-6 * h_, Method::BackwardEuler, false);
        state_.x = s.x;
        state_.v_l = s.v_l;
    }

    void turn_on() {
        std::fill(paths_.begin(), paths_.end(), Path::On);
        switch_on_ = true;
        need_reset_ = true;
    }

    void turn_off() {
        switch_on_ = false;
        for (std::size_t s = 0; s < cells_.size(); ++s) {
            if (!cells_[s].diode) {
                paths_[s] = Path::Off;
            } else if (paths_[s] != Path::Open && state_.i_l[s] > 0.0) {
                paths_[s] = Path::Off;
            } else {
                paths_[s] = Path::Open;
                state_.i_l[s] = 0.0;
            }
        }
        need_reset_ = true;
        reconduct();
    }

    /// Advance by dt, splitting the step at diode current zero crossings.
    void advance(double dt, bool full_grid_step) {
        double remaining = dt;
        bool cacheable = full_grid_step;
        while (remaining > 1e-12 * h_) {
            const Method m = need_reset_ ? Method::BackwardEuler : Method::Trapezoidal;
            State next = solve(remaining, m, cacheable);

            double theta = 2.0;
            std::size_t which = 0;
            for (std::size_t s = 0; s < cells_.size(); ++s) {
                if (!cells_[s].diode || paths_[s] == Path::Open || next.i_l[s] >= 0.0) {
                    continue;
                }
                const double i0 = std::max(state_.i_l[s], 0.0);
                const double th = i0 / (i0 - next.i_l[s]);
                if (th < theta) {
                    theta = th;
                    which = s;
                }
            }
            if (theta > 1.0) {
                state_ = std::move(next);
                need_reset_ = false;
                break;
            }
            state_ = lerp(state_, next, theta);
            state_.i_l[which] = 0.0;
            paths_[which] = Path::Open;
            need_reset_ = true;
            remaining *= (1.0 - theta);
            cacheable = false;
        }
        reconduct();
    }

private:
    [[nodiscard]] double voltage(const std::vector<double>& x, NodeId n) const {
        return n == kGround ? 0.0 : x[node_rows_.at(n)];
    }

    [[nodiscard]] int row(NodeId n) const { return n == kGround ? -1 : node_rows_.at(n); }

    [[nodiscard]] const PathIncidence& weights(std::size_t s, Path p) const {
        return p == Path::On ? cells_[s].on : cells_[s].off;
    }

    // An open diode cell conducts again once its path voltage would drive
    // positive current.
    void reconduct() {
        double scale = 1.0;
        for (double v : state_.x) {
            scale = std::max(scale, std::abs(v));
        }
        for (std::size_t s = 0; s < cells_.size(); ++s) {
            if (paths_[s] != Path::Open) {
                continue;
            }
            const Path candidate = switch_on_ ? Path::On : Path::Off;
            double v = 0.0;
            for (const auto& t : weights(s, candidate)) {
                v += t.weight * voltage(state_.x, t.node);
            }
            if (v > 1e-9 * scale) {
                paths_[s] = candidate;
                need_reset_ = true;
            }
        }
    }

    [[nodiscard]] DenseMatrix matrix(double dt, Method m) const {
        DenseMatrix a(order_, order_);
        auto add = [&a](int r, int c, double v) {
            if (r >= 0 && c >= 0) {
                a(r, c) += v;
            }
        };
        std::size_t vdc = 0;
        for (const auto& el : circuit_.elements) {
            if (el.kind == ElementKind::R) {
                const double g = 1.0 / el.value;
                const int r1 = row(el.nodes[0]);
                const int r2 = row(el.nodes[1]);
                add(r1, r1, g);
                add(r2, r2, g);
                add(r1, r2, -g);
                add(r2, r1, -g);
            } else if (el.kind == ElementKind::VDC) {
                const int br = vdc_rows_[vdc++];
                add(row(el.nodes[0]), br, 1.0);
                add(row(el.nodes[1]), br, -1.0);
                add(br, row(el.nodes[0]), 1.0);
                add(br, row(el.nodes[1]), -1.0);
            }
        }
        const double k = m == Method::BackwardEuler ? 1.0 : 2.0;
        for (std::size_t c = 0; c < caps_.size(); ++c) {
            const int rc = cap_rows_[c];
            const double g = k * caps_[c].capacitance / dt;
            add(rc, rc, 1.0);
            add(rc, row(caps_[c].n1), -g);
            add(rc, row(caps_[c].n2), g);
            add(row(caps_[c].n1), rc, 1.0);
            add(row(caps_[c].n2), rc, -1.0);
        }
        for (std::size_t s = 0; s < cells_.size(); ++s) {
            const int rl = cell_rows_[s];
            add(rl, rl, 1.0);
            if (paths_[s] == Path::Open) {
                continue;
            }
            const double g = dt / (k * cells_[s].inductance);
            for (const auto& t : weights(s, paths_[s])) {
                add(rl, row(t.node), -g * t.weight);
                add(row(t.node), rl, t.weight);
            }
        }
        return a;
    }

    [[nodiscard]] std::vector<double> rhs(double dt, Method m) const {
        std::vector<double> z(order_, 0.0);
        std::size_t vdc = 0;
        for (const auto& el : circuit_.elements) {
            if (el.kind == ElementKind::VDC) {
                z[vdc_rows_[vdc++]] += el.value;
            } else if (el.kind == ElementKind::IDC) {
                if (int r = row(el.nodes[0]); r >= 0) {
                    z[r] -= el.value;
                }
                if (int r = row(el.nodes[1]); r >= 0) {
                    z[r] += el.value;
                }
            }
        }
        for (std::size_t c = 0; c < caps_.size(); ++c) {
            if (m == Method::BackwardEuler) {
                z[cap_rows_[c]] = -caps_[c].capacitance / dt * state_.v_cap[c];
            } else {
                z[cap_rows_[c]] =
                    -(2.0 * caps_[c].capacitance / dt * state_.v_cap[c] + state_.i_cap[c]);
            }
        }
        for (std::size_t s = 0; s < cells_.size(); ++s) {
            if (paths_[s] == Path::Open) {
                continue;
            }
            z[cell_rows_[s]] = state_.i_l[s];
            if (m == Method::Trapezoidal) {
                z[cell_rows_[s]] += dt / (2.0 * cells_[s].inductance) * state_.v_l[s];
            }
        }
        return z;
    }

    [[nodiscard]] State solve(double dt, Method m, bool cacheable) {
        std::vector<double> x;
        if (cacheable) {
            std::vector<int> key{static_cast<int>(m)};
            for (Path p : paths_) {
                key.push_back(static_cast<int>(p));
            }
            auto it = cache_.find(key);
            if (it == cache_.end()) {
                it = cache_.emplace(key, LuFactorization::factor(matrix(dt, m))).first;
            }
            x = it->second.solve(rhs(dt, m));
        } else {
            x = LuFactorization::factor(matrix(dt, m)).solve(rhs(dt, m));
        }

        State next;
        next.x = std::move(x);
        for (std::size_t c = 0; c < caps_.size(); ++c) {
            next.v_cap.push_back(voltage(next.x, caps_[c].n1) - voltage(next.x, caps_[c].n2));
            next.i_cap.push_back(next.x[cap_rows_[c]]);
        }
        for (std::size_t s = 0; s < cells_.size(); ++s) {
            if (paths_[s] == Path::Open) {
                next.i_l.push_back(0.0);
                next.v_l.push_back(0.0);
                continue;
            }
            double v = 0.0;
            for (const auto& t : weights(s, paths_[s])) {
                v += t.weight * voltage(next.x, t.node);
            }
            next.i_l.push_back(next.x[cell_rows_[s]]);
            next.v_l.push_back(v);
        }
        return next;
    }

    const CircuitDescription& circuit_;
    double h_;
    std::map<NodeId, int> node_rows_;
    std::vector<NodeId> nodes_;
    std::vector<int> vdc_rows_;
    std::vector<CapInfo> caps_;
    std::vector<int> cap_rows_;
    std::vector<CellInfo> cells_;
    std::vector<int> cell_rows_;
    int order_ = 0;

    State state_;
    std::vector<Path> paths_;
    bool switch_on_ = true;
    bool need_reset_ = true;
    std::map<std::vector<int>, LuFactorization> cache_;
};

}  // namespace

void OracleConfig::validate() const {
    if (substeps_per_period < 100) {
        throw InvalidConfig("oracle needs at least 100 substeps per period");
    }
}

const SampledWaveform& OracleResult::signal(std::string_view name) const {
    for (const auto& s : signals) {
        if (s.name == name) {
            return s;
        }
    }
    throw UnknownLabel(std::string(name));
}

OracleResult simulate_switched(const CircuitDescription& circuit, const SimConfig& config,
                               const OracleConfig& oracle) {
    config.validate();
    oracle.validate();
    require_simulable(circuit);

    const int steps = oracle.substeps_per_period;
    const int periods = config.n_periods();
    const double t_s = config.period();
    const double h = t_s / steps;
    const std::size_t n_samples = static_cast<std::size_t>(periods) * steps + 1;

    SwitchedNetwork net(circuit, h);

    OracleResult result;
    result.config = config;
    result.oracle = oracle;
    auto add_signal = [&](std::string name) {
        result.signals.push_back({std::move(name), h, steps, {}});
        result.signals.back().samples.reserve(n_samples);
    };
    for (NodeId n : net.nodes()) {
        add_signal(node_signal(n));
    }
    for (const auto& el : circuit.elements) {
        if (el.kind == ElementKind::VDC) {
            add_signal(branch_signal(el.label()));
        }
    }
    for (const auto& el : circuit.elements) {
        if (is_cell(el.kind)) {
            add_signal(inductor_signal(el.label()));
        }
    }
    for (const auto& el : circuit.elements) {
        if (el.kind == ElementKind::C) {
            add_signal(capacitor_signal(el.label()));
        }
    }

    auto record = [&]() {
        std::size_t k = 0;
        const auto& st = net.state();
        for (NodeId n : net.nodes()) {
            result.signals[k++].samples.push_back(net.node_voltage(n));
        }
        for (std::size_t j = 0; j < circuit.count(ElementKind::VDC); ++j) {
            result.signals[k++].samples.push_back(net.vdc_current(j));
        }
        for (double i : st.i_l) {
            result.signals[k++].samples.push_back(i);
        }
        for (double v : st.v_cap) {
            result.signals[k++].samples.push_back(v);
        }
    };

    net.settle_initial();
    record();

    // Switch-off position in substep units.
    const double off_at = config.duty * steps;
    constexpr double eps = 1e-9;
    for (int p = 0; p < periods; ++p) {
        net.turn_on();
        bool off = off_at >= steps - eps;
        double u = 0.0;
        for (int j = 0; j < steps; ++j) {
            const double next = j + 1.0;
            if (!off && off_at > u + eps && off_at < next - eps) {
                net.advance((off_at - u) * h, false);
                u = off_at;
                net.turn_off();
                off = true;
            } else if (!off && std::abs(off_at - u) <= eps) {
                net.turn_off();
                off = true;
            }
            net.advance((next - u) * h, u == static_cast<double>(j));
            u = next;
            record();
        }
    }
    return result;
}

double period_average(const SampledWaveform& sampled, int n) {
    if (n < 0 || n >= sampled.periods()) {
        throw OutOfRange("period " + std::to_string(n) + " outside the sampled run");
    }
    const int s = sampled.substeps_per_period;
    const std::size_t first = static_cast<std::size_t>(n) * s;
    double sum = 0.5 * (sampled.samples[first] + sampled.samples[first + s]);
    for (int k = 1; k < s; ++k) {
        sum += sampled.samples[first + k];
    }
    return sum / s;
}

}  // namespace avgcell
