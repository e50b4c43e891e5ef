#pragma once

#include "avgcell/engine.hpp"
#include "avgcell/netlist.hpp"

#include <cmath>
#include <random>
#include <string>

namespace avgcell::testing {

// Benchmark circuits: V_IN = 10 V, L = 10 uH, C = 100 uF, R = 5 ohm.
inline constexpr const char* kBuckSync =
    "VDC 1 1 0 10.0\n"
    "SCN1 1 1 0 2 10e-6 0\n"
    "C 1 2 0 1e-4 0\n"
    "R 1 2 0 5.0\n"
    "IDC 1 2 0 4.0\n";

inline constexpr const char* kBuckDiode =
    "VDC 1 1 0 10.0\n"
    "SCD1 1 1 0 2 10e-6 0\n"
    "C 1 2 0 1e-4 0\n"
    "R 1 2 0 5.0\n"
    "IDC 1 2 0 4.0\n";

inline constexpr const char* kFlybackSync =
    "VDC 1 1 0 10.0\n"
    "FBN 1 1 0 2 10e-6 2 0\n"
    "C 1 2 0 1e-4 0\n"
    "R 1 2 0 5.0\n"
    "IDC 1 2 0 1.0\n";

inline constexpr const char* kFlybackDiode =
    "VDC 1 1 0 10.0\n"
    "FBD 1 1 0 2 10e-6 2 0\n"
    "C 1 2 0 1e-4 0\n"
    "R 1 2 0 5.0\n"
    "IDC 1 2 0 1.0\n";

// Light load without the current sink: settles in DCM.
inline constexpr const char* kBuckDcm =
    "VDC 1 1 0 10.0\n"
    "SCD1 1 1 0 2 10e-6 0\n"
    "C 1 2 0 1e-4 0\n"
    "R 1 2 0 50.0\n";

// Synchronous buck started on its periodic orbit.
inline constexpr const char* kBuckSteady =
    "VDC 1 1 0 10.0\n"
    "SCN1 1 1 0 2 10e-6 3.75\n"
    "C 1 2 0 1e-4 5\n"
    "R 1 2 0 5.0\n"
    "IDC 1 2 0 4.0\n";

/// Default run of the benchmarks: D = 0.5, 100 kHz, 5 ms.
inline SimConfig benchmark_config() { return SimConfig{0.5, 100e3, 5e-3, false}; }

/// Mean of the per-period values over the last `count` records.
template <class F>
double tail_mean(const SimulationResult& r, int count, F&& value) {
    double sum = 0.0;
    const int n = static_cast<int>(r.periods.size());
    for (int k = n - count; k < n; ++k) {
        sum += value(r.periods[k]);
    }
    return sum / count;
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// Seeded generator for property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }

private:
    std::mt19937_64 engine_;
};

/// Randomized converter plus the run settings it was drawn with.
struct RandomCase {
    std::string netlist;
    SimConfig config;
    double v_in = 0.0;
    std::string cell;
    std::string description;
};

enum class Topology { Buck, BuckBoost, Boost };

inline std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Random converter of the given topology. `diode` picks SCD over SCN;
/// the boost is always synchronous because its inductor current is
/// negative in the cell's orientation. Runs long enough (30 output time
/// constants) to settle.
inline RandomCase random_converter(Rng& rng, Topology topology, bool diode) {
    RandomCase rc;
    const double v_in = rng.uniform(5.0, 24.0);
    const double l = rng.log_uniform(5e-6, 50e-6);
    const double c = rng.log_uniform(47e-6, 220e-6);
    const double r = rng.uniform(2.0, 10.0);
    const double fs = rng.log_uniform(50e3, 200e3);
    const double d = rng.uniform(0.25, 0.75);
    const bool sink = rng.chance(0.5);
    const double i_out = sink ? rng.uniform(0.1, 2.0) : 0.0;
    const char* kind = diode && topology != Topology::Boost ? "SCD" : "SCN";

    std::string cell_nodes;
    switch (topology) {
        case Topology::Buck:
            cell_nodes = " 1 0 2 ";
            break;
        case Topology::BuckBoost:
            cell_nodes = " 1 2 0 ";
            break;
        case Topology::Boost:
            cell_nodes = " 0 2 1 ";
            break;
    }
    rc.netlist = "VDC 1 1 0 " + number(v_in) + "\n" + kind + " 1" + cell_nodes + number(l) +
                 " 0\n" + "C 1 2 0 " + number(c) + " 0\nR 1 2 0 " + number(r) + "\n";
    if (sink) {
        // Load current drawn in the direction of the output polarity.
        rc.netlist += topology == Topology::BuckBoost ? "IDC 1 0 2 " + number(i_out) + "\n"
                                                      : "IDC 1 2 0 " + number(i_out) + "\n";
    }
    rc.v_in = v_in;
    rc.cell = std::string(kind) + "1";
    const double tau = 2.0 * r * c;
    rc.config = SimConfig{d, fs, std::max(30.0 * tau, 200.0 / fs), false};
    rc.description = rc.netlist + "D=" + number(d) + " fs=" + number(fs);
    return rc;
}

}  // namespace avgcell::testing
