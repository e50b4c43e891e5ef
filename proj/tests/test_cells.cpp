#include "avgcell/cells.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <limits>

using namespace avgcell;
using Catch::Approx;

namespace {

constexpr double kL = 10e-6;
constexpr double kTs = 10e-6;

CellParams basic(Rectifier r = Rectifier::Synchronous) {
    return {kL, 1.0, r, CellFamily::Basic};
}

CellParams flyback(double n, Rectifier r = Rectifier::Synchronous) {
    return {kL, n, r, CellFamily::Flyback};
}

// Brute-force average of the piecewise-linear current over the switch-on
// and rectifier intervals (midpoint rule), independent of the closed forms.
struct Integrated {
    double switch_avg;
    double rectifier_avg;
};

Integrated integrate(double i0, double v1, double v2, double d, double dp, double l, double ts) {
    const int steps = 200000;
    const double h = ts / steps;
    Integrated out{0.0, 0.0};
    for (int k = 0; k < steps; ++k) {
        const double t = (k + 0.5) * h;
        if (t < d * ts) {
            out.switch_avg += (i0 + v1 / l * t) * h;
        } else if (t < (d + dp) * ts) {
            out.rectifier_avg += (i0 + v1 / l * d * ts + v2 / l * (t - d * ts)) * h;
        }
    }
    out.switch_avg /= ts;
    out.rectifier_avg /= ts;
    return out;
}

}  // namespace

TEST_CASE("drive voltages of basic and flyback cells", "[cells]") {
    auto b = drive_voltages({10.0, 0.0, 5.0}, basic());
    CHECK(b.first == 5.0);
    CHECK(b.second == -5.0);

    auto z = drive_voltages({3.0, 3.0, 3.0}, basic());
    CHECK(z.first == 0.0);
    CHECK(z.second == 0.0);

    auto f = drive_voltages({10.0, 0.0, 20.0}, flyback(2.0));
    CHECK(f.first == 10.0);
    CHECK(f.second == -10.0);
    // Volt-second balance at D = 0.5.
    CHECK(avg_inductor_voltage(f.first, f.second, 0.5, 0.5) == 0.0);
}

TEST_CASE("DCM rectifier duty", "[cells]") {
    CHECK(compute_d2(5.0, -5.0, 0.4) == Approx(0.4));
    CHECK(compute_d2(7.5, -2.5, 0.3) == Approx(0.9));
    CHECK(is_ccm_forced(compute_d2(5.0, 0.0, 0.5)));
    CHECK(is_ccm_forced(compute_d2(5.0, 1.0, 0.5)));
}

TEST_CASE("conduction mode resolution", "[cells]") {
    auto m = resolve_mode(0.5, 0.5, Rectifier::Diode);
    CHECK(m.mode == ConductionMode::CCM);
    CHECK(m.d_p == 0.5);

    m = resolve_mode(0.3, 0.9, Rectifier::Diode);
    CHECK(m.mode == ConductionMode::CCM);
    CHECK(m.d_p == Approx(0.7));

    m = resolve_mode(0.5, 0.2, Rectifier::Synchronous);
    CHECK(m.mode == ConductionMode::CCM);
    CHECK(m.d_p == 0.5);

    m = resolve_mode(0.25, 0.25, Rectifier::Diode);
    CHECK(m.mode == ConductionMode::DCM);
    CHECK(m.d_p == 0.25);

    m = resolve_mode(0.5, std::numeric_limits<double>::infinity(), Rectifier::Diode);
    CHECK(m.mode == ConductionMode::CCM);
}

TEST_CASE("average switch current", "[cells]") {
    const auto ref = integrate(0.0, 5.0, -5.0, 0.5, 0.5, kL, kTs);
    CHECK(ref.switch_avg == Approx(0.625).epsilon(1e-6));
    CHECK(avg_switch_current(0.0, 5.0, 0.5, basic(), kTs) == Approx(0.625).epsilon(1e-12));

    CHECK(avg_switch_current(2.0, 5.0, 0.0, basic(), kTs) == 0.0);

    const auto ss = integrate(3.75, 5.0, -5.0, 0.5, 0.5, kL, kTs);
    CHECK(ss.switch_avg == Approx(2.5).epsilon(1e-6));
    CHECK(avg_switch_current(3.75, 5.0, 0.5, basic(), kTs) == Approx(2.5).epsilon(1e-12));
}

TEST_CASE("average rectifier current", "[cells]") {
    const DriveVoltages drive{5.0, -5.0};
    const auto ref = integrate(0.0, 5.0, -5.0, 0.5, 0.5, kL, kTs);
    CHECK(ref.rectifier_avg == Approx(0.625).epsilon(1e-6));
    CHECK(avg_diode_current(0.0, drive, 0.5, 0.5, basic(), kTs) == Approx(0.625).epsilon(1e-12));

    CHECK(avg_diode_current(1.0, drive, 0.5, 0.0, basic(), kTs) == 0.0);

    // Flyback steady state: magnetizing current 17.5 -> 22.5 A, secondary carries 1/n of it.
    const auto fb = integrate(17.5, 10.0, -10.0, 0.5, 0.5, kL, kTs);
    CHECK(fb.rectifier_avg / 2.0 == Approx(5.0).epsilon(1e-6));
    CHECK(avg_diode_current(17.5, {10.0, -10.0}, 0.5, 0.5, flyback(2.0), kTs) ==
          Approx(5.0).epsilon(1e-12));
    // Output current balance: 20 V / 5 ohm + 1 A.
    CHECK(20.0 / 5.0 + 1.0 == 5.0);
}

TEST_CASE("inductor current evolution", "[cells]") {
    auto c = advance_inductor(0.0, {5.0, -5.0}, 0.5, 0.5, basic(), kTs);
    CHECK(c.at_switch_off == Approx(2.5));
    CHECK(c.at_period_end == Approx(0.0).margin(1e-15));

    auto dcm = advance_inductor(0.0, {5.0, -5.0}, 0.5, 0.5, basic(Rectifier::Diode), kTs,
                                ConductionMode::DCM);
    CHECK(dcm.at_period_end == 0.0);

    auto flat = advance_inductor(1.5, {0.0, 0.0}, 0.5, 0.5, basic(), kTs);
    CHECK(flat.at_switch_off == 1.5);
    CHECK(flat.at_period_end == 1.5);

    auto ss = advance_inductor(3.75, {5.0, -5.0}, 0.5, 0.5, basic(), kTs);
    CHECK(ss.at_switch_off == Approx(6.25));
    CHECK(ss.at_period_end == Approx(3.75));
}

TEST_CASE("end current recovered from interval averages", "[cells]") {
    CHECK(end_current_from_averages(2.5, 2.5, 3.75, 0.5, 0.5) == Approx(3.75));
    CHECK(end_current_from_averages(5.0, 0.0, 4.0, 1.0, 0.0) == Approx(6.0));
    CHECK(end_current_from_averages(0.0, 5.0, 4.0, 0.0, 1.0) == Approx(6.0));
    CHECK_THROWS_AS(end_current_from_averages(1.0, 1.0, 0.0, 0.0, 0.0), DegenerateDuty);

    // Flyback: the secondary average is reflected back by n.
    CHECK(end_current_from_averages(10.0, 5.0, 17.5, 0.5, 0.5, flyback(2.0)) == Approx(17.5));
}

TEST_CASE("average inductor voltage", "[cells]") {
    CHECK(avg_inductor_voltage(5.0, -5.0, 0.5, 0.5) == 0.0);
    CHECK(avg_inductor_voltage(10.0, -10.0, 0.5, 0.5) == 0.0);
    CHECK(avg_inductor_voltage(5.0, -5.0, 0.6, 0.4) == Approx(1.0));
}

TEST_CASE("cell incidence weights", "[cells]") {
    const auto buck = parse_netlist(testing::kBuckSync);
    const auto inc = cell_incidence(buck.elements[1]);
    CHECK(inc.first[0].node == 1);
    CHECK(inc.first[0].weight == 1.0);
    CHECK(inc.first[1].node == 2);
    CHECK(inc.first[1].weight == -1.0);
    CHECK(inc.second[0].node == 0);
    CHECK(inc.second[1].node == 2);

    const auto fb = parse_netlist(testing::kFlybackSync);
    const auto finc = cell_incidence(fb.elements[1]);
    CHECK(finc.first[1].node == 0);
    CHECK(finc.second[0].weight == 0.5);
    CHECK(finc.second[1].weight == -0.5);

    CHECK(CellParams::from_element(fb.elements[1]).turns == 2.0);
    CHECK(CellParams::from_element(buck.elements[1]).turns == 1.0);
    CHECK_THROWS_AS(CellParams::from_element(buck.elements[0]), Error);
}
