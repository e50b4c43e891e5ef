#include "avgcell/engine.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace avgcell;
using namespace avgcell::testing;
using Catch::Approx;

namespace {

double v2(const PeriodRecord& p) { return p.node_voltages[1]; }
double il(const PeriodRecord& p) { return p.cells[0].inductor_current_avg(); }

}  // namespace

TEST_CASE("config validation", "[engine]") {
    CHECK(benchmark_config().n_periods() == 500);
    CHECK_THROWS_AS((SimConfig{0.5, 100e3, 0.0, false}.validate()), InvalidConfig);
    CHECK_THROWS_AS((SimConfig{0.0, 100e3, 1e-3, false}.validate()), InvalidConfig);
    CHECK_THROWS_AS((SimConfig{1.2, 100e3, 1e-3, false}.validate()), InvalidConfig);
    CHECK_THROWS_AS((SimConfig{0.5, -1.0, 1e-3, false}.validate()), InvalidConfig);
    CHECK_NOTHROW((SimConfig{1.0, 100e3, 1e-5, false}.validate()));
    CHECK_THROWS_AS(run(parse_netlist(kBuckSync), SimConfig{0.5, 100e3, 0.0, false}),
                    InvalidConfig);
}

TEST_CASE("circuits without cells or with diagnostics are rejected", "[engine]") {
    CHECK_THROWS_AS(run(parse_netlist("VDC 1 1 0 10\nR 1 1 0 5\nC 1 1 0 1e-6 0\n"),
                        benchmark_config()),
                    InvalidCircuit);
    CHECK_THROWS_AS(
        run(parse_netlist("VDC 1 1 0 10\nVDC 2 1 0 12\nSCN1 1 1 0 2 1e-5 0\nR 1 2 0 5\n"),
            benchmark_config()),
        InvalidCircuit);
}

TEST_CASE("synchronous buck reaches 5 V and 5 A", "[engine]") {
    const auto r = run(parse_netlist(kBuckSync), benchmark_config());
    REQUIRE(r.periods.size() == 500);
    CHECK(r.initial.index == -1);
    CHECK(r.periods.front().index == 0);
    CHECK(r.periods.back().t_start == Approx(499 * 10e-6));
    CHECK(tail_mean(r, 50, v2) == Approx(5.0).epsilon(0.01));
    CHECK(tail_mean(r, 50, il) == Approx(5.0).epsilon(0.01));
    for (const auto& p : r.periods) {
        CHECK(p.cells[0].mode == ConductionMode::CCM);
    }
}

TEST_CASE("first period starts from zero state", "[engine]") {
    const auto r = run(parse_netlist(kBuckSync), benchmark_config());
    const auto& p0 = r.periods.front();
    CHECK(p0.node_voltages[0] == Approx(10.0));
    CHECK(p0.cells[0].i_l0 == 0.0);
    // i_S row with i_L0 = 0: i_S = d^2 G_L/2 (v1 - v2).
    CHECK(p0.cells[0].i_s_avg == Approx(0.125 * (10.0 - p0.node_voltages[1])));
    CHECK(p0.capacitors[0].history == 0.0);
}

TEST_CASE("continuity and capacitor carryover", "[engine]") {
    for (const char* net : {kBuckSync, kBuckDiode, kFlybackSync, kFlybackDiode, kBuckDcm}) {
        const auto r = run(parse_netlist(net), benchmark_config());
        const PeriodRecord* prev = &r.initial;
        for (const auto& p : r.periods) {
            REQUIRE(p.cells[0].i_l0 == prev->cells[0].i_l2);
            REQUIRE(p.capacitors[0].history == prev->capacitors[0].next_history);
            REQUIRE(p.capacitors[0].next_history ==
                    next_history_current(1e-4, 10e-6, p.capacitors[0].voltage,
                                         p.capacitors[0].history));
            prev = &p;
        }
    }
}

TEST_CASE("diode buck enters DCM early and matches the synchronous steady state", "[engine]") {
    const auto sync = run(parse_netlist(kBuckSync), benchmark_config());
    const auto diode = run(parse_netlist(kBuckDiode), benchmark_config());
    int dcm = 0;
    for (const auto& p : diode.periods) {
        if (p.cells[0].mode == ConductionMode::DCM) {
            ++dcm;
            CHECK(p.cells[0].i_l2 == 0.0);
            CHECK(p.cells[0].d + p.cells[0].d_p < 1.0);
        }
    }
    CHECK(dcm > 0);
    CHECK(rel_diff(tail_mean(diode, 50, v2), tail_mean(sync, 50, v2)) < 0.005);
    CHECK(diode.periods.back().cells[0].mode == ConductionMode::CCM);
}

TEST_CASE("mode prediction", "[engine]") {
    const CellParams diode{10e-6, 1.0, Rectifier::Diode, CellFamily::Basic};
    const CellParams sync{10e-6, 1.0, Rectifier::Synchronous, CellFamily::Basic};

    // Output still far below its final value: the rectifier interval is long.
    CHECK(predict_mode(diode, 0.5, 0.0, {10.0, -0.5}).mode == ConductionMode::CCM);

    // Output overshoot after the first current pulse: short rectifier interval.
    auto overshoot = predict_mode(diode, 0.5, 0.0, {10.0 - 9.5, -9.5});
    CHECK(overshoot.mode == ConductionMode::DCM);
    CHECK(overshoot.d_p == Approx(0.5 * 0.5 / 9.5));

    auto startup_dcm = predict_mode(diode, 0.2, 0.0, {2.0, -8.0});
    CHECK(startup_dcm.mode == ConductionMode::DCM);
    CHECK(startup_dcm.d_p == Approx(0.05));

    CHECK(predict_mode(sync, 0.2, 0.0, {2.0, -8.0}).mode == ConductionMode::CCM);
    CHECK(predict_mode(diode, 0.5, 3.75, {5.0, -5.0}).mode == ConductionMode::CCM);
    CHECK(predict_mode(diode, 0.2, 3.75, {2.0, -8.0}).mode == ConductionMode::CCM);
}

TEST_CASE("flyback reaches 20 V", "[engine]") {
    for (const char* net : {kFlybackSync, kFlybackDiode}) {
        const auto r = run(parse_netlist(net), benchmark_config());
        CHECK(tail_mean(r, 50, v2) == Approx(20.0).epsilon(0.01));
    }
    // Ten times longer: the output ringing has died out.
    SimConfig longer = benchmark_config();
    longer.t_end = 50e-3;
    const auto r = run(parse_netlist(kFlybackSync), longer);
    const auto& last = r.periods.back();
    CHECK(v2(last) == Approx(20.0).epsilon(1e-6));
    CHECK(il(last) == Approx(20.0).epsilon(1e-6));
    CHECK(last.cells[0].i_l0 == Approx(17.5).epsilon(1e-6));
    CHECK(last.cells[0].i_l1 == Approx(22.5).epsilon(1e-6));
    CHECK(last.cells[0].i_d_avg == Approx(5.0).epsilon(1e-6));
}

TEST_CASE("steady-state period is a fixed point", "[engine]") {
    SimConfig cfg = benchmark_config();
    cfg.t_end = 50e-3;
    const auto r = run(parse_netlist(kBuckSync), cfg);
    const auto& a = r.periods[r.periods.size() - 2];
    const auto& b = r.periods.back();
    for (std::size_t k = 0; k < a.node_voltages.size(); ++k) {
        CHECK(b.node_voltages[k] == Approx(a.node_voltages[k]).epsilon(1e-9));
    }
    CHECK(b.cells[0].i_l0 == Approx(a.cells[0].i_l0).epsilon(1e-9));
    CHECK(b.cells[0].i_l2 == Approx(a.cells[0].i_l2).epsilon(1e-9));
    CHECK(b.capacitors[0].history == Approx(a.capacitors[0].history).epsilon(1e-9));
    CHECK(b.cells[0].i_l0 == Approx(3.75).epsilon(1e-6));
    CHECK(b.cells[0].i_l1 == Approx(6.25).epsilon(1e-6));
}

TEST_CASE("light-load diode buck settles in DCM", "[engine]") {
    const auto r = run(parse_netlist(kBuckDcm), benchmark_config());
    const auto& last = r.periods.back();
    CHECK(last.cells[0].mode == ConductionMode::DCM);
    CHECK(last.cells[0].i_l0 == 0.0);
    CHECK(last.cells[0].i_l2 == 0.0);

    SimConfig refined = benchmark_config();
    refined.dcm_refine = true;
    const auto rr = run(parse_netlist(kBuckDcm), refined);
    CHECK(rel_diff(tail_mean(rr, 50, v2), tail_mean(r, 50, v2)) < 0.01);
}

TEST_CASE("factorization is reused while the geometry is fixed", "[engine]") {
    const auto c = parse_netlist(kBuckSync);
    PeriodStepper stepper(c, benchmark_config());
    auto rec = stepper.bootstrap();
    for (int k = 0; k < 100; ++k) {
        rec = stepper.step(rec);
    }
    CHECK(stepper.factorizations() == 1);
}

TEST_CASE("result lookups", "[engine]") {
    const auto r = run(parse_netlist(kBuckSync), SimConfig{0.5, 100e3, 1e-4, false});
    CHECK(r.cell_slot("SCN1") == 0);
    CHECK(r.capacitor_slot("C1") == 0);
    CHECK(r.vdc_slot("VDC1") == 0);
    CHECK_THROWS_AS(r.cell_slot("SCN9"), UnknownLabel);
    CHECK(r.node_voltage(r.periods[0], 0) == 0.0);
    CHECK(r.node_voltage(r.periods[0], 1) == Approx(10.0));
}
