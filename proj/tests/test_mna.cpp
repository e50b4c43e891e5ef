#include "avgcell/engine.hpp"
#include "avgcell/mna.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace avgcell;
using namespace avgcell::testing;
using Catch::Approx;

namespace {

constexpr double kTs = 10e-6;

// The order-5 buck system written out by hand for d = d_p = 0.5,
// G_C = 2C/T_s = 20 S, G_L = T_s/L = 1, R = 5 ohm.
// Unknowns: v1, v2, i_VDC, i_S, i_D.
DenseMatrix hand_written_buck(double d, double dp) {
    const double gc = 20.0;
    const double gl = 1.0;
    const double r = 5.0;
    DenseMatrix a(5, 5);
    a(0, 2) = 1.0;
    a(0, 3) = 1.0;
    a(1, 1) = gc + 1.0 / r;
    a(1, 3) = -1.0;
    a(1, 4) = -1.0;
    a(2, 0) = 1.0;
    a(3, 0) = -d * d * gl / 2.0;
    a(3, 1) = d * d * gl / 2.0;
    a(3, 3) = 1.0;
    a(4, 0) = -d * dp * gl;
    a(4, 1) = dp * gl * (d + dp / 2.0);
    a(4, 4) = 1.0;
    return a;
}

MnaSystem assembled_buck(double i_l0, double history, double d = 0.5) {
    const auto c = parse_netlist(kBuckSync);
    SimConfig cfg = benchmark_config();
    cfg.duty = d;
    PeriodStepper stepper(c, cfg);
    stepper.assemble({{d, 1.0 - d, ConductionMode::CCM, i_l0}}, {history});
    return stepper.system();
}

}  // namespace

TEST_CASE("layout ordering and order", "[mna]") {
    const auto buck = build_layout(parse_netlist(kBuckSync));
    CHECK(buck.order == 5);
    CHECK(buck.node_row(1) == 0);
    CHECK(buck.node_row(2) == 1);
    CHECK(buck.node_row(0) == -1);
    CHECK(buck.vdc_row(0) == 2);
    CHECK(buck.switch_row(1) == 3);
    CHECK(buck.diode_row(1) == 4);

    const auto no_source = build_layout(parse_netlist("SCN1 1 1 0 2 1e-5 0\nR 1 1 0 5\nR 2 2 0 5\n"));
    CHECK(no_source.order == 4);

    const auto cascade = build_layout(parse_netlist(
        "VDC 1 1 0 20\nSCN 1 1 0 2 1e-5 0\nC 1 2 0 1e-4 0\nSCN 2 2 0 3 1e-5 0\nC 2 3 0 1e-4 0\n"
        "R 1 3 0 5\nR 2 4 0 1\nR 3 4 3 1\n"));
    CHECK(cascade.order == 4 + 1 + 4);
}

TEST_CASE("companion constants", "[mna]") {
    CHECK(capacitor_conductance(100e-6, kTs) == Approx(20.0));
    CHECK(cell_gain(10e-6, kTs) == Approx(1.0));
    // Constant 5 V: the history current is a fixed point with zero capacitor current.
    const double i0 = capacitor_conductance(100e-6, kTs) * 5.0;
    CHECK(i0 == Approx(100.0));
    CHECK(next_history_current(100e-6, kTs, 5.0, i0) == Approx(100.0));
}

TEST_CASE("buck matrix equals the hand-written system at d = 0.5", "[mna]") {
    const auto sys = assembled_buck(0.0, 0.0);
    const auto expected = hand_written_buck(0.5, 0.5);
    REQUIRE(sys.a.rows() == 5);
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
            INFO("row " << r << " col " << c);
            CHECK(sys.a(r, c) == Approx(expected(r, c)).margin(1e-12));
        }
    }
    CHECK(sys.a(3, 0) == Approx(-0.125));
    CHECK(sys.a(3, 1) == Approx(0.125));
}

TEST_CASE("right-hand side entries", "[mna]") {
    const auto sys = assembled_buck(3.0, 7.0);
    CHECK(sys.z[0] == 0.0);
    CHECK(sys.z[1] == Approx(-4.0 + 7.0));  // -I_OUT + i0
    CHECK(sys.z[2] == 10.0);                // source voltage
    CHECK(sys.z[3] == Approx(0.5 * 3.0));   // d i_L0
    CHECK(sys.z[4] == Approx(0.5 * 3.0));   // d_p i_L0
}

TEST_CASE("element stamps", "[mna]") {
    const auto c = parse_netlist(kBuckSync);
    auto sys = make_system(c, kTs);
    stamp_resistor(sys, c.elements[3]);
    CHECK(sys.a(1, 1) == Approx(0.2));
    stamp_vdc(sys, c.elements[0], 0);
    CHECK(sys.z[2] == 10.0);
    stamp_idc(sys, c.elements[4]);
    CHECK(sys.z[1] == -4.0);
    stamp_capacitor(sys, c.elements[2], 0.0);
    CHECK(sys.a(1, 1) == Approx(20.2));

    auto zero = make_system(c, kTs);
    stamp_cell(zero, c.elements[1], 1, {0.0, 1.0, ConductionMode::CCM, 2.0});
    CHECK(zero.a(3, 0) == 0.0);
    CHECK(zero.a(3, 1) == 0.0);
    CHECK(zero.z[3] == 0.0);
}

TEST_CASE("first period solve and steady state", "[mna]") {
    auto first = assembled_buck(0.0, 0.0);
    solve(first);
    CHECK(first.x[0] == Approx(10.0));
    CHECK(first.x[2] == Approx(-first.x[3]));  // source current feeds the switch

    // At the periodic orbit: i_L0 = 3.75 A, i0 = G_C * 5 V.
    auto ss = assembled_buck(3.75, 100.0);
    solve(ss);
    CHECK(ss.x[1] == Approx(5.0).epsilon(1e-12));
    CHECK(ss.x[3] == Approx(2.5).epsilon(1e-12));
    CHECK(ss.x[4] == Approx(2.5).epsilon(1e-12));

    const auto ax = ss.a.multiply(ss.x);
    double res = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        res = std::max(res, std::abs(ax[i] - ss.z[i]));
    }
    CHECK(res <= 1e-10 * (ss.a.inf_norm() * inf_norm(ss.x) + inf_norm(ss.z)));
}

TEST_CASE("dense LU", "[mna]") {
    DenseMatrix one(1, 1);
    one(0, 0) = 1.0;
    auto x = LuFactorization::factor(one).solve(std::vector<double>{3.5});
    CHECK(x[0] == 3.5);

    DenseMatrix p(2, 2);
    p(0, 1) = 2.0;
    p(1, 0) = 4.0;
    auto y = LuFactorization::factor(p).solve(std::vector<double>{2.0, 8.0});
    CHECK(y[0] == Approx(2.0));
    CHECK(y[1] == Approx(1.0));

    DenseMatrix s(2, 2);
    s(0, 0) = 1.0;
    s(0, 1) = 2.0;
    s(1, 0) = 2.0;
    s(1, 1) = 4.0;
    CHECK_THROWS_AS(LuFactorization::factor(s), SingularSystem);
}

TEST_CASE("matrix is bit-identical across CCM periods", "[mna]") {
    const auto a = assembled_buck(0.0, 0.0).a;
    const auto b = assembled_buck(4.2, 33.0).a;
    CHECK(a == b);
}
