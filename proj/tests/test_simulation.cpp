#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "imc/baselines.hpp"
#include "imc/contour_error.hpp"
#include "imc/simulation.hpp"

using namespace imc;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("pid discretization: trapezoidal integral, backward-difference derivative") {
    PidGains g;  // paper gains
    CHECK(g.Kp == 2.6);
    CHECK(g.Ki == 11.4);
    CHECK(g.Kd == 0.1);
    PidState s;
    const double Ts = 1e-4;
    CHECK(pid_step(s, 0.0, Ts, g) == 0.0);
    s.reset();
    const double u0 = pid_step(s, 1.0, Ts, g);
    CHECK(u0 == doctest::Approx(g.Kp + g.Ki * Ts / 2 + g.Kd / Ts));
    const double u1 = pid_step(s, 1.0, Ts, g);  // derivative collapses, integral grows
    CHECK(u1 == doctest::Approx(g.Kp + g.Ki * 1.5 * Ts));
}

TEST_CASE("pid step response on the printed slave plant is a stable regression") {
    auto [master, slave] = paper_plants();
    PidState s;
    PidGains g;
    Vec x = Vec::Zero(2);
    double peak = 0, y_end = 0;
    const double Ts = slave.Ts;
    for (long k = 0; k * Ts <= 10.0; ++k) {
        const double y = slave.C2 * x;
        const double u = pid_step(s, 1.0 - y, Ts, g);
        x = slave.G2 * x + slave.H2 * u;
        peak = std::max(peak, y);
        y_end = y;
    }
    // settles without overshoot; integral action removes the offset
    CHECK(y_end == doctest::Approx(0.99991).epsilon(1e-4));
    CHECK(peak <= y_end + 1e-12);
    CHECK(y_end < 1.0);
}

TEST_CASE("ccc correction geometry") {
    CccGains g;
    CHECK(g.Kx == 10.0);
    CHECK(g.Ky == 30.0);
    auto c = ccc_step(0.0, 0.0, 0.3, g);
    CHECK(c.du_x == 0.0);
    CHECK(c.du_y == 0.0);

    // error aligned with the tangent produces no correction
    const double phi = 0.7;
    c = ccc_step(std::cos(phi), std::sin(phi), phi, g);
    CHECK(c.epsilon_hat == doctest::Approx(0.0).epsilon(1e-12));

    c = ccc_step(0.0, 1.0, 0.0, g);
    CHECK(c.epsilon_hat == doctest::Approx(1.0));
    CHECK(c.du_y == doctest::Approx(g.Ky));
    CHECK(c.du_x == doctest::Approx(0.0));
}

TEST_CASE("contour distance: points on and off the curve") {
    // unit circle
    CurveFn circle = [](double v) { return Eigen::Vector2d(std::cos(v), std::sin(v)); };
    CurveFn dcircle = [](double v) { return Eigen::Vector2d(-std::sin(v), std::cos(v)); };
    CurvePolyline poly(circle, 0.0, 2 * kPi, 200000, dcircle);
    CHECK(poly.distance(Eigen::Vector2d(std::cos(1.1), std::sin(1.1))) < 1e-10);
    CHECK(poly.distance(Eigen::Vector2d(1.1, 0.0)) == doctest::Approx(0.1).epsilon(1e-7));
    long hint = -1;
    CHECK(poly.distance_near(Eigen::Vector2d(1.1, 0.0), 0.0, &hint) ==
          doctest::Approx(0.1).epsilon(1e-7));
}

TEST_CASE("contour distance agrees with a brute-force oracle at 10x density") {
    CurveFn curve = [](double v) { return Eigen::Vector2d(v, std::sin(v)); };
    CurveFn dcurve = [](double v) { return Eigen::Vector2d(1.0, std::cos(v)); };
    CurvePolyline poly(curve, 0.0, 6.4, 64000, dcurve);
    CurvePolyline dense(curve, 0.0, 6.4, 640000, nullptr);
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> ux(0.5, 5.9), uy(-1.5, 1.5);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector2d p(ux(rng), uy(rng));
        const double d0 = poly.distance(p);
        const double d1 = dense.distance_bruteforce(p);
        CHECK(std::fabs(d0 - d1) < 1e-8);
    }
}

TEST_CASE("zero-reference run records exact zeros everywhere") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.name = "zero";
    sc.master.c2 = 0;  // x1 = t
    sc.slave_fns = {{SlaveFnSpec::Type::zero, 0, 0, 0}};
    sc.horizon = 0.2;
    const RunResult res = run_closed_loop(sc);
    for (long k = 0; k < res.trace.rows(); ++k) {
        REQUIRE(res.trace.slaves[0].r2[k] == 0.0);
        REQUIRE(res.trace.slaves[0].y2[k] == 0.0);
        REQUIRE(res.trace.slaves[0].u2[k] == 0.0);
        REQUIRE(res.trace.slaves[0].u_im[k] == 0.0);
        REQUIRE(res.trace.slaves[0].u_st[k] == 0.0);
        REQUIRE(res.trace.contour_error[k] == 0.0);
    }
    CHECK(res.metrics.rms_um == 0.0);
}

TEST_CASE("identical scenarios give bit-identical traces") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.horizon = 0.3;
    const RunResult a = run_closed_loop(sc);
    const RunResult b = run_closed_loop(sc);
    REQUIRE(a.trace.rows() == b.trace.rows());
    for (long k = 0; k < a.trace.rows(); ++k) {
        REQUIRE(a.trace.slaves[0].y2[k] == b.trace.slaves[0].y2[k]);
        REQUIRE(a.trace.slaves[0].u2[k] == b.trace.slaves[0].u2[k]);
        REQUIRE(a.trace.contour_error[k] == b.trace.contour_error[k]);
    }
    CHECK(a.trace.scenario_hash == b.trace.scenario_hash);
}

TEST_CASE("trace row count and time stamps follow the horizon") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.horizon = 0.25;
    const RunResult res = run_closed_loop(sc);
    CHECK(res.trace.rows() == static_cast<long>(std::floor(sc.horizon / sc.Ts)) + 1);
    for (long k = 0; k < res.trace.rows(); ++k)
        REQUIRE(res.trace.t[k] == k * sc.Ts);
    // e2 = y2 - r2 at every row
    for (long k = 0; k < res.trace.rows(); ++k)
        REQUIRE(res.trace.slaves[0].e2[k] ==
                res.trace.slaves[0].y2[k] - res.trace.slaves[0].r2[k]);
}

TEST_CASE("pid slave tracks worse than tv-imcc on the sinusoid") {
    Scenario tv = builtin_scenario("sinusoid");
    tv.horizon = 2.0;
    Scenario pid = tv;
    pid.slave_controller = ControllerType::pid;
    const RunResult rtv = run_closed_loop(tv);
    const RunResult rpid = run_closed_loop(pid);
    CHECK(rtv.metrics.rms_um * 2 < rpid.metrics.rms_um);
}

TEST_CASE("halving Ts leaves the steady-state error at the numerical floor") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.horizon = 2.0;
    Scenario sc2 = sc;
    sc2.Ts = 5e-5;
    const RunResult r1 = run_closed_loop(sc);
    const RunResult r2 = run_closed_loop(sc2);
    auto steady_rms = [](const RunResult& r) {
        const long n = r.trace.rows(), h = n / 2;
        double s = 0;
        for (long k = h; k < n; ++k) s += r.trace.contour_error[k] * r.trace.contour_error[k];
        return std::sqrt(s / (n - h));
    };
    const double a = steady_rms(r1), b = steady_rms(r2);
    // both runs sit at the numerical floor; allow the absolute escape hatch
    CHECK(std::fabs(a - b) < std::max(0.1 * a, 1e-9));
}

TEST_CASE("tracked master mode closes the axial loop and schedules online") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.master_mode = MasterMode::tracked;
    sc.master.c2 = 0;  // plain ramp reference for the master PID
    sc.horizon = 2.0;
    for (ControllerType ctl :
         {ControllerType::tvimcc, ControllerType::pid, ControllerType::ccc}) {
        sc.slave_controller = ctl;
        const RunResult res = run_closed_loop(sc);
        const long n = res.trace.rows();
        CHECK(res.trace.x1[0] == 0.0);
        // the type-1 master loop carries a finite ramp lag; it must move with
        // the reference, not sit at zero
        const double lag = std::fabs(res.trace.x1[n - 1] - res.trace.x1_ref[n - 1]);
        CHECK(lag < 1.0);
        CHECK(res.trace.x1[n - 1] > 0.5);
        for (long k = 0; k < n; ++k) REQUIRE(std::isfinite(res.trace.contour_error[k]));
        CHECK(res.metrics.max_um < 1e4);
    }
    // the backward-difference schedule still tracks well after the transient
    sc.slave_controller = ControllerType::tvimcc;
    const RunResult res = run_closed_loop(sc);
    const long n = res.trace.rows();
    double tail = 0;
    for (long k = n / 2; k < n; ++k)
        tail = std::max(tail, std::fabs(res.trace.slaves[0].e2[k]));
    CHECK(tail < 1e-4);
}

TEST_CASE("assumption failures abort tv-imcc runs") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.kind = ContourKind::monotonic;
    sc.master.type = MasterSpec::Type::cosine;  // not monotone in time
    sc.horizon = 0.5;
    CHECK_THROWS_AS(run_closed_loop(sc), AssumptionFailure);
}

TEST_CASE("ccc is rejected outside two-axis compositions") {
    Scenario sc = builtin_scenario("four_axis");
    sc.slave_controller = ControllerType::ccc;
    CHECK_THROWS_AS(run_closed_loop(sc), ConfigError);
}

TEST_CASE("builtin scenarios carry the published forms") {
    const auto names = builtin_scenario_names();
    REQUIRE(names.size() == 4);

    const Scenario sin = builtin_scenario("sinusoid");
    CHECK(sin.master.position(2.0) == doctest::Approx(2.0 + 0.1 * std::sin(10.0)));
    CHECK(sin.master.nominal(2.0) == doctest::Approx(2.0));
    CHECK(sin.Ts == 1e-4);

    const Scenario circle = builtin_scenario("circle");
    CHECK(circle.kind == ContourKind::rotational);
    CHECK(circle.master.position(0.0) == doctest::Approx(1.0));
    CHECK(circle.slave_fns[0].eval(kPi / 2) == doctest::Approx(1.0));

    const Scenario heart = builtin_scenario("heart");
    CHECK(heart.slave_fns[0].eval(heart.master.phi0) == doctest::Approx(0.0).epsilon(1e-9));
    // real-valued branch: sgn(cos)|cos|^{2/3}
    CHECK(heart.slave_fns[0].eval(kPi) == doctest::Approx(-1.0));
    CHECK(heart.metrics_coscut == 1e-3);

    const Scenario four = builtin_scenario("four_axis");
    REQUIRE(four.n_slaves() == 3);
    CHECK(four.composition == CompositionType::four_axis_xy);
    CHECK(four.slave_fns[1].eval(0.0) == doctest::Approx(0.1));
    CHECK(four.slave_fns[2].eval(kPi / 20) == doctest::Approx(0.1).epsilon(1e-9));

    CHECK_THROWS_AS(builtin_scenario("nope"), ConfigError);
}

TEST_CASE("metrics invariants") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.horizon = 0.5;
    const RunResult res = run_closed_loop(sc);
    CHECK(res.metrics.rms_um <= res.metrics.max_um);
    CHECK(res.metrics.rms_um >= 0.0);
    CHECK(res.metrics.settling_index >= 0);
}

TEST_CASE("trace csv writes the fixed column order and round-trips") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.horizon = 0.05;
    const RunResult res = run_closed_loop(sc);
    std::stringstream ss;
    write_csv(res.trace, ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "k,t,x1_ref,x1,r2,y2,e2,u2,u_im,u_st,contour_error");
    ss.seekg(0);
    const SimulationTrace rt = read_csv(ss);
    REQUIRE(rt.rows() == res.trace.rows());
    for (long k = 0; k < rt.rows(); ++k) {
        REQUIRE(rt.slaves[0].y2[k] == res.trace.slaves[0].y2[k]);
        REQUIRE(rt.contour_error[k] == res.trace.contour_error[k]);
    }

    // multi-slave header names carry axis suffixes
    Scenario four = builtin_scenario("four_axis");
    four.horizon = 0.02;
    const RunResult r4 = run_closed_loop(four);
    std::stringstream s4;
    write_csv(r4.trace, s4);
    std::getline(s4, header);
    CHECK(header.find("r2_a2") != std::string::npos);
    CHECK(header.find("u_st_a4") != std::string::npos);
}

TEST_CASE("synthesis report carries plant stability and solver data") {
    Scenario sc = builtin_scenario("sinusoid");
    sc.horizon = 0.3;
    const RunResult res = run_closed_loop(sc);
    CHECK(res.synthesis.slave_spectral_radius > 1.0);  // printed model rounds unstable
    CHECK_FALSE(res.synthesis.slave_plant_stable);
    CHECK(res.synthesis.sylvester_residual_max <= 1e-10);
    CHECK(res.synthesis.eq46_min_margin >= 1e-8);
    CHECK(res.synthesis.placed_root_used);  // sampling zero of the printed model is non-Schur
    const std::string text = res.synthesis.text();
    CHECK(text.find("sylvester_residual_max") != std::string::npos);
}
