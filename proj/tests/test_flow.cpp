#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hetero/flow.hpp"
#include "hetero/retmap.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace hetero;

TEST_CASE("sphere stays invariant without forcing")
{
    const SystemParams p{1.0, -0.1, 0.0, 1.0};
    const IntegratorConfig cfg;
    const State3 u0{0.6, 0.0, 0.8};
    const auto tr = integrate({0.6, 0.3, std::sqrt(1 - 0.36 - 0.09)}, 0.0, 100.0, p, cfg);
    CHECK(sphere_drift(tr) < 1e-8);
    const auto tr2 = integrate(u0, 0.0, 100.0, p, cfg);
    CHECK(sphere_drift(tr2) < 1e-8);
}

TEST_CASE("equilibrium start stays put")
{
    const auto tr = integrate({0, 0, 1}, 0.0, 50.0, {1.0, -0.1, 0.0, 1.0}, {});
    for (const auto& u : tr.states()) {
        CHECK(u[0] == 0.0);
        CHECK(u[1] == 0.0);
        CHECK(u[2] == 1.0);
    }
}

TEST_CASE("sphere attracts off-sphere starts")
{
    const auto tr = integrate({0.0, 0.66, 0.88}, 0.0, 5.0, {1.0, -0.1, 0.0, 1.0}, {});
    CHECK(radius(tr.states().front()) == doctest::Approx(1.1));
    double prev = 1e9;
    for (double t = 0.0; t <= 5.0; t += 0.25) {
        const double r = radius(tr.at(t)) - 1.0;
        CHECK(r < prev);
        prev = r;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("strong forcing pushes the flow off the sphere")
{
    const auto tr = integrate(in_v_state(1e-3, 0.1), 0.0, 60.0, {1.0, -0.1, 0.2, 1.0}, {});
    CHECK(sphere_drift(tr) > 1e-2);
}

TEST_CASE("escape from v follows the linear flow")
{
    const SystemParams p{1.0, -0.1, 0.0, 1.0};
    const State3 u0{1e-3, 1e-3, 1.0};
    const auto tr = integrate(u0, 0.0, 3.0, p, {});
    for (double t : {0.5, 1.0, 2.0, 3.0}) {
        const State3 u = tr.at(t);
        // linear part near v: y' = (alpha+beta) y, x' = -(alpha-beta) x
        CHECK(u[1] == doctest::Approx(1e-3 * std::exp(0.9 * t)).epsilon(1e-4));
        CHECK(u[0] == doctest::Approx(1e-3 * std::exp(-1.1 * t)).epsilon(1e-4));
    }
}

TEST_CASE("dense output is continuous and matches the nodes")
{
    const SystemParams p{1.0, -0.1, 0.05, 1.0};
    const auto tr = integrate(in_v_state(1e-2, 0.1), 0.0, 20.0, p, {});
    const auto& ts = tr.times();
    const auto& us = tr.states();
    REQUIRE(ts.size() > 10);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        CHECK(ts[i] > ts[i - 1]);
        const State3 a = tr.at(ts[i]);
        for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(us[i][k]).epsilon(1e-12));
    }
}

TEST_CASE("divergence and bad input")
{
    CHECK_THROWS_AS(integrate({6.1, 6.1, 6.1}, 0.0, 10.0, {1.0, -0.1, 0.0, 1.0}, {}), FlowError);
    CHECK_THROWS_AS(integrate({0, 0, 1}, 1.0, 1.0, {1.0, -0.1, 0.0, 1.0}, {}), std::invalid_argument);
    IntegratorConfig bad;
    bad.eps = 0.7;
    CHECK_THROWS_AS(validate(bad), ParameterError);
    bad = {};
    bad.rel_tol = 1e-2;
    CHECK_THROWS_AS(validate(bad), ParameterError);
}

TEST_CASE("flight time through the box at v")
{
    const SystemParams p{1.0, -0.1, 0.0, 1.0};
    const IntegratorConfig cfg;
    const double y1 = 1e-3;
    const auto c = next_section_crossing(in_v_state(y1, cfg.eps), 0.0, Section::OutV, p, cfg);
    CHECK(c.point.time == doctest::Approx(std::log(cfg.eps / y1) / 0.9).epsilon(0.01));
    CHECK(std::abs(c.state[1] - cfg.eps) < cfg.abs_tol);
    CHECK(c.point.c1 > 0.0);
    CHECK(c.point.c1 < cfg.eps);
}

TEST_CASE("flight-time law has slope 1/(alpha+beta)")
{
    const SystemParams p{1.0, -0.1, 0.0, 1.0};
    const IntegratorConfig cfg;
    std::vector<double> x, t;
    for (int j = 0; j <= 9; ++j) {
        const double y1 = std::pow(10.0, -6.0 + 3.0 * j / 9.0);
        x.push_back(std::log(1.0 / y1));
        t.push_back(next_section_crossing(in_v_state(y1, cfg.eps), 0.0, Section::OutV, p, cfg).point.time);
    }
    CHECK(oracle::slope(x, t) == doctest::Approx(1.0 / 0.9).epsilon(0.01));
}

TEST_CASE("start on the stable manifold of v never leaves")
{
    IntegratorConfig cfg;
    cfg.horizon = 30.0;
    const State3 u{cfg.eps, 0.0, std::sqrt(1 - cfg.eps * cfg.eps)};
    try {
        next_section_crossing(u, 0.0, Section::OutV, {1.0, -0.1, 0.0, 1.0}, cfg);
        FAIL("expected a timeout");
    } catch (const FlowError& e) {
        CHECK(e.kind() == FlowError::Kind::Timeout);
    }
}

TEST_CASE("forcing changes the flight time at first order")
{
    const IntegratorConfig cfg;
    auto flight = [&](double g) {
        return next_section_crossing(in_v_state(1e-3, cfg.eps), 0.3, Section::OutV, {1.0, -0.1, g, 1.0}, cfg)
            .point.time;
    };
    const double t0 = flight(0.0), d4 = flight(1e-4) - t0, d5 = flight(1e-5) - t0;
    CHECK(d4 != 0.0);
    CHECK(d4 / d5 == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("numerical return without forcing")
{
    const SystemParams p{1.0, -0.1, 0.0, 1.0};
    const IntegratorConfig cfg;
    const auto dc = derive_constants(p);
    const double y = 1e-3;
    std::vector<double> ys;
    for (double s : {0.0, 0.5, 1.0, 2.0, 3.0}) ys.push_back(numerical_return(s, y, in_v_sphere_w(y, cfg.eps), p, cfg).y);
    for (double v : ys) CHECK(std::abs(v / ys.front() - 1.0) < 10 * cfg.rel_tol);
    const double analytic = cfg.eps * std::pow(y / cfg.eps, dc.delta);
    // global-map distortion factor, measured once at eps = 0.1 and frozen
    CHECK(ys.front() / analytic == doctest::Approx(0.1671794).epsilon(1e-5));

    std::vector<double> x, t;
    for (int j = 0; j <= 6; ++j) {
        const double yj = std::pow(10.0, -6.0 + 3.0 * j / 6.0);
        x.push_back(-std::log(yj));
        t.push_back(numerical_return(0.2, yj, in_v_sphere_w(yj, cfg.eps), p, cfg).return_time);
    }
    CHECK(oracle::slope(x, t) == doctest::Approx(dc.K).epsilon(0.02));
}

TEST_CASE("numerical return logs four crossings in order")
{
    const SystemParams p{1.0, -0.1, 1e-4, 1.0};
    const IntegratorConfig cfg;
    const auto r = numerical_return(0.4, 1e-2, in_v_sphere_w(1e-2, cfg.eps), p, cfg);
    CHECK(r.log[0].section == Section::OutV);
    CHECK(r.log[1].section == Section::InW);
    CHECK(r.log[2].section == Section::OutW);
    CHECK(r.log[3].section == Section::InV);
    for (int k = 1; k < 4; ++k) CHECK(r.log[k].time > r.log[k - 1].time);
    for (const auto& sp : r.log) {
        CHECK(sp.c1 > 0.0);
        CHECK(sp.c1 < cfg.eps);
        CHECK(std::abs(sp.c2) < cfg.eps);
    }
    CHECK(r.s >= 0.0);
    CHECK(r.s < pi);
}

TEST_CASE("reflection y -> -y commutes with the forced flow")
{
    const SystemParams p{1.0, -0.1, 0.05, 1.0};
    const State3 a{0.3, 0.4, std::sqrt(1 - 0.25)}, b{0.3, -0.4, std::sqrt(1 - 0.25)};
    const auto ta = integrate(a, 0.0, 15.0, p, {}), tb = integrate(b, 0.0, 15.0, p, {});
    for (double t = 0.0; t <= 15.0; t += 1.5) {
        const State3 ua = ta.at(t), ub = tb.at(t);
        CHECK(ua[0] == doctest::Approx(ub[0]).epsilon(1e-7));
        CHECK(ua[1] == doctest::Approx(-ub[1]).epsilon(1e-7));
        CHECK(ua[2] == doctest::Approx(ub[2]).epsilon(1e-7));
    }
}
