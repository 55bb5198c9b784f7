#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hetero/attractor.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hetero;

namespace {

MapParams curve_params() { return MapParams{3.0, 1.1, 1.0, 0.3, 0.005}; }

double oracle_root(double gamma, double d, double lo, double hi)
{
    return oracle::bisect([&](double y) { return std::pow(y, d) + gamma - y; }, lo, hi);
}

} // namespace

TEST_CASE("averaged map fixed points")
{
    const MapParams mp = curve_params();
    const auto a = averaged_fixed_points(0.01, mp);
    const double ys = std::pow(1.1, 1.0 / (1.0 - 1.1));
    CHECK(a.y_star == doctest::Approx(ys).epsilon(1e-14));
    CHECK(a.y_star == doctest::Approx(0.3855).epsilon(1e-3));
    CHECK(a.y_hat == doctest::Approx(0.035).epsilon(0.02));
    CHECK(a.y_hat == doctest::Approx(oracle_root(0.01, 1.1, 0.01, ys)).epsilon(1e-12));
    CHECK(a.y_tilde == doctest::Approx(oracle_root(0.01, 1.1, ys, 1.0)).epsilon(1e-12));
    CHECK(a.y_hat < 0.01 * 1.1 / 0.1);
    CHECK(a.y_hat > 0.01);
    CHECK(a.y_tilde > 0.01 + std::pow(1.1, 1.1 / (1.0 - 1.1)));
    CHECK(a.R == doctest::Approx(2 * 0.3 / (1 - 1.1 * std::pow(a.y_hat, 0.1))).epsilon(1e-14));
    CHECK(a.R > 0.0);

    const auto tiny = averaged_fixed_points(1e-9, mp);
    CHECK(tiny.y_hat < 1e-8);
    CHECK(tiny.y_tilde > 0.999);

    const auto dbl = averaged_fixed_points(mp.M(), mp);
    CHECK(dbl.y_hat == doctest::Approx(ys).epsilon(1e-10));
    CHECK(dbl.y_tilde == doctest::Approx(ys).epsilon(1e-10));
    CHECK_THROWS_AS(averaged_fixed_points(mp.M() * 1.001, mp), NoFixedPointsError);
    CHECK_THROWS_AS(averaged_fixed_points(0.0, mp), ParameterError);

    for (double g = 1e-4; g < mp.M(); g *= 1.5) {
        const auto b = averaged_fixed_points(g, mp);
        CHECK(std::abs(std::pow(b.y_hat, 1.1) + g - b.y_hat) < 1e-15);
        CHECK(b.y_hat < b.y_star);
        CHECK(b.y_tilde > b.y_star);
    }
}

TEST_CASE("invariant curve without forcing variation is flat")
{
    MapParams mp = curve_params();
    mp.k1 = 0.0;
    const auto c = invariant_curve(mp);
    const double yh = averaged_fixed_points(mp.gamma, mp).y_hat;
    for (double h : c.h) CHECK(h == doctest::Approx(yh).epsilon(1e-9));
    const double rn = rotation_number(c, mp, 1000);
    CHECK(rn == doctest::Approx(-std::log(yh) / (mp.K * mp.period())).epsilon(1e-9));
}

TEST_CASE("invariant curve in the annulus")
{
    const MapParams mp = curve_params();
    CurveOptions opt;
    const auto c = invariant_curve(mp, opt);
    REQUIRE(c.s.size() == 512);
    CHECK(c.residual < 10 * opt.tol);
    CHECK(winding_degree(c, mp) == 1);
    const auto a = averaged_fixed_points(mp.gamma, mp);
    for (double h : c.h) {
        CHECK(h >= a.y_hat - a.R * mp.gamma);
        CHECK(h <= a.y_hat + a.R * mp.gamma);
    }
    CHECK(c.eval(0.3) == doctest::Approx(c.eval(0.3 + mp.period())).epsilon(1e-12));
    CHECK(c.eval(c.s[7]) == doctest::Approx(c.h[7]).epsilon(1e-14));
    double lo = 1e300, hi = -1e300;
    for (double h : c.h) lo = std::min(lo, h), hi = std::max(hi, h);
    CHECK(hi - lo > 1e-4);

    // the curve attracts nearby orbits
    CylinderPoint q{1.0, c.eval(1.0) * 1.05};
    for (int i = 0; i < 400; ++i) q = G(q, mp);
    CHECK(std::abs(q.y - c.eval(q.s)) < 1e-8);

    CurveOptions bad;
    bad.grid_size = 4;
    CHECK_THROWS_AS(invariant_curve(mp, bad), std::invalid_argument);
    MapParams fold = mp;
    fold.omega = 2.0;
    CHECK_THROWS_AS(invariant_curve(fold), GraphError);
}

TEST_CASE("annulus is mapped into itself")
{
    const auto a = annulus_invariance(curve_params(), 200, 99);
    CHECK(a.samples == 200);
    CHECK(a.mapped_inside == 200);
    CHECK(a.y_lo < a.y_hi);
}

TEST_CASE("rotation number")
{
    const MapParams mp = curve_params();
    const auto c = invariant_curve(mp);
    const double r1 = rotation_number(c, mp, 10000), r2 = rotation_number(c, mp, 100000);
    CHECK(std::abs(r1 - r2) < 1e-5);

    // frequency-locked on a period-3 sink
    const MapParams lock{3.0, 1.1, 1.5, 0.9, 0.005};
    const auto cl = invariant_curve(lock);
    const auto sink = find_periodic_sink({cl.s[0], cl.h[0]}, 0.0, lock, 20000, 30);
    REQUIRE(sink.found);
    CHECK(sink.period == 3);
    CHECK(rotation_number(cl, lock, 30000) == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("stable and unstable manifolds of a saddle")
{
    const MapParams mp{3.0, 1.1, 1.0, 0.5, 0.05};
    const double T = 0.64;
    const FixedPointRecord* saddle = nullptr;
    const auto fp = fixed_points_at_T(T, mp);
    for (const auto& r : fp)
        if (r.stability == Stability::Saddle) saddle = &r;
    REQUIRE(saddle);
    const double lu = std::max(saddle->eigenvalues[0].real(), saddle->eigenvalues[1].real());
    const double ls = std::min(saddle->eigenvalues[0].real(), saddle->eigenvalues[1].real());
    ManifoldOptions opt;
    const auto br = trace_manifolds(*saddle, mp, opt);
    REQUIRE(br.size() == 4);
    for (const auto& b : br) {
        REQUIRE(b.points.size() > 10);
        const double d0 = std::hypot(b.points[0].s - saddle->s, b.points[0].y - saddle->y);
        CHECK(d0 <= 1e-6 * 1.0001);
        REQUIRE(b.segment_lengths.size() > 5);
        const bool unstable = b.side == ManifoldSide::UnstablePlus || b.side == ManifoldSide::UnstableMinus;
        const double factor = unstable ? lu : 1.0 / ls;
        for (std::size_t i = 1; i < 5; ++i)
            CHECK(b.segment_lengths[i] / b.segment_lengths[i - 1] == doctest::Approx(factor).epsilon(1e-3));
    }
    CHECK_FALSE(homoclinic_at_T(T, mp).found);

    // a sink is rejected
    for (const auto& r : fp)
        if (r.stability == Stability::Sink) CHECK_THROWS_AS(trace_manifolds(r, mp), std::domain_error);
}

TEST_CASE("homoclinic crossing under strong twist")
{
    MapParams mp{3.0, 1.1, 12.0, 0.9, 0.0};
    mp.gamma = 0.5 * mp.M() / (1.0 + mp.k1);
    ManifoldOptions mo;
    mo.arc_budget = 20.0;
    mo.max_points = 100000;
    const auto h = homoclinic_at_T(1.1915, mp, mo);
    CHECK(h.found);
    CHECK_FALSE(h.points.empty());
}

TEST_CASE("Lyapunov exponents")
{
    const MapParams mp{3.0, 1.1, 1.0, 0.5, 0.05};
    for (double T : {0.6, 0.64}) {
        for (const auto& r : fixed_points_at_T(T, mp)) {
            if (r.stability != Stability::Sink) continue;
            const double rho = std::max(std::abs(r.eigenvalues[0]), std::abs(r.eigenvalues[1]));
            const auto L = lyapunov_exponent({r.s + 1e-3, r.y}, T, mp, 20000, 2000);
            CHECK_FALSE(L.truncated);
            CHECK(L.exponent < 0.0);
            CHECK(L.exponent == doctest::Approx(std::log(rho)).epsilon(0.02));
            const auto ps = find_periodic_sink({r.s + 1e-3, r.y}, T, mp, 5000, 10);
            REQUIRE(ps.found);
            CHECK(ps.period == 1);
            CHECK(ps.log_rate == doctest::Approx(std::log(rho)).epsilon(1e-6));
        }
    }

    const MapParams qp = curve_params();
    const auto c = invariant_curve(qp);
    const auto L = lyapunov_exponent({c.s[0], c.h[0]}, 0.0, qp, 20000, 1000);
    CHECK(std::abs(L.exponent) < 1e-2);

    MapParams big = qp;
    big.gamma = 0.9;
    CHECK(lyapunov_exponent({0.4, 0.5}, 0.0, big, 100, 0).truncated);
}
