#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hetero/model.hpp"

#include <cmath>
#include <random>

using namespace hetero;

namespace {

// Constants recomputed in long double straight from (alpha, beta, omega).
struct Ref {
    long double dh, d, K, Kh, kbar, K1;
};

Ref reference(long double a, long double b, long double w)
{
    const long double e = a + b, c = a - b;
    const long double pi_l = 3.141592653589793238462643383279502884L;
    return {c / e, c * c / (e * e), 2 * a / (e * e), pi_l * e * e / (2 * a), 1 / std::sqrt(c * c + 4 * w * w),
            2 * w / (e * e + 4 * w * w)};
}

State3 random_sphere_point(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    State3 u{n(rng), n(rng), n(rng)};
    const double r = radius(u);
    for (double& c : u) c /= r;
    return u;
}

} // namespace

TEST_CASE("derived constants for alpha=1, beta=-0.1")
{
    const SystemParams p{1.0, -0.1, 0.0, 1.0};
    const auto dc = derive_constants(p);
    const Ref r = reference(1.0L, -0.1L, 1.0L);
    CHECK(dc.delta_hat == doctest::Approx(static_cast<double>(r.dh)).epsilon(1e-15));
    CHECK(dc.delta == doctest::Approx(static_cast<double>(r.d)).epsilon(1e-15));
    CHECK(dc.K == doctest::Approx(static_cast<double>(r.K)).epsilon(1e-15));
    CHECK(dc.K_hat == doctest::Approx(static_cast<double>(r.Kh)).epsilon(1e-15));
    CHECK(dc.delta_hat == doctest::Approx(1.222222).epsilon(1e-6));
    CHECK(dc.delta == doctest::Approx(1.493827).epsilon(1e-6));
    CHECK(dc.K == doctest::Approx(2.469136).epsilon(1e-6));
    CHECK(dc.K_hat == doctest::Approx(1.272345).epsilon(1e-6));
    CHECK(std::abs(dc.K * dc.K_hat - pi) < 4e-16 * pi);
    CHECK(dc.K_map == doctest::Approx(1.0 / dc.K));
    CHECK(dc.k_bar == doctest::Approx(static_cast<double>(r.kbar)).epsilon(1e-15));
    CHECK(dc.K1 == doctest::Approx(static_cast<double>(r.K1)).epsilon(1e-15));
    CHECK(dc.k1 == doctest::Approx(static_cast<double>(r.kbar / r.K1)).epsilon(1e-14));
    CHECK(dc.reduction_valid);
}

TEST_CASE("peak of F for K=3, delta=1.1")
{
    CHECK(peak_time(3.0, 1.1) == doctest::Approx(std::log(1.1) / 0.3).epsilon(1e-15));
    CHECK(peak_time(3.0, 1.1) == doctest::Approx(0.3177007).epsilon(1e-7));
    CHECK(peak_value(1.1) == doctest::Approx(std::pow(1.1, -10.0) - std::pow(1.1, -11.0)).epsilon(1e-14));
    CHECK(peak_value(1.1) == doctest::Approx(0.0350494).epsilon(1e-6));
}

TEST_CASE("weak attraction limit beta -> 0")
{
    const auto dc = derive_constants({1.0, -1e-9, 0.0, 1.0});
    CHECK(dc.delta == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(dc.K == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(dc.M < 1e-7);
}

TEST_CASE("invariants over random valid parameters")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ua(0.1, 5.0), uf(0.01, 0.99), uw(0.1, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double a = ua(rng);
        const SystemParams p{a, -a * uf(rng), 0.0, uw(rng)};
        const auto dc = derive_constants(p);
        CHECK(dc.delta > 1.0);
        CHECK(dc.M > 0.0);
        CHECK(dc.M < 1.0);
        CHECK(dc.T_M > 0.0);
        CHECK(std::abs(dc.K * dc.K_hat / pi - 1.0) < 1e-15);
        const auto [v, w] = equilibria(p);
        CHECK(v.contracting / v.expanding == doctest::Approx(dc.delta_hat).epsilon(1e-15));
        CHECK(w.expanding > 0.0);
    }
}

TEST_CASE("validation names the violated inequality")
{
    auto msg = [](const SystemParams& p) {
        try {
            validate(p);
        } catch (const ParameterError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(msg({-1.0, -0.1, 0.0, 1.0}).find("alpha > 0") != std::string::npos);
    CHECK(msg({1.0, 0.1, 0.0, 1.0}).find("beta < 0") != std::string::npos);
    CHECK(msg({1.0, -1.5, 0.0, 1.0}).find("|beta| < alpha") != std::string::npos);
    CHECK(msg({1.5, -0.5, 0.0, 1.0}).find("-2") != std::string::npos);
    CHECK(msg({1.0, -0.1, -0.1, 1.0}).find("gamma") != std::string::npos);
    CHECK(msg({1.0, -0.1, 0.0, 0.0}).find("omega") != std::string::npos);
    CHECK_THROWS_AS(derive_constants({1.0, 0.2, 0.0, 1.0}), ParameterError);
    CHECK(warnings({1.495, -0.5, 0.0, 1.0}).size() >= 1);
    CHECK(warnings({1.0, -0.1, 0.0, 1.0}).empty());
    CHECK_FALSE(derive_constants({5.0, -4.0, 0.0, 1.0}).reduction_valid);
}

TEST_CASE("k1 override")
{
    const auto dc = derive_constants({1.0, -0.1, 0.0, 1.0}, 0.5);
    CHECK(dc.k1 == 0.5);
    CHECK_THROWS_AS(derive_constants({1.0, -0.1, 0.0, 1.0}, -1.0), ParameterError);
}

TEST_CASE("vector field examples")
{
    const SystemParams p0{1.0, -0.1, 0.0, 1.0};
    for (double t : {0.0, 0.7, 3.0}) {
        const auto f = vector_field(t, {0, 0, 1}, p0);
        CHECK(f[0] == 0.0);
        CHECK(f[1] == 0.0);
        CHECK(f[2] == 0.0);
    }
    const auto f = vector_field(0.0, {1, 0, 0}, p0);
    CHECK(f[0] == doctest::Approx(0.0));
    CHECK(f[1] == doctest::Approx(0.0));
    CHECK(f[2] == doctest::Approx(1.0));

    const SystemParams p1{1.0, -0.1, 0.1, 1.0};
    const auto g = vector_field(pi / 4.0, {0, 0, 1}, p1);
    CHECK(g[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g[1] == 0.0);
    CHECK(g[2] == 0.0);
}

TEST_CASE("equilibria")
{
    const auto [v, w] = equilibria({1.0, -0.1, 0.0, 1.0});
    CHECK(v.expanding == doctest::Approx(0.9));
    CHECK(v.contracting == doctest::Approx(1.1));
    CHECK(w.expanding == doctest::Approx(0.9));
    CHECK(w.contracting == doctest::Approx(1.1));
    CHECK(v.radial == -2.0);
    CHECK(v.location[2] == 1.0);
    CHECK(w.location[2] == -1.0);
    CHECK(derive_constants({1.0, -0.5, 0.0, 1.0}).delta == doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("sphere is invariant and the field has the symmetries")
{
    std::mt19937_64 rng(5);
    const SystemParams p{1.0, -0.1, 0.0, 1.0};
    for (int i = 0; i < 500; ++i) {
        const State3 u = random_sphere_point(rng);
        const auto f = vector_field(0.3, u, p);
        CHECK(std::abs(u[0] * f[0] + u[1] * f[1] + u[2] * f[2]) < 1e-14);
        const State3 ry{u[0], -u[1], u[2]}, rx{-u[0], u[1], u[2]};
        const auto fy = vector_field(0.3, ry, p), fx = vector_field(0.3, rx, p);
        CHECK(fy[0] == doctest::Approx(f[0]));
        CHECK(fy[1] == doctest::Approx(-f[1]));
        CHECK(fy[2] == doctest::Approx(f[2]));
        CHECK(fx[0] == doctest::Approx(-f[0]));
        CHECK(fx[1] == doctest::Approx(f[1]));
        CHECK(fx[2] == doctest::Approx(f[2]));
    }
    const SystemParams pf{1.0, -0.1, 0.2, 1.3};
    for (int i = 0; i < 100; ++i) {
        const State3 u = random_sphere_point(rng);
        const double t = 10.0 * i / 100.0;
        const auto a = vector_field(t, u, pf), b = vector_field(t + pi / pf.omega, u, pf);
        for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
    }
}
