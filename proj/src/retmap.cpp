#include "hetero/retmap.hpp"

#include <cmath>
#include <stdexcept>

namespace hetero {

void validate(const MapParams& mp)
{
    if (!(mp.K > 0.0) || !std::isfinite(mp.K)) throw ParameterError("K > 0 violated");
    if (!(mp.delta > 1.0) || !std::isfinite(mp.delta)) throw ParameterError("delta > 1 violated");
    if (!(mp.omega > 0.0) || !std::isfinite(mp.omega)) throw ParameterError("omega > 0 violated");
    if (!(mp.k1 >= 0.0) || !std::isfinite(mp.k1)) throw ParameterError("k1 >= 0 violated");
    if (!(mp.gamma >= 0.0) || !std::isfinite(mp.gamma)) throw ParameterError("gamma >= 0 violated");
}

MapParams map_params(const SystemParams& p, const DerivedConstants& dc, double eps)
{
    MapParams mp;
    mp.K = dc.K_map;
    mp.delta = dc.delta;
    mp.omega = p.omega;
    mp.k1 = dc.k1;
    mp.gamma = dc.delta_hat * dc.K1 * p.gamma / eps;
    return mp;
}

double canonical_s(double s, double period)
{
    double r = std::fmod(s, period);
    if (r < 0.0) r += period;
    if (r >= period) r -= period;
    return r;
}

double integral_IA(double A, double omega, double s, double t)
{
    if (A == 0.0) throw std::domain_error("integral_IA needs A != 0");
    const double w2 = 2.0 * omega;
    const double den = A * A + w2 * w2;
    auto prim = [&](double tau) {
        return -std::exp(-A * (tau - s)) * (A * std::sin(w2 * tau) + w2 * std::cos(w2 * tau)) / den;
    };
    return prim(t) - prim(s);
}

double integral_IA_expansion(const SystemParams& p, double s, double y1, double eps)
{
    const double A = p.beta - p.alpha;
    const double e = p.alpha + p.beta;
    const double dh = (p.alpha - p.beta) / e;
    const double T1 = s + std::log(eps / y1) / e;
    const double c1 = 1.0 / A;
    const double c2 = 2.0 * p.omega / (A * A);
    const double w2 = 2.0 * p.omega;
    const double pre = -A * A / (A * A + w2 * w2);
    const double grow = std::pow(eps / y1, dh);
    return pre * (grow * (c1 * std::sin(w2 * T1) + c2 * std::cos(w2 * T1)) -
                  (c1 * std::sin(w2 * s) + c2 * std::cos(w2 * s)));
}

LocalMap phi_v(double s, double y1, double w1, const SystemParams& p, const DerivedConstants& dc,
               double eps)
{
    if (!(y1 > 0.0)) throw std::domain_error("phi_v: y1 <= 0 lies on the stable manifold of v");
    const double e = p.alpha + p.beta;
    LocalMap out;
    out.T = s + std::log(eps / y1) / e;
    out.c = std::pow(eps, 1.0 - dc.delta_hat) * std::pow(y1, dc.delta_hat) +
            p.gamma * dc.k_bar * std::sin(2.0 * p.omega * out.T);
    out.w = w1 * std::pow(eps / y1, -2.0 / e);
    return out;
}

LocalMap phi_w(double s, double x2, double w2, const SystemParams& p, const DerivedConstants& dc,
               double eps)
{
    if (!(x2 > 0.0)) throw std::domain_error("phi_w: x2 <= 0 lies on the stable manifold of w");
    const double e = p.alpha + p.beta;
    LocalMap out;
    out.T = s + std::log(eps / x2) / e + p.gamma * dc.K1 / (x2 * e);
    out.c = std::pow(eps, 1.0 - dc.delta_hat) * std::pow(x2, dc.delta_hat) *
            (1.0 + p.gamma * dc.K1 * dc.delta_hat / x2);
    out.w = w2 * std::pow(eps / x2, -2.0 / e);
    return out;
}

std::pair<double, double> G_unperturbed(double y, double w, const DerivedConstants& dc)
{
    return {std::pow(y, dc.delta), w * std::pow(y, 2.0 * dc.K)};
}

CylinderPoint G_lift(const CylinderPoint& pt, const MapParams& mp)
{
    return {pt.s - std::log(pt.y) / mp.K,
            std::pow(pt.y, mp.delta) + mp.gamma * (1.0 + mp.k1 * std::sin(2.0 * mp.omega * pt.s))};
}

CylinderPoint G(const CylinderPoint& pt, const MapParams& mp)
{
    CylinderPoint q = G_lift(pt, mp);
    q.s = canonical_s(q.s, mp.period());
    return q;
}

CylinderPoint G_T(const CylinderPoint& pt, double T, const MapParams& mp)
{
    CylinderPoint q = G_lift(pt, mp);
    q.s -= T;
    return q;
}

FullReturn G_full(double s, double y, double w, const SystemParams& p, const DerivedConstants& dc,
                  double eps)
{
    const LocalMap v = phi_v(s, y, w, p, dc, eps);
    const LocalMap u = phi_w(v.T, v.c, v.w, p, dc, eps);
    return {u.T, u.c, u.w};
}

std::array<std::complex<double>, 2> Jacobian2::eigenvalues() const
{
    const double tr = trace();
    const double dt = det();
    const double disc = 0.25 * tr * tr - dt;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        // avoid cancellation in the smaller root
        const double big = tr >= 0.0 ? 0.5 * tr + r : 0.5 * tr - r;
        const double small = big != 0.0 ? dt / big : 0.5 * tr - r;
        return {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
    }
    const double im = std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
}

double Jacobian2::spectral_radius() const
{
    const auto ev = eigenvalues();
    return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

Jacobian2 jacobian_G(const CylinderPoint& pt, const MapParams& mp)
{
    return {1.0, -1.0 / (mp.K * pt.y),
            2.0 * mp.omega * mp.gamma * mp.k1 * std::cos(2.0 * mp.omega * pt.s),
            mp.delta * std::pow(pt.y, mp.delta - 1.0)};
}

bool in_range(const CylinderPoint& pt)
{
    return pt.y > 0.0 && pt.y <= 1.0 && std::isfinite(pt.s);
}

Orbit iterate(const PlanarMap& f, const CylinderPoint& pt, int n)
{
    if (n < 0) throw std::invalid_argument("iterate: n must be non-negative");
    Orbit o;
    o.points.reserve(static_cast<std::size_t>(n) + 1);
    o.points.push_back(pt);
    CylinderPoint cur = pt;
    for (int i = 0; i < n; ++i) {
        cur = f(cur);
        if (!in_range(cur)) {
            o.truncated = true;
            break;
        }
        o.points.push_back(cur);
    }
    return o;
}

} // namespace hetero
