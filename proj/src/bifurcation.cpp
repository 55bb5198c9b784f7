#include "hetero/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetero {

double F_of_T(double T, const MapParams& mp)
{
    // e^{-KT} - e^{-delta K T}, written to keep precision for delta close to 1
    return -std::exp(-mp.K * T) * std::expm1(-(mp.delta - 1.0) * mp.K * T);
}

double dF_dT(double T, const MapParams& mp)
{
    return -mp.K * std::exp(-mp.K * T) + mp.delta * mp.K * std::exp(-mp.delta * mp.K * T);
}

double d2F_dT2(double T, const MapParams& mp)
{
    const double K2 = mp.K * mp.K;
    return K2 * std::exp(-mp.K * T) - mp.delta * mp.delta * K2 * std::exp(-mp.delta * mp.K * T);
}

const char* region_name(RegionLabel r)
{
    switch (r) {
    case RegionLabel::R1: return "R1";
    case RegionLabel::R2: return "R2";
    case RegionLabel::R3: return "R3";
    case RegionLabel::R4: return "R4";
    case RegionLabel::R5: return "R5";
    case RegionLabel::Boundary: return "Boundary";
    }
    return "?";
}

Region classify_region(double k1, double gamma, const MapParams& mp)
{
    if (!(k1 > 0.0) || !(gamma > 0.0)) throw ParameterError("classify_region needs k1 > 0 and gamma > 0");
    const double M = mp.M();
    Region r{RegionLabel::Boundary, gamma * (1.0 - k1) - M, gamma * (1.0 + k1) - M, k1 - 1.0};
    const double tol = 1e-12;
    if (std::abs(r.k1_gap) <= tol) return r;
    if (std::abs(r.upper_gap) <= tol * M) return r;
    if (k1 < 1.0) {
        if (std::abs(r.lower_gap) <= tol * M) return r;
        if (r.lower_gap > 0.0)
            r.label = RegionLabel::R1;
        else if (r.upper_gap > 0.0)
            r.label = RegionLabel::R2;
        else
            r.label = RegionLabel::R3;
    } else {
        r.label = r.upper_gap > 0.0 ? RegionLabel::R4 : RegionLabel::R5;
    }
    return r;
}

const char* branch_name(Branch b)
{
    return b == Branch::Star ? "star" : "diamond";
}

const char* stability_name(Stability s)
{
    switch (s) {
    case Stability::Sink: return "sink";
    case Stability::Saddle: return "saddle";
    case Stability::Source: return "source";
    case Stability::Nonhyperbolic: return "nonhyperbolic";
    }
    return "?";
}

Stability classify_eigenvalues(const std::array<std::complex<double>, 2>& ev)
{
    const double m0 = std::abs(ev[0]), m1 = std::abs(ev[1]);
    const double tol = 1e-8;
    if (std::abs(m0 - 1.0) <= tol || std::abs(m1 - 1.0) <= tol) return Stability::Nonhyperbolic;
    if (m0 < 1.0 && m1 < 1.0) return Stability::Sink;
    if (m0 > 1.0 && m1 > 1.0) return Stability::Source;
    return Stability::Saddle;
}

Stability stability_of(const FixedPointRecord& r, const MapParams& mp)
{
    return classify_eigenvalues(jacobian_G({r.s, r.y}, mp).eigenvalues());
}

std::vector<FixedPointRecord> fixed_points_at_T(double T, const MapParams& mp)
{
    if (!(T > 0.0)) throw std::domain_error("fixed_points_at_T needs T > 0");
    std::vector<FixedPointRecord> out;
    if (mp.gamma <= 0.0 || mp.k1 <= 0.0) return out;
    const double y = std::exp(-mp.K * T);
    const double sigma = (F_of_T(T, mp) / mp.gamma - 1.0) / mp.k1;
    const double tangent_tol = 1e-12;
    if (std::abs(sigma) > 1.0 + tangent_tol) return out;

    const double w2 = 2.0 * mp.omega;
    std::vector<double> phases;
    if (std::abs(sigma) >= 1.0 - tangent_tol) {
        phases.push_back(sigma > 0.0 ? 0.5 * pi : 1.5 * pi);
    } else {
        const double t1 = std::asin(sigma);
        phases.push_back(t1 < 0.0 ? t1 + 2.0 * pi : t1);
        phases.push_back(pi - t1);
        std::sort(phases.begin(), phases.end());
    }
    for (std::size_t i = 0; i < phases.size(); ++i) {
        FixedPointRecord r{};
        r.s = phases[i] / w2;
        r.y = y;
        r.T = T;
        r.branch = i == 0 ? Branch::Star : Branch::Diamond;
        r.eigenvalues = jacobian_G({r.s, r.y}, mp).eigenvalues();
        r.stability = classify_eigenvalues(r.eigenvalues);
        out.push_back(r);
    }
    return out;
}

double solve_F_level(double level, bool rising, const MapParams& mp)
{
    const double TM = mp.T_M();
    const double M = mp.M();
    if (!(level > 0.0) || level > M) throw std::domain_error("F level outside (0, M]");
    double lo, hi;
    if (rising) {
        lo = 0.0;
        hi = TM;
    } else {
        lo = TM;
        hi = 2.0 * TM;
        while (F_of_T(hi, mp) >= level) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e6) throw std::runtime_error("F level root not bracketed");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool below = F_of_T(mid, mp) < level;
        if (below == rising)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<SaddleNode> saddle_node_T_values(const MapParams& mp)
{
    std::vector<SaddleNode> out;
    const double M = mp.M();
    auto add_level = [&](double level, int tag) {
        if (!(level > 0.0) || level > M) return;
        if (level >= M * (1.0 - 1e-14)) {
            out.push_back({mp.T_M(), tag});
            out.push_back({mp.T_M(), tag});
            return;
        }
        out.push_back({solve_F_level(level, true, mp), tag});
        out.push_back({solve_F_level(level, false, mp), tag});
    };
    add_level(mp.gamma * (1.0 - mp.k1), -1);
    add_level(mp.gamma * (1.0 + mp.k1), +1);
    std::sort(out.begin(), out.end(), [](const SaddleNode& a, const SaddleNode& b) { return a.T < b.T; });
    return out;
}

const char* curve_kind_name(CurveKind k)
{
    switch (k) {
    case CurveKind::SaddleNode: return "saddle-node";
    case CurveKind::Hopf: return "hopf";
    case CurveKind::BTPoint: return "bt";
    }
    return "?";
}

double hopf_function(double T, const MapParams& mp)
{
    const double f = F_of_T(T, mp) - mp.gamma;
    const double fp = dF_dT(T, mp);
    const double kg = mp.k1 * mp.gamma;
    return f * f - kg * kg + fp * fp / (4.0 * mp.omega * mp.omega);
}

double hopf_function_dT(double T, const MapParams& mp)
{
    const double f = F_of_T(T, mp) - mp.gamma;
    const double fp = dF_dT(T, mp);
    return 2.0 * f * fp + fp * d2F_dT2(T, mp) / (2.0 * mp.omega * mp.omega);
}

namespace {

std::vector<double> hopf_roots(const MapParams& mp)
{
    const double TM = mp.T_M();
    const double span = 40.0 / mp.K;
    const int n = 4000;
    std::vector<double> roots;
    double t_prev = TM;
    double h_prev = hopf_function(TM, mp);
    for (int i = 1; i <= n; ++i) {
        const double u = static_cast<double>(i) / n;
        const double t = TM + span * u * u;
        const double h = hopf_function(t, mp);
        if (h == 0.0) {
            roots.push_back(t);
        } else if (h_prev != 0.0 && (h > 0.0) != (h_prev > 0.0)) {
            double lo = t_prev, hi = t, hlo = h_prev;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double hm = hopf_function(mid, mp);
                if ((hm > 0.0) == (hlo > 0.0)) {
                    lo = mid;
                    hlo = hm;
                } else {
                    hi = mid;
                }
            }
            double r = 0.5 * (lo + hi);
            for (int it = 0; it < 3; ++it) {
                const double d = hopf_function_dT(r, mp);
                if (d == 0.0) break;
                const double next = r - hopf_function(r, mp) / d;
                if (next < lo || next > hi) break;
                r = next;
            }
            if (r > TM) roots.push_back(r);
        }
        t_prev = t;
        h_prev = h;
    }
    return roots;
}

double hopf_at_peak(double gamma, const MapParams& mp)
{
    MapParams q = mp;
    q.gamma = gamma;
    return hopf_function(mp.T_M(), q);
}

} // namespace

BifurcationCurve hopf_locus(const MapParams& mp, const std::vector<double>& gamma_grid)
{
    BifurcationCurve curve{CurveKind::Hopf, mp.k1, mp.omega, {}};
    for (double g : gamma_grid) {
        if (!(g > 0.0)) continue;
        MapParams q = mp;
        q.gamma = g;
        for (double T : hopf_roots(q)) {
            const auto fps = fixed_points_at_T(T, q);
            const FixedPointRecord* best = nullptr;
            double best_err = 1e300;
            for (const auto& r : fps) {
                const double err = std::abs(jacobian_G({r.s, r.y}, q).det() - 1.0);
                if (err < best_err) {
                    best_err = err;
                    best = &r;
                }
            }
            if (!best) continue;
            if (best->eigenvalues[0].imag() == 0.0) continue;
            curve.samples.push_back({T, g, best->s, best->y, best->branch, false});
        }
    }
    // endpoints on the boundary T = T_M between neighbouring grid values
    for (std::size_t i = 0; i + 1 < gamma_grid.size(); ++i) {
        double lo = gamma_grid[i], hi = gamma_grid[i + 1];
        if (!(lo > 0.0) || !(hi > 0.0)) continue;
        double elo = hopf_at_peak(lo, mp), ehi = hopf_at_peak(hi, mp);
        if (elo == 0.0 || ehi == 0.0 || (elo > 0.0) == (ehi > 0.0)) continue;
        for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-16 * std::abs(hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double em = hopf_at_peak(mid, mp);
            if ((em > 0.0) == (elo > 0.0)) {
                lo = mid;
                elo = em;
            } else {
                hi = mid;
            }
        }
        const double g = 0.5 * (lo + hi);
        MapParams q = mp;
        q.gamma = g;
        const double T = mp.T_M();
        const auto fps = fixed_points_at_T(T, q);
        if (fps.empty()) continue;
        curve.samples.push_back({T, g, fps.front().s, fps.front().y, fps.front().branch, true});
    }
    return curve;
}

std::vector<BifurcationCurve> saddle_node_curves(const MapParams& mp, const std::vector<double>& T_grid)
{
    std::vector<BifurcationCurve> out;
    const double w = mp.omega;
    BifurcationCurve upper{CurveKind::SaddleNode, mp.k1, w, {}};
    for (double T : T_grid) {
        if (!(T > 0.0)) continue;
        upper.samples.push_back({T, F_of_T(T, mp) / (1.0 + mp.k1), 0.25 * pi / w, std::exp(-mp.K * T),
                                 Branch::Star, false});
    }
    out.push_back(upper);
    if (mp.k1 < 1.0) {
        BifurcationCurve lower{CurveKind::SaddleNode, mp.k1, w, {}};
        for (double T : T_grid) {
            if (!(T > 0.0)) continue;
            lower.samples.push_back({T, F_of_T(T, mp) / (1.0 - mp.k1), 0.75 * pi / w,
                                     std::exp(-mp.K * T), Branch::Star, false});
        }
        out.push_back(lower);
    }
    return out;
}

std::vector<BTPoint> bt_points(const MapParams& mp)
{
    if (!(mp.k1 > 0.0)) throw ParameterError("bt_points needs k1 > 0");
    std::vector<BTPoint> out;
    const double TM = mp.T_M();
    const double M = mp.M();
    const double y = std::exp(-mp.K * TM);
    auto add = [&](double gamma, double phase) {
        MapParams q = mp;
        q.gamma = gamma;
        const double s = phase / (2.0 * mp.omega);
        const Jacobian2 J = jacobian_G({s, y}, q);
        if (std::abs(J.trace() - 2.0) > 1e-8 || std::abs(J.det() - 1.0) > 1e-8)
            throw std::logic_error("BT point failed its double-eigenvalue check");
        out.push_back({TM, gamma, s, y, J});
    };
    add(M / (1.0 + mp.k1), 0.5 * pi);
    if (mp.k1 < 1.0) add(M / (1.0 - mp.k1), 1.5 * pi);
    return out;
}

double F_n(int n, double omega, const MapParams& mp)
{
    const double khat = pi * mp.K;
    return std::exp(-khat * n / omega) - std::exp(-mp.delta * khat * n / omega);
}

std::vector<FixedPointRecord> frequency_locked(int n, const MapParams& mp)
{
    if (n < 1) throw std::invalid_argument("frequency_locked needs n >= 1");
    return fixed_points_at_T(n * mp.period(), mp);
}

PendulumParams pendulum_reduction(int ell, const MapParams& mp, int centre)
{
    if (ell < 1) throw std::invalid_argument("pendulum_reduction needs ell >= 1");
    if (centre != 1 && centre != 2) throw std::invalid_argument("centre must be 1 or 2");
    const double T = ell * mp.period();
    if (std::abs(F_of_T(T, mp) - mp.gamma) > 1e-6)
        throw std::domain_error("no centre of frequency locking: |F(ell pi/omega) - gamma| > 1e-6");
    PendulumParams pp{};
    pp.ell = ell;
    pp.y_c = std::exp(-mp.K * T);
    pp.s_c = canonical_s(centre * 0.5 * pi / mp.omega, mp.period());
    pp.A = std::sqrt(mp.gamma * mp.K / (2.0 * mp.omega * mp.k1 * pp.y_c));
    pp.B = mp.K * ell * pi / (mp.omega * mp.k1);
    pp.tau_scale = std::sqrt(2.0 * mp.gamma * mp.omega * mp.k1 / (mp.K * pp.y_c));
    pp.valid_pendulum = pp.B < 1.0 && mp.gamma < mp.M();
    return pp;
}

double pendulum_orbit_check(const PendulumParams& pp, const MapParams& mp, const CylinderPoint& start,
                            int n)
{
    const double w2 = 2.0 * mp.omega;
    const double gh = mp.gamma / pp.y_c;
    CylinderPoint g = start;
    double x = start.y / pp.y_c - 1.0;
    double th = w2 * start.s;
    double dev = 0.0;
    for (int i = 0; i < n; ++i) {
        g = G_lift(g, mp);
        const double xn = x + gh * (-x + mp.k1 * std::sin(th));
        const double thn = th + w2 * (pp.ell * pi / mp.omega - x / mp.K);
        x = xn;
        th = thn;
        dev = std::max({dev, std::abs(g.y / pp.y_c - 1.0 - x), std::abs(w2 * g.s - th)});
    }
    return dev;
}

} // namespace hetero
