#include "hetero/attractor.hpp"

#include <cmath>
// boost 1.74 pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

namespace hetero {

AveragedFixedPoints averaged_fixed_points(double gamma, const MapParams& mp)
{
    const double d = mp.delta;
    if (!(d > 1.0)) throw ParameterError("delta > 1 violated");
    const double M = mp.M();
    const double y_star = std::pow(d, 1.0 / (1.0 - d));
    if (!(gamma > 0.0)) throw ParameterError("gamma > 0 violated");
    if (gamma > M * (1.0 + 1e-14)) throw NoFixedPointsError("gamma >= M: y^delta + gamma has no fixed point");

    auto g = [&](double y) { return std::pow(y, d) + gamma - y; };
    auto root = [&](double lo, double hi) {
        // g(lo) and g(hi) have opposite signs
        const bool lo_pos = g(lo) > 0.0;
        for (int it = 0; it < 300 && hi - lo > 1e-17; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((g(mid) > 0.0) == lo_pos)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    AveragedFixedPoints a{};
    a.y_star = y_star;
    if (gamma >= M * (1.0 - 1e-14)) {
        a.y_hat = a.y_tilde = y_star;
    } else {
        a.y_hat = root(gamma, y_star);
        a.y_tilde = root(y_star, 1.0);
    }
    a.R = 2.0 * mp.k1 / (1.0 - d * std::pow(a.y_hat, d - 1.0));

    if (gamma < M * (1.0 - 1e-14)) {
        const bool ok = gamma < a.y_hat && a.y_hat < y_star && a.y_hat < gamma * d / (d - 1.0) &&
                        a.y_tilde > gamma + std::pow(d, d / (1.0 - d));
        if (!ok) throw std::logic_error("averaged fixed points violate their bounds");
    }
    return a;
}

namespace {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

// Periodic data (x ascending, one period long) extended by a copy on each side.
std::function<double(double)> periodic_pchip(const std::vector<double>& x, const std::vector<double>& y,
                                             double period)
{
    const std::size_t n = x.size();
    std::vector<double> xe, ye;
    xe.reserve(3 * n);
    ye.reserve(3 * n);
    for (int k = -1; k <= 1; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            xe.push_back(x[i] + k * period);
            ye.push_back(y[i]);
        }
    const double base = x.front();
    auto ip = std::make_shared<Pchip>(std::move(xe), std::move(ye));
    return [ip, base, period](double s) {
        double r = s - period * std::floor((s - base) / period);
        return (*ip)(r);
    };
}

struct Image {
    std::vector<double> s;
    std::vector<double> y;
};

Image push_graph(const std::vector<double>& s, const std::vector<double>& h, const MapParams& mp)
{
    Image im;
    im.s.resize(s.size());
    im.y.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const CylinderPoint q = G_lift({s[i], h[i]}, mp);
        im.s[i] = q.s;
        im.y[i] = q.y;
    }
    return im;
}

} // namespace

double InvariantCurve::eval(double s_query) const
{
    if (!interp) throw std::logic_error("invariant curve has no samples");
    return interp(s_query);
}

InvariantCurve invariant_curve(const MapParams& mp, const CurveOptions& opt)
{
    validate(mp);
    if (opt.grid_size < 8) throw std::invalid_argument("grid_size must be at least 8");
    const double P = mp.period();
    const int N = opt.grid_size;
    const auto avg = averaged_fixed_points(mp.gamma, mp);

    InvariantCurve c;
    c.period = P;
    c.s.resize(N);
    for (int i = 0; i < N; ++i) c.s[i] = P * i / N;
    c.h.assign(N, avg.y_hat);

    auto transform = [&](const std::vector<double>& h) {
        Image im = push_graph(c.s, h, mp);
        for (int i = 0; i + 1 < N; ++i)
            if (!(im.s[i + 1] > im.s[i])) throw GraphError(GraphError::Kind::NotAGraph, "image of the graph folds in s");
        if (!(im.s.front() + P > im.s.back())) throw GraphError(GraphError::Kind::NotAGraph, "image of the graph folds in s");
        const double shift = P * std::floor(im.s.front() / P);
        for (double& v : im.s) v -= shift;
        return im;
    };

    bool converged = false;
    for (int it = 0; it < opt.max_iter; ++it) {
        const Image im = transform(c.h);
        const auto f = periodic_pchip(im.s, im.y, P);
        double diff = 0.0;
        for (int i = 0; i < N; ++i) {
            const double v = f(c.s[i]);
            if (!(v > 0.0)) throw GraphError(GraphError::Kind::NoConvergence, "graph left y > 0");
            diff = std::max(diff, std::abs(v - c.h[i]));
            c.h[i] = v;
        }
        c.iterations = it + 1;
        if (diff < opt.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw GraphError(GraphError::Kind::NoConvergence, "graph transform did not converge");

    c.interp = periodic_pchip(c.s, c.h, P);
    const Image im = transform(c.h);
    for (int i = 0; i < N; ++i) c.residual = std::max(c.residual, std::abs(c.eval(im.s[i]) - im.y[i]));
    return c;
}

int winding_degree(const InvariantCurve& c, const MapParams& mp)
{
    const double P = c.period;
    const std::size_t n = c.s.size();
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s_in = i < n ? c.s[i] : c.s[0] + P;
        const double y_in = c.h[i % n];
        const double s_out = canonical_s(G_lift({s_in, y_in}, mp).s, P);
        if (i > 0) {
            double d = s_out - prev;
            d -= P * std::round(d / P);
            total += d;
        }
        prev = s_out;
    }
    return static_cast<int>(std::lround(total / P));
}

AnnulusCheck annulus_invariance(const MapParams& mp, int n, std::uint64_t seed)
{
    const auto avg = averaged_fixed_points(mp.gamma, mp);
    AnnulusCheck a{avg.y_hat - avg.R * mp.gamma, avg.y_hat + avg.R * mp.gamma, n, 0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> us(0.0, mp.period());
    std::uniform_real_distribution<double> uy(std::max(a.y_lo, 1e-300), a.y_hi);
    for (int i = 0; i < n; ++i) {
        const CylinderPoint q = G({us(rng), uy(rng)}, mp);
        if (q.y >= a.y_lo && q.y <= a.y_hi) ++a.mapped_inside;
    }
    return a;
}

double rotation_number(const InvariantCurve& c, const MapParams& mp, int n_iter)
{
    if (n_iter < 1) throw std::invalid_argument("n_iter must be positive");
    CylinderPoint q{c.s.front(), c.h.front()};
    const double s0 = q.s;
    for (int i = 0; i < n_iter; ++i) {
        q = G_lift(q, mp);
        if (std::abs(q.y - c.eval(q.s)) > 1e-6) throw std::runtime_error("orbit drifted off the invariant curve");
    }
    return (q.s - s0) / (n_iter * c.period);
}

const char* side_name(ManifoldSide s)
{
    switch (s) {
    case ManifoldSide::StablePlus: return "stable+";
    case ManifoldSide::StableMinus: return "stable-";
    case ManifoldSide::UnstablePlus: return "unstable+";
    case ManifoldSide::UnstableMinus: return "unstable-";
    }
    return "?";
}

namespace {

bool invert_GT(const CylinderPoint& target, CylinderPoint& q, double T, const MapParams& mp)
{
    for (int it = 0; it < 60; ++it) {
        const CylinderPoint img = G_T(q, T, mp);
        const double fs = img.s - target.s;
        const double fy = img.y - target.y;
        if (std::abs(fs) < 1e-14 * std::max(1.0, std::abs(target.s)) && std::abs(fy) < 1e-15 * target.y + 1e-300)
            return true;
        const Jacobian2 J = jacobian_G(q, mp);
        const double det = J.det();
        if (det == 0.0 || !std::isfinite(det)) return false;
        double ds = -(J.d * fs - J.b * fy) / det;
        double dy = -(-J.c * fs + J.a * fy) / det;
        double lam = 1.0;
        while (q.y + lam * dy <= 0.0 && lam > 1e-6) lam *= 0.5;
        if (q.y + lam * dy <= 0.0) return false;
        q.s += lam * ds;
        q.y += lam * dy;
        if (std::abs(ds) < 1e-15 * std::max(1.0, std::abs(q.s)) && std::abs(dy) < 1e-16 * q.y) return true;
    }
    const CylinderPoint img = G_T(q, T, mp);
    return std::abs(img.s - target.s) < 1e-10 && std::abs(img.y - target.y) < 1e-12;
}

struct Chain {
    double t;
    std::vector<CylinderPoint> pts;
    bool break_after = false;
};

CylinderPoint gap_marker()
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
}

struct Metric {
    double phase_scale;
    double y_scale;
    double operator()(const CylinderPoint& a, const CylinderPoint& b) const
    {
        return std::hypot((a.s - b.s) * phase_scale, (a.y - b.y) / y_scale);
    }
};

bool usable(const CylinderPoint& q)
{
    return std::isfinite(q.s) && std::isfinite(q.y) && q.y > 0.0 && q.y <= 1.0;
}

// A negative eigenvalue swaps the two sides each step, so the branch is
// grown under the second iterate instead.
ManifoldPolyline grow_branch(const FixedPointRecord& saddle, ManifoldSide side, double lambda,
                             std::array<double, 2> dir, const MapParams& mp, const ManifoldOptions& opt)
{
    const bool stable = side == ManifoldSide::StablePlus || side == ManifoldSide::StableMinus;
    const int steps = lambda < 0.0 ? 2 : 1;
    const double mu = std::pow(stable ? 1.0 / std::abs(lambda) : std::abs(lambda), steps);
    const double sign = (side == ManifoldSide::StablePlus || side == ManifoldSide::UnstablePlus) ? 1.0 : -1.0;
    const Metric dist{2.0 * mp.omega, saddle.y};
    // scale the eigenvector so that seed_distance is measured in the metric
    const double norm = dist({0.0, 0.0}, {dir[0], dir[1]});
    dir[0] *= sign / norm;
    dir[1] *= sign / norm;
    const double T = saddle.T;
    const CylinderPoint p{saddle.s, saddle.y};

    ManifoldPolyline out{saddle, side, {}, {}, false};
    auto seed = [&](double t) {
        const double r = opt.seed_distance * std::pow(mu, t);
        return CylinderPoint{p.s + r * dir[0], p.y + r * dir[1]};
    };
    // one application of the map (or its inverse); guess only used when inverting
    auto advance = [&](const CylinderPoint& from, CylinderPoint guess, CylinderPoint& to) {
        if (!stable) {
            to = G_T(from, T, mp);
            return usable(to);
        }
        if (!usable(guess)) return false;
        if (!invert_GT(from, guess, T, mp)) return false;
        to = guess;
        return usable(to);
    };
    auto linear_guess = [&](const CylinderPoint& from) {
        return CylinderPoint{p.s + (from.s - p.s) / lambda, p.y + (from.y - p.y) / lambda};
    };

    // chain.pts[k] is the k-th image of the seed; level l sits at k = l * steps
    const int n0 = 17;
    std::vector<Chain> chains;
    for (int i = 0; i < n0; ++i) {
        const double t = static_cast<double>(i) / (n0 - 1);
        chains.push_back({t, {seed(t)}});
    }
    std::vector<std::vector<CylinderPoint>> levels;
    auto level_points = [&](int lv) {
        std::vector<CylinderPoint> pts;
        for (const auto& ch : chains) {
            pts.push_back(ch.pts[static_cast<std::size_t>(lv * steps)]);
            if (ch.break_after) pts.push_back(gap_marker());
        }
        return pts;
    };
    levels.push_back(level_points(0));

    double arc = 0.0;
    std::size_t total = chains.size();
    for (int lv = 1; lv <= opt.segments; ++lv) {
        // chains whose preimage cannot be found are dropped, leaving a gap
        std::vector<char> dead(chains.size(), 0);
        for (int k = (lv - 1) * steps + 1; k <= lv * steps; ++k) {
            std::ptrdiff_t last_alive = -1;
            for (std::size_t j = 0; j < chains.size(); ++j) {
                if (dead[j]) continue;
                CylinderPoint guess;
                if (last_alive >= 0)
                    guess = chains[static_cast<std::size_t>(last_alive)].pts[k];
                else if (k > steps)
                    guess = chains.back().pts[k - steps];
                else
                    guess = linear_guess(chains[j].pts[k - 1]);
                CylinderPoint next{};
                if (advance(chains[j].pts[k - 1], guess, next)) {
                    chains[j].pts.push_back(next);
                    last_alive = static_cast<std::ptrdiff_t>(j);
                } else {
                    dead[j] = 1;
                }
            }
        }
        if (std::find(dead.begin(), dead.end(), 1) != dead.end()) {
            out.truncated = true;
            std::vector<Chain> kept;
            for (std::size_t j = 0; j < chains.size(); ++j) {
                if (dead[j]) {
                    if (!kept.empty()) kept.back().break_after = true;
                    continue;
                }
                kept.push_back(std::move(chains[j]));
            }
            chains = std::move(kept);
        }
        if (chains.size() < 2) break;
        const std::size_t top = static_cast<std::size_t>(lv * steps);
        for (std::size_t j = 0; j + 1 < chains.size();) {
            if (chains[j].break_after ||
                dist(chains[j].pts[top], chains[j + 1].pts[top]) <= opt.max_spacing) {
                ++j;
                continue;
            }
            if (total >= opt.max_points) {
                out.truncated = true;
                break;
            }
            // the preimage jumps across a fold of the map: leave a gap
            const double tm = 0.5 * (chains[j].t + chains[j + 1].t);
            bool failed = tm - chains[j].t < 1e-13;
            Chain mid{tm, {seed(tm)}};
            for (std::size_t k = 1; k <= top && !failed; ++k) {
                const CylinderPoint& a = chains[j].pts[k];
                const CylinderPoint& b = chains[j + 1].pts[k];
                CylinderPoint next{};
                if (!advance(mid.pts[k - 1], {0.5 * (a.s + b.s), 0.5 * (a.y + b.y)}, next)) failed = true;
                mid.pts.push_back(next);
            }
            if (failed) {
                chains[j].break_after = true;
                out.truncated = true;
                ++j;
                continue;
            }
            chains.insert(chains.begin() + static_cast<std::ptrdiff_t>(j + 1), std::move(mid));
            ++total;
        }
        levels.push_back(level_points(lv));
        double seg = 0.0;
        const auto& pts = levels.back();
        for (std::size_t j = 0; j + 1 < pts.size(); ++j)
            if (usable(pts[j]) && usable(pts[j + 1])) seg += dist(pts[j], pts[j + 1]);
        out.segment_lengths.push_back(seg);
        arc += seg;
        if (arc > opt.arc_budget) break;
    }
    for (const auto& pts : levels) out.points.insert(out.points.end(), pts.begin(), pts.end());
    return out;
}

// eigenvector of J for a real eigenvalue lambda
std::array<double, 2> eigenvector(const Jacobian2& J, double lambda)
{
    // (a - lambda) v0 + b v1 = 0 or c v0 + (d - lambda) v1 = 0
    std::array<double, 2> v1{-J.b, J.a - lambda};
    std::array<double, 2> v2{J.d - lambda, -J.c};
    const double n1 = std::hypot(v1[0], v1[1]);
    const double n2 = std::hypot(v2[0], v2[1]);
    auto v = n1 >= n2 ? v1 : v2;
    const double n = std::max(n1, n2);
    if (n == 0.0) return {1.0, 0.0};
    v[0] /= n;
    v[1] /= n;
    return v;
}

} // namespace

std::vector<ManifoldPolyline> trace_manifolds(const FixedPointRecord& saddle, const MapParams& mp,
                                              const ManifoldOptions& opt)
{
    const Jacobian2 J = jacobian_G({saddle.s, saddle.y}, mp);
    const auto ev = J.eigenvalues();
    if (ev[0].imag() != 0.0 || ev[1].imag() != 0.0) throw std::domain_error("saddle has complex eigenvalues");
    double lu = ev[0].real(), ls = ev[1].real();
    if (std::abs(lu) < std::abs(ls)) std::swap(lu, ls);
    if (!(std::abs(lu) > 1.0 && std::abs(ls) < 1.0 && ls != 0.0))
        throw std::domain_error("manifold tracing needs 0 < |lambda_s| < 1 < |lambda_u|");
    const auto vu = eigenvector(J, lu);
    const auto vs = eigenvector(J, ls);
    std::vector<ManifoldPolyline> out;
    out.push_back(grow_branch(saddle, ManifoldSide::UnstablePlus, lu, vu, mp, opt));
    out.push_back(grow_branch(saddle, ManifoldSide::UnstableMinus, lu, vu, mp, opt));
    out.push_back(grow_branch(saddle, ManifoldSide::StablePlus, ls, vs, mp, opt));
    out.push_back(grow_branch(saddle, ManifoldSide::StableMinus, ls, vs, mp, opt));
    return out;
}

namespace {

struct Seg {
    CylinderPoint a, b;
};

bool segments_cross(const Seg& p, const Seg& q, CylinderPoint& at)
{
    const double rx = p.b.s - p.a.s, ry = p.b.y - p.a.y;
    const double sx = q.b.s - q.a.s, sy = q.b.y - q.a.y;
    const double den = rx * sy - ry * sx;
    if (den == 0.0) return false;
    const double qpx = q.a.s - p.a.s, qpy = q.a.y - p.a.y;
    const double t = (qpx * sy - qpy * sx) / den;
    const double u = (qpx * ry - qpy * rx) / den;
    if (t < 0.0 || t >= 1.0 || u < 0.0 || u >= 1.0) return false;
    at = {p.a.s + t * rx, p.a.y + t * ry};
    return true;
}

// segments reduced so that the first endpoint has s in [0, period); a copy
// shifted by -period is added when the segment pokes past period
std::vector<Seg> reduced_segments(const ManifoldPolyline& pl, double period, double exclusion,
                                  const Metric& dist, double max_len)
{
    std::vector<Seg> out;
    const CylinderPoint p{pl.saddle.s, pl.saddle.y};
    auto near_saddle = [&](const CylinderPoint& q) {
        CylinderPoint r{canonical_s(q.s - p.s + 0.5 * period, period) - 0.5 * period + p.s, q.y};
        return dist(r, p) < exclusion;
    };
    for (std::size_t i = 0; i + 1 < pl.points.size(); ++i) {
        Seg sg{pl.points[i], pl.points[i + 1]};
        if (!usable(sg.a) || !usable(sg.b)) continue;
        if (dist(sg.a, sg.b) > max_len) continue;
        if (near_saddle(sg.a) || near_saddle(sg.b)) continue;
        const double shift = period * std::floor(sg.a.s / period);
        sg.a.s -= shift;
        sg.b.s -= shift;
        out.push_back(sg);
        if (std::max(sg.a.s, sg.b.s) >= period || std::min(sg.a.s, sg.b.s) < 0.0) {
            const double k = std::max(sg.a.s, sg.b.s) >= period ? -period : period;
            out.push_back({{sg.a.s + k, sg.a.y}, {sg.b.s + k, sg.b.y}});
        }
    }
    return out;
}

} // namespace

HomoclinicResult find_homoclinic(const std::vector<ManifoldPolyline>& branches, double period,
                                 double exclusion)
{
    HomoclinicResult res;
    if (branches.empty()) return res;
    const double omega = pi / period;
    const Metric dist{2.0 * omega, branches.front().saddle.y};
    const double max_len = 0.05;
    std::vector<Seg> unstable, stable;
    for (const auto& b : branches) {
        auto segs = reduced_segments(b, period, exclusion, dist, max_len);
        auto& dst = (b.side == ManifoldSide::UnstablePlus || b.side == ManifoldSide::UnstableMinus) ? unstable : stable;
        dst.insert(dst.end(), segs.begin(), segs.end());
    }
    if (unstable.empty() || stable.empty()) return res;

    double ylo = 1e300, yhi = -1e300;
    for (const auto* v : {&unstable, &stable})
        for (const auto& sg : *v) {
            ylo = std::min({ylo, sg.a.y, sg.b.y});
            yhi = std::max({yhi, sg.a.y, sg.b.y});
        }
    const int nc = 512;
    const double s0 = -period, s1 = 2.0 * period;
    const double cs = (s1 - s0) / nc;
    const double cy = std::max((yhi - ylo) / nc, 1e-300);
    auto cell = [&](double s, double y) {
        const long i = std::clamp(static_cast<long>((s - s0) / cs), 0L, static_cast<long>(nc - 1));
        const long j = std::clamp(static_cast<long>((y - ylo) / cy), 0L, static_cast<long>(nc - 1));
        return std::pair<long, long>{i, j};
    };
    std::unordered_map<long, std::vector<std::size_t>> grid;
    for (std::size_t k = 0; k < stable.size(); ++k) {
        const auto& sg = stable[k];
        auto [i0, j0] = cell(std::min(sg.a.s, sg.b.s), std::min(sg.a.y, sg.b.y));
        auto [i1, j1] = cell(std::max(sg.a.s, sg.b.s), std::max(sg.a.y, sg.b.y));
        for (long i = i0; i <= i1; ++i)
            for (long j = j0; j <= j1; ++j) grid[i * nc + j].push_back(k);
    }
    for (const auto& su : unstable) {
        auto [i0, j0] = cell(std::min(su.a.s, su.b.s), std::min(su.a.y, su.b.y));
        auto [i1, j1] = cell(std::max(su.a.s, su.b.s), std::max(su.a.y, su.b.y));
        for (long i = i0; i <= i1; ++i)
            for (long j = j0; j <= j1; ++j) {
                auto it = grid.find(i * nc + j);
                if (it == grid.end()) continue;
                for (std::size_t k : it->second) {
                    CylinderPoint at{};
                    if (segments_cross(su, stable[k], at)) {
                        at.s = canonical_s(at.s, period);
                        res.points.push_back(at);
                    }
                }
            }
    }
    // a crossing seen from several cells is reported once
    std::sort(res.points.begin(), res.points.end(),
              [](const CylinderPoint& a, const CylinderPoint& b) { return a.s < b.s || (a.s == b.s && a.y < b.y); });
    res.points.erase(std::unique(res.points.begin(), res.points.end(),
                                 [](const CylinderPoint& a, const CylinderPoint& b) { return a.s == b.s && a.y == b.y; }),
                     res.points.end());
    res.found = !res.points.empty();
    return res;
}

HomoclinicResult homoclinic_at_T(double T, const MapParams& mp, const ManifoldOptions& opt)
{
    for (const auto& r : fixed_points_at_T(T, mp)) {
        if (r.eigenvalues[0].imag() != 0.0) continue;
        double lu = r.eigenvalues[0].real(), ls = r.eigenvalues[1].real();
        if (std::abs(lu) < std::abs(ls)) std::swap(lu, ls);
        if (!(std::abs(lu) > 1.0 && std::abs(ls) < 1.0 && ls != 0.0)) continue;
        auto res = find_homoclinic(trace_manifolds(r, mp, opt), mp.period(), 10.0 * opt.seed_distance);
        if (res.found) return res;
    }
    return {};
}

LyapunovResult lyapunov_exponent(const CylinderPoint& pt, double T, const MapParams& mp, int n_iter,
                                 int n_discard)
{
    LyapunovResult r;
    const double P = mp.period();
    CylinderPoint q = pt;
    for (int i = 0; i < n_discard; ++i) {
        q = G_T(q, T, mp);
        if (!usable(q)) {
            r.truncated = true;
            return r;
        }
    }
    double v0 = 1.0, v1 = 1.0;
    double sum = 0.0;
    for (int i = 0; i < n_iter; ++i) {
        const Jacobian2 J = jacobian_G(q, mp);
        const double w0 = J.a * v0 + J.b * v1;
        const double w1 = J.c * v0 + J.d * v1;
        const double n = std::hypot(w0, w1);
        sum += std::log(n);
        v0 = w0 / n;
        v1 = w1 / n;
        q = G_T(q, T, mp);
        q.s = canonical_s(q.s, P);
        ++r.steps;
        if (!usable(q)) {
            r.truncated = true;
            break;
        }
    }
    r.exponent = r.steps > 0 ? sum / r.steps : 0.0;
    return r;
}

PeriodicSink find_periodic_sink(const CylinderPoint& pt, double T, const MapParams& mp, int n_transient,
                                int max_period)
{
    PeriodicSink out;
    const double P = mp.period();
    CylinderPoint q = pt;
    for (int attempt = 0; attempt < 4; ++attempt) {
        for (int i = 0; i < n_transient; ++i) {
            q = G_T(q, T, mp);
            if (!usable(q)) return out;
        }
        q.s = canonical_s(q.s, P);
        CylinderPoint x = q;
        int period = 0;
        for (int k = 1; k <= max_period; ++k) {
            x = G_T(x, T, mp);
            if (!usable(x)) return out;
            double ds = x.s - q.s;
            ds -= P * std::round(ds / P);
            if (std::abs(ds) < 1e-7 && std::abs(x.y - q.y) < 1e-7 * q.y) {
                period = k;
                break;
            }
        }
        if (period == 0) continue;

        // Newton on G_T^p(z) - z - (m P, 0)
        CylinderPoint z = q;
        double shift = 0.0;
        {
            CylinderPoint e = z;
            for (int k = 0; k < period; ++k) e = G_T(e, T, mp);
            shift = P * std::round((e.s - z.s) / P);
        }
        Jacobian2 Jp{1, 0, 0, 1};
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            CylinderPoint e = z;
            Jp = {1, 0, 0, 1};
            for (int k = 0; k < period; ++k) {
                const Jacobian2 J = jacobian_G(e, mp);
                Jp = {J.a * Jp.a + J.b * Jp.c, J.a * Jp.b + J.b * Jp.d, J.c * Jp.a + J.d * Jp.c,
                      J.c * Jp.b + J.d * Jp.d};
                e = G_T(e, T, mp);
            }
            const double fs = e.s - z.s - shift;
            const double fy = e.y - z.y;
            if (std::abs(fs) < 1e-13 && std::abs(fy) < 1e-14 * z.y) {
                ok = true;
                break;
            }
            const double a = Jp.a - 1.0, b = Jp.b, c = Jp.c, d = Jp.d - 1.0;
            const double det = a * d - b * c;
            if (det == 0.0) break;
            z.s -= (d * fs - b * fy) / det;
            z.y -= (-c * fs + a * fy) / det;
            if (!usable(z)) break;
        }
        if (!ok) continue;
        out.found = true;
        out.period = period;
        out.point = {canonical_s(z.s, P), z.y};
        out.spectral_radius = Jp.spectral_radius();
        out.log_rate = std::log(out.spectral_radius) / period;
        out.found = out.spectral_radius < 1.0;
        return out;
    }
    return out;
}

} // namespace hetero
