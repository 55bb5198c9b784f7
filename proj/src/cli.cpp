#include "hetero/cli.hpp"

#include "hetero/attractor.hpp"
#include "hetero/bifurcation.hpp"
#include "hetero/flow.hpp"
#include "hetero/model.hpp"
#include "hetero/retmap.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace hetero::cli {

namespace {

const char* const names[] = {"simulate", "compare-map", "atlas",  "regions",   "fixed-points",
                             "freqlock", "pendulum",    "curve", "manifolds", "lyapunov"};

const std::vector<std::string> ode_keys{"alpha", "beta", "gamma", "omega"};
const std::vector<std::string> map_keys{"K", "delta", "omega", "k1", "gamma"};
const std::vector<std::string> integrator_keys{"rel_tol", "abs_tol", "max_step", "eps", "horizon"};

const double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts)
{
    std::vector<std::string> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

SystemParams ode_params(const Config& c)
{
    for (const char* k : {"K", "delta", "k1"})
        if (c.has(k)) throw ConfigError(std::string("map-level key '") + k + "' given to an ODE-level command");
    SystemParams p;
    p.alpha = c.get_double("alpha", p.alpha);
    p.beta = c.get_double("beta", p.beta);
    p.gamma = c.get_double("gamma", p.gamma);
    p.omega = c.get_double("omega", p.omega);
    validate(p);
    return p;
}

IntegratorConfig integrator(const Config& c)
{
    IntegratorConfig cfg;
    cfg.rel_tol = c.get_double("rel_tol", cfg.rel_tol);
    cfg.abs_tol = c.get_double("abs_tol", cfg.abs_tol);
    cfg.max_step = c.get_double("max_step", cfg.max_step);
    cfg.eps = c.get_double("eps", cfg.eps);
    cfg.horizon = c.get_double("horizon", cfg.horizon);
    validate(cfg);
    return cfg;
}

// Either map-level keys or (alpha, beta) from which the map constants follow.
MapParams map_level(const Config& c)
{
    const bool ode = c.has("alpha") || c.has("beta");
    const bool map = c.has("K") || c.has("delta") || c.has("k1");
    if (ode && map) throw ConfigError("give either alpha/beta or K/delta/k1, not both");
    if (ode) {
        SystemParams p;
        p.alpha = c.get_double("alpha", p.alpha);
        p.beta = c.get_double("beta", p.beta);
        p.gamma = c.get_double("gamma", p.gamma);
        p.omega = c.get_double("omega", p.omega);
        validate(p);
        return map_params(p, derive_constants(p), c.get_double("eps", 1.0));
    }
    MapParams mp;
    mp.K = c.get_double("K", mp.K);
    mp.delta = c.get_double("delta", mp.delta);
    mp.omega = c.get_double("omega", mp.omega);
    mp.k1 = c.get_double("k1", mp.k1);
    mp.gamma = c.get_double("gamma", mp.gamma);
    validate(mp);
    return mp;
}

const std::vector<std::string> map_level_keys = join({map_keys, {"alpha", "beta", "eps"}});

std::vector<double> linspace(double a, double b, int n)
{
    if (n < 1) throw ConfigError("grid size must be positive");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

// T values from 'T' (list) or T_min/T_max/n_T.
std::vector<double> T_values(const Config& c, double T_min, double T_max, int n)
{
    if (c.has("T")) return c.get_list("T", {});
    return linspace(c.get_double("T_min", T_min), c.get_double("T_max", T_max), c.get_int("n_T", n));
}

// Static partition over indices; results are written by index so the order never depends on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& body)
{
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += threads) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

class Output {
public:
    Output(const std::string& dir, std::ostream& log) : dir_(dir), log_(log) {}

    std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }

    void write(const std::string& name, const std::string& text)
    {
        const std::string p = path(name);
        write_file(p, text);
        written_.push_back(p);
        log_ << "wrote " << p << '\n';
    }

    std::vector<std::string> written() const { return written_; }

private:
    std::string dir_;
    std::ostream& log_;
    std::vector<std::string> written_;
};

PlotSeries ser(const std::string& label, const std::string& colour)
{
    PlotSeries s;
    s.label = label;
    s.colour = colour;
    return s;
}

double quantile(std::vector<double> v, double q)
{
    if (v.empty()) return nan;
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double f = pos - i;
    return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
}

std::string stab(const FixedPointRecord& r) { return stability_name(r.stability); }

void simulate(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({ode_keys, integrator_keys, {"x0", "y0", "z0", "y_start", "t_end", "samples", "svg"}}));
    const SystemParams p = ode_params(c);
    const IntegratorConfig cfg = integrator(c);
    State3 u0 = in_v_state(c.get_double("y_start", 1e-3), cfg.eps);
    const int given = c.has("x0") + c.has("y0") + c.has("z0");
    if (given != 0 && given != 3) throw ConfigError("x0, y0 and z0 must be given together");
    if (given == 3) u0 = {c.get_double("x0", 0), c.get_double("y0", 0), c.get_double("z0", 0)};
    const double t_end = c.get_double("t_end", 100.0);
    const int samples = c.get_int("samples", 2001);
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (samples < 2) throw ConfigError("samples must be at least 2");

    const Trajectory traj = integrate(u0, 0.0, t_end, p, cfg);
    std::ostringstream csv;
    CsvWriter w(csv, {"t", "x", "y", "z", "r"});
    PlotSeries sx = ser("x", "#1f77b4"), sy = ser("y", "#d62728"), sz = ser("z", "#2ca02c");
    for (int i = 0; i < samples; ++i) {
        const double t = t_end * i / (samples - 1);
        const State3 u = traj.at(t);
        w << t << u[0] << u[1] << u[2] << radius(u);
        w.end_row();
        sx.x.push_back(t), sx.y.push_back(u[0]);
        sy.x.push_back(t), sy.y.push_back(u[1]);
        sz.x.push_back(t), sz.y.push_back(u[2]);
    }
    out.write("trajectory.csv", csv.str());
    if (c.get_int("svg", 1))
        out.write("trajectory.svg", render_svg({"trajectory", "t", "coordinate", false, {sx, sy, sz}}));
}

void compare_map(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({ode_keys, integrator_keys, {"ns", "ny", "y_lo", "y_hi", "distortion"}}));
    const SystemParams p = ode_params(c);
    const IntegratorConfig cfg = integrator(c);
    const int ns = c.get_int("ns", 10), ny = c.get_int("ny", 10);
    // y in units of eps, log-spaced
    const double lo = c.get_double("y_lo", 1e-2), hi = c.get_double("y_hi", 0.5);
    if (!(lo > 0.0 && hi > lo && hi <= 1.0)) throw ConfigError("need 0 < y_lo < y_hi <= 1");
    if (ns < 1 || ny < 2) throw ConfigError("need ns >= 1 and ny >= 2");

    SystemParams p0 = p;
    p0.gamma = 0.0;
    const auto dc = derive_constants(p);
    const MapParams mp = map_params(p, dc, cfg.eps), mp0 = map_params(p0, dc, cfg.eps);
    const double P = pi / p.omega;
    const int n = ns * ny;
    struct Cell {
        double s, y, num, num0, an, an0, s_num, s_an, rt;
        std::array<SectionPoint, 4> log;
    };
    std::vector<Cell> cells(n);
    parallel_for(n, rc.threads, [&](int k) {
        Cell& e = cells[k];
        e.s = P * (k / ny) / ns;
        e.y = cfg.eps * lo * std::pow(hi / lo, static_cast<double>(k % ny) / (ny - 1));
        const double w = in_v_sphere_w(e.y, cfg.eps);
        const auto r = numerical_return(e.s, e.y, w, p, cfg);
        e.num = r.y;
        e.s_num = r.s;
        e.rt = r.return_time;
        e.log = r.log;
        e.num0 = p.gamma == 0.0 ? r.y : numerical_return(e.s, e.y, w, p0, cfg).y;
        const auto g = G({e.s, e.y / cfg.eps}, mp);
        e.an = cfg.eps * g.y;
        e.s_an = g.s;
        e.an0 = cfg.eps * G({e.s, e.y / cfg.eps}, mp0).y;
    });

    std::vector<double> ratio;
    for (const auto& e : cells) ratio.push_back(e.num0 / e.an0);
    const double distortion = c.has("distortion") ? c.get_double("distortion", 1.0) : quantile(ratio, 0.5);

    std::ostringstream csv;
    CsvWriter w(csv, {"s", "y", "y_analytic", "y_numeric", "abs_err", "rel_err", "y_analytic_scaled",
                      "y_numeric_unforced", "y_analytic_unforced", "s_numeric", "s_analytic", "return_time"});
    std::vector<double> rel, lx, lt;
    PlotSeries pn = ser("numerical", "#1f77b4"), pa = ser("analytic x distortion", "#d62728");
    pn.points = pa.points = true;
    for (const auto& e : cells) {
        const double scaled = distortion * e.an;
        const double r = std::abs(e.num - scaled) / std::abs(e.num);
        rel.push_back(r);
        lx.push_back(-std::log(e.y));
        lt.push_back(e.rt);
        w << e.s << e.y << e.an << e.num << std::abs(e.num - scaled) << r << scaled << e.num0 << e.an0 << e.s_num
          << e.s_an << e.rt;
        w.end_row();
        pn.x.push_back(e.y), pn.y.push_back(e.num);
        pa.x.push_back(e.y), pa.y.push_back(scaled);
    }
    // least-squares slope of return time against -ln y
    double mx = 0, mt = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], mt += lt[i];
    mx /= lx.size(), mt /= lt.size();
    double sxx = 0, sxt = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxt += (lx[i] - mx) * (lt[i] - mt);
    double spread = 0;
    for (int j = 0; j < ny; ++j) {
        double a = 1e300, b = -1e300;
        for (int i = 0; i < ns; ++i) a = std::min(a, cells[i * ny + j].num0), b = std::max(b, cells[i * ny + j].num0);
        spread = std::max(spread, (b - a) / b);
    }
    out.write("compare_map.csv", csv.str());

    std::ostringstream cx;
    CsvWriter wx(cx, {"cell", "section", "t", "c1", "c2"});
    for (int k = 0; k < n; ++k)
        for (const auto& sp : cells[k].log) {
            wx << k << section_name(sp.section) << sp.time << sp.c1 << sp.c2;
            wx.end_row();
        }
    out.write("crossings.csv", cx.str());

    std::ostringstream sum;
    CsvWriter s(sum, {"quantity", "value"});
    const std::pair<const char*, double> rows[] = {
        {"gamma", p.gamma},         {"gamma_map", mp.gamma},          {"K", dc.K},
        {"K_map", dc.K_map},        {"delta", dc.delta},              {"k1", dc.k1},
        {"distortion", distortion}, {"median_rel_err", quantile(rel, 0.5)},
        {"p90_rel_err", quantile(rel, 0.9)}, {"max_rel_err", quantile(rel, 1.0)},
        {"return_time_slope", sxt / sxx},    {"return_time_offset", mt - sxt / sxx * mx},
        {"unforced_s_spread", spread}};
    for (const auto& [k, v] : rows) {
        s << k << v;
        s.end_row();
    }
    out.write("compare_map_summary.csv", sum.str());
    out.write("compare_map.svg", render_svg({"return map: numerical vs analytic", "y", "y'", true, {pn, pa}}));
}

void atlas(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({map_level_keys, {"k1_list", "gamma_max", "n_gamma", "T_max", "n_T"}}));
    const MapParams base = map_level(c);
    const auto k1s = c.get_list("k1_list", {0.5, 2.0});
    const double gmax = c.get_double("gamma_max", 0.1);
    const int ng = c.get_int("n_gamma", 400);
    const double Tmax = c.get_double("T_max", 3.0);
    const int nT = c.get_int("n_T", 600);
    if (!(gmax > 0) || ng < 2 || !(Tmax > 0) || nT < 2) throw ConfigError("atlas grids must be positive");
    std::vector<double> gammas, Ts;
    for (int i = 1; i <= ng; ++i) gammas.push_back(gmax * i / ng);
    for (int i = 1; i <= nT; ++i) Ts.push_back(Tmax * i / nT);

    struct PerK1 {
        std::vector<BifurcationCurve> sn;
        BifurcationCurve hopf;
        std::vector<BTPoint> bt;
    };
    std::vector<PerK1> res(k1s.size());
    parallel_for(static_cast<int>(k1s.size()), rc.threads, [&](int i) {
        MapParams mp = base;
        mp.k1 = k1s[i];
        validate(mp);
        res[i].sn = saddle_node_curves(mp, Ts);
        res[i].hopf = hopf_locus(mp, gammas);
        res[i].bt = bt_points(mp);
    });

    std::ostringstream csv, bt, lines;
    CsvWriter w(csv, {"k1", "gamma", "T", "s", "y", "kind", "branch", "curve", "endpoint"});
    CsvWriter wb(bt, {"k1", "T", "gamma", "s", "y", "trace", "det"});
    CsvWriter wl(lines, {"k1", "label", "gamma"});
    Plot plot{"bifurcation atlas", "T", "gamma", false, {}};
    const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    for (std::size_t i = 0; i < k1s.size(); ++i) {
        const std::string tag = "k1=" + format_number(k1s[i]);
        const std::string col = colours[i % 5];
        int idx = 0;
        for (const auto& cur : res[i].sn) {
            PlotSeries ps = ser(idx == 0 ? "saddle-node " + tag : "", "#888888");
            for (const auto& smp : cur.samples) {
                w << k1s[i] << smp.gamma << smp.T << smp.s << smp.y << curve_kind_name(cur.kind)
                  << branch_name(smp.branch) << idx << 0;
                w.end_row();
                if (smp.gamma <= gmax) ps.x.push_back(smp.T), ps.y.push_back(smp.gamma);
                else ps.x.push_back(nan), ps.y.push_back(nan);
            }
            plot.series.push_back(ps);
            ++idx;
        }
        // the hopf samples come per gamma with possibly several T; connect in gamma order
        PlotSeries ph = ser("hopf " + tag, col);
        ph.points = true;
        for (const auto& smp : res[i].hopf.samples) {
            w << k1s[i] << smp.gamma << smp.T << smp.s << smp.y << curve_kind_name(res[i].hopf.kind)
              << branch_name(smp.branch) << idx << (smp.endpoint ? 1 : 0);
            w.end_row();
            ph.x.push_back(smp.T), ph.y.push_back(smp.gamma);
        }
        plot.series.push_back(ph);
        PlotSeries pb = ser("BT " + tag, "#000000");
        pb.points = true;
        for (const auto& b : res[i].bt) {
            wb << k1s[i] << b.T << b.gamma << b.s << b.y << b.jac.trace() << b.jac.det();
            wb.end_row();
            pb.x.push_back(b.T), pb.y.push_back(b.gamma);
        }
        plot.series.push_back(pb);
        MapParams mp = base;
        const double M = mp.M();
        wl << k1s[i] << "M/(1+k1)" << M / (1 + k1s[i]);
        wl.end_row();
        PlotSeries up = ser("", col);
        up.x = {Ts.front(), Ts.back()}, up.y = {M / (1 + k1s[i]), M / (1 + k1s[i])};
        plot.series.push_back(up);
        if (k1s[i] < 1) {
            wl << k1s[i] << "M/(1-k1)" << M / (1 - k1s[i]);
            wl.end_row();
            PlotSeries dn = ser("", col);
            dn.x = {Ts.front(), Ts.back()}, dn.y = {M / (1 - k1s[i]), M / (1 - k1s[i])};
            plot.series.push_back(dn);
        }
    }
    out.write("atlas_curves.csv", csv.str());
    out.write("atlas_bt.csv", bt.str());
    out.write("atlas_lines.csv", lines.str());
    out.write("atlas.svg", render_svg(plot));
}

void regions(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({map_level_keys, {"k1_min", "k1_max", "n_k1", "gamma_min", "gamma_max", "n_gamma"}}));
    const MapParams mp = map_level(c);
    const auto k1s = linspace(c.get_double("k1_min", 0.1), c.get_double("k1_max", 2.0), c.get_int("n_k1", 20));
    const auto gs = linspace(c.get_double("gamma_min", 0.005), c.get_double("gamma_max", 0.1), c.get_int("n_gamma", 20));
    std::ostringstream csv;
    CsvWriter w(csv, {"k1", "gamma", "region", "lower_gap", "upper_gap", "k1_gap"});
    int counts[6] = {};
    Plot plot{"regions", "k1", "gamma", false, {}};
    const char* colours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#000000"};
    std::vector<PlotSeries> by_region(6);
    for (int r = 0; r < 6; ++r) {
        by_region[r].label = region_name(static_cast<RegionLabel>(r));
        by_region[r].colour = colours[r];
        by_region[r].points = true;
    }
    for (double k1 : k1s)
        for (double g : gs) {
            const Region reg = classify_region(k1, g, mp);
            const int r = static_cast<int>(reg.label);
            ++counts[r];
            w << k1 << g << region_name(reg.label) << reg.lower_gap << reg.upper_gap << reg.k1_gap;
            w.end_row();
            by_region[r].x.push_back(k1), by_region[r].y.push_back(g);
        }
    std::ostringstream sum;
    CsvWriter s(sum, {"region", "cells"});
    for (int r = 0; r < 6; ++r) {
        s << region_name(static_cast<RegionLabel>(r)) << counts[r];
        s.end_row();
    }
    plot.series = by_region;
    out.write("regions.csv", csv.str());
    out.write("regions_summary.csv", sum.str());
    out.write("regions.svg", render_svg(plot));
}

void write_records(CsvWriter& w, const std::vector<FixedPointRecord>& recs, int n, double omega)
{
    for (const auto& r : recs) {
        w << n << omega << r.T << r.s << r.y << branch_name(r.branch) << stab(r) << r.eigenvalues[0].real()
          << r.eigenvalues[0].imag() << r.eigenvalues[1].real() << r.eigenvalues[1].imag();
        w.end_row();
    }
}

const std::vector<std::string> record_header{"n",   "omega", "T",      "s",      "y",      "branch",
                                             "stability", "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im"};

void fixed_points(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({map_level_keys, {"T", "T_min", "T_max", "n_T"}}));
    const MapParams mp = map_level(c);
    const auto Ts = T_values(c, 0.01, 3.0, 300);
    std::ostringstream csv;
    CsvWriter w(csv, record_header);
    PlotSeries star = ser("star", "#1f77b4"), diamond = ser("diamond", "#d62728");
    star.points = diamond.points = true;
    for (double T : Ts) {
        const auto recs = fixed_points_at_T(T, mp);
        write_records(w, recs, 0, mp.omega);
        for (const auto& r : recs) {
            auto& ps = r.branch == Branch::Star ? star : diamond;
            ps.x.push_back(T), ps.y.push_back(r.s);
        }
    }
    out.write("fixed_points.csv", csv.str());
    out.write("fixed_points.svg", render_svg({"fixed points of the shifted map", "T", "s", false, {star, diamond}}));
}

void freqlock(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({map_level_keys, {"n"}}));
    const MapParams mp = map_level(c);
    const int n = c.get_int("n", 1);
    if (n < 1) throw ConfigError("n must be at least 1");
    std::ostringstream csv;
    CsvWriter w(csv, record_header);
    write_records(w, frequency_locked(n, mp), n, mp.omega);
    out.write("freqlock.csv", csv.str());
}

void pendulum(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({map_level_keys, {"ell", "centre", "x0", "steps"}}));
    MapParams mp = map_level(c);
    const int ell = c.get_int("ell", 1), centre = c.get_int("centre", 2);
    if (ell < 1) throw ConfigError("ell must be at least 1");
    // without an explicit gamma, sit exactly on the locking level of this ell
    if (!c.has("gamma")) mp.gamma = F_of_T(ell * mp.period(), mp);
    if (centre != 1 && centre != 2) throw ConfigError("centre must be 1 or 2");
    const PendulumParams pp = pendulum_reduction(ell, mp, centre);
    const double x0 = c.get_double("x0", 1e-3);
    const int steps = c.get_int("steps", 50);
    std::ostringstream csv;
    CsvWriter w(csv, {"quantity", "value"});
    const std::pair<const char*, double> rows[] = {{"A", pp.A},
                                                   {"B", pp.B},
                                                   {"tau_scale", pp.tau_scale},
                                                   {"y_c", pp.y_c},
                                                   {"s_c", pp.s_c},
                                                   {"ell", static_cast<double>(pp.ell)},
                                                   {"valid_pendulum", pp.valid_pendulum ? 1.0 : 0.0}};
    for (const auto& [k, v] : rows) {
        w << k << v;
        w.end_row();
    }
    out.write("pendulum.csv", csv.str());

    std::ostringstream chk;
    CsvWriter wc(chk, {"x0", "steps", "deviation"});
    for (int h = 0; h <= 4; ++h) {
        const double x = x0 / std::pow(2.0, h);
        double d = 0.0;
        for (double sg : {1.0, -1.0})
            d = std::max(d, pendulum_orbit_check(pp, mp, {pp.s_c, pp.y_c * (1.0 + sg * x)}, steps));
        wc << x << steps << d;
        wc.end_row();
    }
    out.write("pendulum_check.csv", chk.str());
}

void curve(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({map_level_keys, {"grid_size", "max_iter", "tol", "rotation_iter", "annulus_samples"}}));
    const MapParams mp = map_level(c);
    CurveOptions opt;
    opt.grid_size = c.get_int("grid_size", opt.grid_size);
    opt.max_iter = c.get_int("max_iter", opt.max_iter);
    opt.tol = c.get_double("tol", opt.tol);
    const auto cur = invariant_curve(mp, opt);
    const auto avg = averaged_fixed_points(mp.gamma, mp);
    const auto ann = annulus_invariance(mp, c.get_int("annulus_samples", 200), rc.seed);
    const double rot = rotation_number(cur, mp, c.get_int("rotation_iter", 1000));

    std::ostringstream csv;
    CsvWriter w(csv, {"s", "h"});
    PlotSeries ph = ser("invariant curve", "#1f77b4"), lo = ser("annulus", "#888888"), hi = ser("", "#888888");
    for (std::size_t i = 0; i < cur.s.size(); ++i) {
        w << cur.s[i] << cur.h[i];
        w.end_row();
        ph.x.push_back(cur.s[i]), ph.y.push_back(cur.h[i]);
    }
    lo.x = hi.x = {0.0, cur.period};
    lo.y = {ann.y_lo, ann.y_lo};
    hi.y = {ann.y_hi, ann.y_hi};
    out.write("curve.csv", csv.str());

    std::ostringstream sum;
    CsvWriter s(sum, {"quantity", "value"});
    const std::pair<const char*, double> rows[] = {{"residual", cur.residual},
                                                   {"iterations", static_cast<double>(cur.iterations)},
                                                   {"winding_degree", static_cast<double>(winding_degree(cur, mp))},
                                                   {"rotation_number", rot},
                                                   {"y_hat", avg.y_hat},
                                                   {"R", avg.R},
                                                   {"annulus_lo", ann.y_lo},
                                                   {"annulus_hi", ann.y_hi},
                                                   {"annulus_samples", static_cast<double>(ann.samples)},
                                                   {"annulus_mapped_inside", static_cast<double>(ann.mapped_inside)}};
    for (const auto& [k, v] : rows) {
        s << k << v;
        s.end_row();
    }
    out.write("curve_summary.csv", sum.str());
    out.write("curve.svg", render_svg({"invariant curve", "s", "y", false, {ph, lo, hi}}));
}

void manifolds(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({map_level_keys, {"T", "seed_distance", "segments", "max_spacing", "arc_budget", "max_points"}}));
    const MapParams mp = map_level(c);
    if (!c.has("T")) throw ConfigError("manifolds needs T");
    const double T = c.get_double("T", 0.0);
    ManifoldOptions opt;
    opt.seed_distance = c.get_double("seed_distance", opt.seed_distance);
    opt.segments = c.get_int("segments", opt.segments);
    opt.max_spacing = c.get_double("max_spacing", opt.max_spacing);
    opt.arc_budget = c.get_double("arc_budget", opt.arc_budget);
    opt.max_points = static_cast<std::size_t>(c.get_int("max_points", static_cast<int>(opt.max_points)));
    const double P = mp.period();

    const auto recs = fixed_points_at_T(T, mp);
    const auto it = std::find_if(recs.begin(), recs.end(), [](const auto& r) { return r.stability == Stability::Saddle; });
    if (it == recs.end()) throw std::domain_error("no saddle fixed point at this T");
    const auto branches = trace_manifolds(*it, mp, opt);
    const auto hom = find_homoclinic(branches, P, 10.0 * opt.seed_distance);

    std::ostringstream csv;
    CsvWriter w(csv, {"side", "idx", "s", "y", "s_lift"});
    Plot plot{"invariant manifolds", "s", "y", false, {}};
    for (const auto& b : branches) {
        const bool stable = b.side == ManifoldSide::StablePlus || b.side == ManifoldSide::StableMinus;
        PlotSeries ps = ser(side_name(b.side), stable ? "#1f77b4" : "#d62728");
        double prev = nan;
        int idx = 0;
        for (const auto& q : b.points) {
            const double sc = std::isnan(q.s) ? nan : canonical_s(q.s, P);
            w << side_name(b.side) << idx++ << sc << q.y << q.s;
            w.end_row();
            if (!std::isnan(prev) && !std::isnan(sc) && std::abs(sc - prev) > 0.5 * P)
                ps.x.push_back(nan), ps.y.push_back(nan);
            ps.x.push_back(sc), ps.y.push_back(q.y);
            prev = sc;
        }
        plot.series.push_back(ps);
    }
    std::ostringstream hc;
    CsvWriter wh(hc, {"s", "y"});
    PlotSeries hp = ser("homoclinic", "#000000");
    hp.points = true;
    for (const auto& q : hom.points) {
        wh << q.s << q.y;
        wh.end_row();
        hp.x.push_back(q.s), hp.y.push_back(q.y);
    }
    plot.series.push_back(hp);
    out.write("manifolds.csv", csv.str());
    out.write("homoclinic.csv", hc.str());
    out.write("manifolds.svg", render_svg(plot));
}

void lyapunov(const RunConfig& rc, Output& out)
{
    const Config& c = rc.values;
    c.check_known(join({map_level_keys,
                        {"T", "T_min", "T_max", "n_T", "n_ic", "n_iter", "n_discard", "max_period", "orbit_steps"}}));
    const MapParams mp = map_level(c);
    const auto Ts = T_values(c, 1.0, 1.3, 31);
    const int n_ic = c.get_int("n_ic", 3), n_iter = c.get_int("n_iter", 20000), n_discard = c.get_int("n_discard", 3000);
    const int max_period = c.get_int("max_period", 64);
    if (n_ic < 1 || n_iter < 1 || n_discard < 0) throw ConfigError("n_ic, n_iter must be positive");

    // initial conditions drawn up front so results do not depend on threading
    std::mt19937_64 rng(rc.seed);
    std::uniform_real_distribution<double> us(0.0, mp.period()), uy(0.5, 1.5);
    std::vector<CylinderPoint> ics(Ts.size() * n_ic);
    for (std::size_t i = 0; i < Ts.size(); ++i)
        for (int j = 0; j < n_ic; ++j) ics[i * n_ic + j] = {us(rng), std::min(0.999, std::exp(-mp.K * Ts[i]) * uy(rng))};

    struct Row {
        LyapunovResult ly;
        PeriodicSink sink;
    };
    std::vector<Row> rows(ics.size());
    parallel_for(static_cast<int>(ics.size()), rc.threads, [&](int k) {
        const double T = Ts[k / n_ic];
        rows[k].ly = lyapunov_exponent(ics[k], T, mp, n_iter, n_discard);
        if (rows[k].ly.exponent < 0.0) rows[k].sink = find_periodic_sink(ics[k], T, mp, n_discard, max_period);
    });

    std::ostringstream csv;
    CsvWriter w(csv, {"T", "ic", "s0", "y0", "exponent", "steps", "truncated", "sink", "period", "log_rate"});
    PlotSeries pl = ser("largest exponent", "#1f77b4");
    pl.points = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        const double T = Ts[k / n_ic];
        w << T << static_cast<int>(k % n_ic) << ics[k].s << ics[k].y << r.ly.exponent << r.ly.steps
          << (r.ly.truncated ? 1 : 0) << (r.sink.found ? 1 : 0) << r.sink.period << (r.sink.found ? r.sink.log_rate : nan);
        w.end_row();
        if (!r.ly.truncated) pl.x.push_back(T), pl.y.push_back(r.ly.exponent);
    }
    PlotSeries zero = ser("", "#888888");
    zero.x = {Ts.front(), Ts.back()}, zero.y = {0.0, 0.0};
    out.write("lyapunov.csv", csv.str());

    // orbit of the first initial condition at the first T, reduced mod the period
    if (const int steps = c.get_int("orbit_steps", 0); steps > 0) {
        const double T = Ts.front();
        const auto orbit = iterate([&](const CylinderPoint& q) { return G_T(q, T, mp); }, ics.front(), steps);
        std::ostringstream oc;
        CsvWriter wo(oc, {"n", "s", "y"});
        for (std::size_t i = 0; i < orbit.points.size(); ++i) {
            wo << static_cast<int>(i) << canonical_s(orbit.points[i].s, mp.period()) << orbit.points[i].y;
            wo.end_row();
        }
        out.write("orbit.csv", oc.str());
    }
    out.write("lyapunov.svg", render_svg({"largest Lyapunov exponent", "T", "exponent", false, {pl, zero}}));
}

} // namespace

const char* command_name(Command c) { return names[static_cast<int>(c)]; }

Command command_from_name(const std::string& name)
{
    for (int i = 0; i < 10; ++i)
        if (name == names[i]) return static_cast<Command>(i);
    throw ConfigError("unknown command '" + name + "'");
}

std::vector<std::string> execute(const RunConfig& rc, std::ostream& log)
{
    if (rc.threads < 1) throw ConfigError("threads must be at least 1");
    std::error_code ec;
    std::filesystem::create_directories(rc.out_dir, ec);
    const auto probe = std::filesystem::path(rc.out_dir) / ".write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw ConfigError("output directory not writable: " + rc.out_dir);
    }
    std::filesystem::remove(probe, ec);

    Output out(rc.out_dir, log);
    switch (rc.command) {
    case Command::Simulate: simulate(rc, out); break;
    case Command::CompareMap: compare_map(rc, out); break;
    case Command::Atlas: atlas(rc, out); break;
    case Command::Regions: regions(rc, out); break;
    case Command::FixedPoints: fixed_points(rc, out); break;
    case Command::Freqlock: freqlock(rc, out); break;
    case Command::Pendulum: pendulum(rc, out); break;
    case Command::Curve: curve(rc, out); break;
    case Command::Manifolds: manifolds(rc, out); break;
    case Command::Lyapunov: lyapunov(rc, out); break;
    }
    return out.written();
}

int execute_guarded(const RunConfig& rc, std::ostream& log, std::ostream& err)
{
    try {
        execute(rc, log);
        return Ok;
    } catch (const std::invalid_argument& e) {  // ConfigError, ParameterError
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return NumericalFailure;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err)
{
    CLI::App app{"forced heteroclinic cycle toolkit"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    int threads = 1;
    std::uint64_t seed = 1;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "key=value file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for random sampling");
    app.add_option("--set", sets, "extra key=value, overrides the file");
    const char* blurbs[] = {"integrate the forced ODE",
                            "numerical return map vs the analytic map",
                            "saddle-node, Hopf and BT curves in (T, gamma)",
                            "region label over a (k1, gamma) grid",
                            "fixed points of the shifted map over T",
                            "frequency-locked fixed points",
                            "pendulum constants and orbit comparison",
                            "invariant curve by graph transform",
                            "saddle manifolds and homoclinic crossings",
                            "Lyapunov exponents and periodic sinks"};
    for (std::size_t i = 0; i < std::size(names); ++i) app.add_subcommand(names[i], blurbs[i])->fallthrough();

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        log << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return ConfigFailure;
    }

    RunConfig rc;
    try {
        rc.command = command_from_name(app.get_subcommands().front()->get_name());
        if (!config_path.empty()) rc.values = Config::load(config_path);
        for (const auto& kv : sets) {
            const Config one = Config::parse(kv);
            for (const auto& k : one.keys()) rc.values.set(k, one.get(k, ""));
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    }
    rc.out_dir = out_dir;
    rc.threads = threads;
    rc.seed = seed;
    return execute_guarded(rc, log, err);
}

} // namespace hetero::cli
