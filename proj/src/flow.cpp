#include "hetero/flow.hpp"

#include <algorithm>
#include <cmath>

namespace hetero {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double norm3(const State3& u)
{
    return std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
}

} // namespace

void validate(const IntegratorConfig& cfg)
{
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol <= 1e-3)) throw ParameterError("rel_tol must lie in (0, 1e-3]");
    if (!(cfg.abs_tol > 0.0 && cfg.abs_tol <= 1e-3)) throw ParameterError("abs_tol must lie in (0, 1e-3]");
    if (!(cfg.eps > 0.0 && cfg.eps <= 0.5)) throw ParameterError("eps must lie in (0, 0.5]");
    if (!(cfg.max_step > 0.0)) throw ParameterError("max_step must be positive");
    if (!(cfg.horizon > 0.0)) throw ParameterError("horizon must be positive");
}

State3 DenseStep::eval(double t) const
{
    const double h = t1 - t0;
    const double th = h == 0.0 ? 0.0 : (t - t0) / h;
    const double th1 = 1.0 - th;
    State3 out;
    for (int i = 0; i < 3; ++i)
        out[i] = coef[0][i] +
                 th * (coef[1][i] + th1 * (coef[2][i] + th * (coef[3][i] + th1 * coef[4][i])));
    return out;
}

Integrator::Integrator(const SystemParams& p, const IntegratorConfig& cfg) : p_(p), cfg_(cfg)
{
    validate(cfg_);
}

State3 Integrator::rhs(double t, const State3& u) const
{
    return vector_field(t, u, p_);
}

void Integrator::reset(double t, const State3& u)
{
    t_ = t;
    u_ = u;
    k1_ = rhs(t, u);
    rejected_ = 0;
    // crude initial step from the scale of the solution and its derivative
    double d0 = 0.0, d1n = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(u[i]);
        d0 += (u[i] / sc) * (u[i] / sc);
        d1n += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / 3.0);
    d1n = std::sqrt(d1n / 3.0);
    double h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h_ = std::min({h, cfg_.max_step, 1e-2});
}

const DenseStep& Integrator::step(double t_stop)
{
    const double span = t_stop - t_;
    if (!(span > 0.0)) throw FlowError(FlowError::Kind::Timeout, "integrator asked to step past its stop time");
    bool last_rejected = false;
    for (;;) {
        double h = std::min({h_, cfg_.max_step, span});
        if (h < 1e-14 * std::max(1.0, std::abs(t_)))
            throw FlowError(FlowError::Kind::Stiffness, "step size underflow");

        const State3& y = u_;
        const State3& k1 = k1_;
        State3 tmp, k2, k3, k4, k5, k6, k7, y1;
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(t_ + c2 * h, tmp);
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t_ + c3 * h, tmp);
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t_ + c4 * h, tmp);
        for (int i = 0; i < 3; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t_ + c5 * h, tmp);
        for (int i = 0; i < 3; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(t_ + h, tmp);
        for (int i = 0; i < 3; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = rhs(t_ + h, y1);

        double err = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / 3.0);
        if (!std::isfinite(err)) {
            h_ = 0.1 * h;
            ++rejected_;
            last_rejected = true;
            continue;
        }

        if (err <= 1.0) {
            DenseStep& d = last_;
            d.t0 = t_;
            d.t1 = (h == span) ? t_stop : t_ + h;
            for (int i = 0; i < 3; ++i) {
                d.coef[0][i] = y[i];
                d.coef[1][i] = y1[i] - y[i];
                d.coef[2][i] = h * k1[i] - d.coef[1][i];
                d.coef[3][i] = d.coef[1][i] - h * k7[i] - d.coef[2][i];
                d.coef[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            t_ = d.t1;
            u_ = y1;
            k1_ = k7;
            if (norm3(u_) > 10.0)
                throw FlowError(FlowError::Kind::Divergence, "state norm exceeded 10");
            double fac = err == 0.0 ? 10.0 : 0.9 * std::pow(err, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h_ = h * fac;
            return last_;
        }
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        ++rejected_;
        last_rejected = true;
    }
}

void Trajectory::start(double t, const State3& u)
{
    t_.assign(1, t);
    u_.assign(1, u);
    seg_.clear();
}

void Trajectory::push(const DenseStep& s, const State3& end)
{
    seg_.push_back(s);
    t_.push_back(s.t1);
    u_.push_back(end);
}

State3 Trajectory::at(double t) const
{
    if (t_.empty()) throw std::out_of_range("empty trajectory");
    if (t <= t_.front()) return u_.front();
    if (t >= t_.back()) return u_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - t_.begin()) - 1;
    return seg_[k].eval(t);
}

Trajectory integrate(const State3& u0, double t0, double t1, const SystemParams& p,
                     const IntegratorConfig& cfg)
{
    if (!(t1 > t0)) throw std::invalid_argument("integrate requires t1 > t0");
    Integrator in(p, cfg);
    in.reset(t0, u0);
    Trajectory tr;
    tr.start(t0, u0);
    while (in.time() < t1) {
        const DenseStep& s = in.step(t1);
        tr.push(s, in.state());
    }
    return tr;
}

double sphere_drift(const Trajectory& traj)
{
    double m = 0.0;
    for (const auto& u : traj.states()) m = std::max(m, std::abs(radius(u) - 1.0));
    return m;
}

const char* section_name(Section s)
{
    switch (s) {
    case Section::InV: return "InV";
    case Section::OutV: return "OutV";
    case Section::InW: return "InW";
    case Section::OutW: return "OutW";
    }
    return "?";
}

namespace {

struct EventSpec {
    int coord;      // 0 for x, 1 for y
    int direction;  // -1 falling through eps, +1 rising
    double z_sign;  // +1 near v, -1 near w
};

EventSpec spec_of(Section s)
{
    switch (s) {
    case Section::InV: return {0, -1, 1.0};
    case Section::OutV: return {1, +1, 1.0};
    case Section::InW: return {1, -1, -1.0};
    case Section::OutW: return {0, +1, -1.0};
    }
    return {0, -1, 1.0};
}

SectionPoint make_point(Section s, double t, const State3& u)
{
    const double w = u[2] - (spec_of(s).z_sign > 0 ? 1.0 : -1.0);
    const double c1 = spec_of(s).coord == 0 ? u[1] : u[0];
    return {s, c1, w, t};
}

} // namespace

Crossing next_section_crossing(const State3& u, double t, Section target, const SystemParams& p,
                               const IntegratorConfig& cfg)
{
    const EventSpec ev = spec_of(target);
    auto g = [&](const State3& v) { return v[ev.coord] - cfg.eps; };

    Integrator in(p, cfg);
    in.reset(t, u);
    const double t_end = t + cfg.horizon;
    double g_prev = g(u);
    while (in.time() < t_end) {
        const DenseStep& st = in.step(t_end);
        const double g_new = g(in.state());
        const bool crossed = ev.direction < 0 ? (g_prev > 0.0 && g_new <= 0.0)
                                              : (g_prev < 0.0 && g_new >= 0.0);
        g_prev = g_new;
        if (!crossed) continue;

        double lo = st.t0, hi = st.t1;
        double glo = g(st.eval(lo));
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = g(st.eval(mid));
            if ((gm > 0.0) == (glo > 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        double tc = 0.5 * (lo + hi);
        for (int it = 0; it < 4; ++it) {
            const State3 uc = st.eval(tc);
            const double nv = vector_field(tc, uc, p)[ev.coord];
            if (nv == 0.0) break;
            const double next = tc - g(uc) / nv;
            if (next < st.t0 || next > st.t1) break;
            tc = next;
        }
        const State3 uc = st.eval(tc);
        if (uc[2] * ev.z_sign <= 0.0) continue;
        const double nv = vector_field(tc, uc, p)[ev.coord];
        if (std::abs(nv) < 1e-9) continue;
        return {make_point(target, tc, uc), uc};
    }
    throw FlowError(FlowError::Kind::Timeout,
                    std::string("no crossing of ") + section_name(target) + " within the horizon");
}

double in_v_sphere_w(double y, double eps)
{
    return std::sqrt(1.0 - eps * eps - y * y) - 1.0;
}

State3 in_v_state(double y, double eps)
{
    return {eps, y, 1.0 + in_v_sphere_w(y, eps)};
}

ReturnResult numerical_return(double s, double y, double w, const SystemParams& p,
                              const IntegratorConfig& cfg)
{
    validate(p);
    validate(cfg);
    if (!(y > 0.0 && y < cfg.eps)) throw std::invalid_argument("y must lie in (0, eps)");
    if (!(std::abs(w) < cfg.eps)) throw std::invalid_argument("|w| must be below eps");
    State3 u{cfg.eps, y, 1.0 + w};
    double t = s;
    ReturnResult out{};
    const Section order[4] = {Section::OutV, Section::InW, Section::OutW, Section::InV};
    for (int k = 0; k < 4; ++k) {
        const Crossing c = next_section_crossing(u, t, order[k], p, cfg);
        out.log[k] = c.point;
        u = c.state;
        t = c.point.time;
    }
    const double period = pi / p.omega;
    out.arrival = t;
    out.return_time = t - s;
    out.s = t - period * std::floor(t / period);
    out.y = out.log[3].c1;
    out.w = out.log[3].c2;
    return out;
}

} // namespace hetero
