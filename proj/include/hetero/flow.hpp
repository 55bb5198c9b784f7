#pragma once

#include "hetero/model.hpp"

#include <stdexcept>
#include <vector>

namespace hetero {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    double max_step = 0.5;
    double eps = 0.1;        // cross-section half-width
    double horizon = 500.0;  // give up on an event search after this much time
};

void validate(const IntegratorConfig& cfg);

class FlowError : public std::runtime_error {
public:
    enum class Kind { Stiffness, Divergence, Timeout, Transversality };
    FlowError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// One accepted step with its continuous extension.
struct DenseStep {
    double t0 = 0.0;
    double t1 = 0.0;
    std::array<State3, 5> coef{};
    State3 eval(double t) const;
};

// Dormand-Prince 5(4) with FSAL and 4th-order dense output.
class Integrator {
public:
    Integrator(const SystemParams& p, const IntegratorConfig& cfg);

    void reset(double t, const State3& u);
    // Advances by one accepted step, never past t_stop.
    const DenseStep& step(double t_stop);

    double time() const { return t_; }
    const State3& state() const { return u_; }
    std::size_t rejected() const { return rejected_; }

private:
    State3 rhs(double t, const State3& u) const;

    SystemParams p_;
    IntegratorConfig cfg_;
    double t_ = 0.0;
    double h_ = 0.0;
    State3 u_{};
    State3 k1_{};
    DenseStep last_{};
    std::size_t rejected_ = 0;
};

class Trajectory {
public:
    void push(const DenseStep& s, const State3& end);
    void start(double t, const State3& u);

    const std::vector<double>& times() const { return t_; }
    const std::vector<State3>& states() const { return u_; }
    State3 at(double t) const;

private:
    std::vector<double> t_;
    std::vector<State3> u_;
    std::vector<DenseStep> seg_;
};

Trajectory integrate(const State3& u0, double t0, double t1, const SystemParams& p,
                     const IntegratorConfig& cfg);

double sphere_drift(const Trajectory& traj);

enum class Section { InV, OutV, InW, OutW };
const char* section_name(Section s);

struct SectionPoint {
    Section section;
    double c1;
    double c2;
    double time;
};

struct Crossing {
    SectionPoint point;
    State3 state;
};

Crossing next_section_crossing(const State3& u, double t, Section target, const SystemParams& p,
                               const IntegratorConfig& cfg);

// Point of In(v) on the unit sphere with local coordinate y.
State3 in_v_state(double y, double eps);
double in_v_sphere_w(double y, double eps);

struct ReturnResult {
    double s;            // arrival time mod pi/omega
    double y;
    double w;
    double arrival;      // absolute arrival time
    double return_time;  // arrival - start
    std::array<SectionPoint, 4> log;
};

ReturnResult numerical_return(double s, double y, double w, const SystemParams& p,
                              const IntegratorConfig& cfg);

} // namespace hetero
