#pragma once

#include "hetero/model.hpp"

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace hetero {

struct CylinderPoint {
    double s;
    double y;
};

// Map-level parameters. K is the decay rate of the map: one return advances
// the phase by -ln(y)/K, so fixed points of the T-shifted map sit at y=exp(-K T).
struct MapParams {
    double K = 3.0;
    double delta = 1.1;
    double omega = 1.0;
    double k1 = 0.5;
    double gamma = 0.01;

    double period() const { return pi / omega; }
    double T_M() const { return peak_time(K, delta); }
    double M() const { return peak_value(delta); }
};

void validate(const MapParams& mp);

// Bridge from the flow: K = 1/K_phys and gamma rescaled so that the
// constant part of the forcing response has unit gain (k2 = 1), in units
// where the cross-sections sit at eps.
MapParams map_params(const SystemParams& p, const DerivedConstants& dc, double eps = 1.0);

double canonical_s(double s, double period);

// Definite integral of exp(-A (tau - s)) sin(2 omega tau) over [s, t].
double integral_IA(double A, double omega, double s, double t);

// Same integral with A = beta - alpha and t the flight time from y1 to eps,
// written through the constants c1 = 1/(beta-alpha), c2 = 2 omega/(beta-alpha)^2.
double integral_IA_expansion(const SystemParams& p, double s, double y1, double eps);

struct LocalMap {
    double T;  // exit time
    double c;  // exit coordinate (x-hat near v, y-hat near w)
    double w;  // radial offset
};

LocalMap phi_v(double s, double y1, double w1, const SystemParams& p, const DerivedConstants& dc,
               double eps);
LocalMap phi_w(double s, double x2, double w2, const SystemParams& p, const DerivedConstants& dc,
               double eps);

std::pair<double, double> G_unperturbed(double y, double w, const DerivedConstants& dc);

// Universal cover versions do not reduce s.
CylinderPoint G_lift(const CylinderPoint& pt, const MapParams& mp);
CylinderPoint G(const CylinderPoint& pt, const MapParams& mp);
CylinderPoint G_T(const CylinderPoint& pt, double T, const MapParams& mp);

// Composition of the local maps with identity transitions (ε units), third
// coordinate kept.
struct FullReturn {
    double s;
    double y;
    double w;
};
FullReturn G_full(double s, double y, double w, const SystemParams& p, const DerivedConstants& dc,
                  double eps = 1.0);

struct Jacobian2 {
    double a, b, c, d;  // [[a, b], [c, d]]

    double trace() const { return a + d; }
    double det() const { return a * d - b * c; }
    std::array<std::complex<double>, 2> eigenvalues() const;
    double spectral_radius() const;
};

Jacobian2 jacobian_G(const CylinderPoint& pt, const MapParams& mp);

bool in_range(const CylinderPoint& pt);

struct Orbit {
    std::vector<CylinderPoint> points;
    bool truncated = false;
};

using PlanarMap = std::function<CylinderPoint(const CylinderPoint&)>;

// n-fold iteration; stops (truncated=true) when y leaves (0, 1].
Orbit iterate(const PlanarMap& f, const CylinderPoint& pt, int n);

} // namespace hetero
