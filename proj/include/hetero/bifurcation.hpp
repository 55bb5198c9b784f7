#pragma once

#include "hetero/retmap.hpp"

#include <string>
#include <vector>

namespace hetero {

double F_of_T(double T, const MapParams& mp);
double dF_dT(double T, const MapParams& mp);
double d2F_dT2(double T, const MapParams& mp);

enum class RegionLabel { R1, R2, R3, R4, R5, Boundary };
const char* region_name(RegionLabel r);

struct Region {
    RegionLabel label;
    double lower_gap;  // gamma (1 - k1) - M
    double upper_gap;  // gamma (1 + k1) - M
    double k1_gap;     // k1 - 1
};

// Uses k1 and gamma from the arguments and M from mp.delta.
Region classify_region(double k1, double gamma, const MapParams& mp);

enum class Branch { Star, Diamond };
enum class Stability { Sink, Saddle, Source, Nonhyperbolic };
const char* branch_name(Branch b);
const char* stability_name(Stability s);

struct FixedPointRecord {
    double s;
    double y;
    double T;
    Branch branch;
    std::array<std::complex<double>, 2> eigenvalues;
    Stability stability;
};

Stability classify_eigenvalues(const std::array<std::complex<double>, 2>& ev);
Stability stability_of(const FixedPointRecord& r, const MapParams& mp);

// Fixed points of the T-shifted map, sorted by s in [0, pi/omega).
std::vector<FixedPointRecord> fixed_points_at_T(double T, const MapParams& mp);

struct SaddleNode {
    double T;
    int level;  // -1: F = gamma (1 - k1), +1: F = gamma (1 + k1)
};

std::vector<SaddleNode> saddle_node_T_values(const MapParams& mp);

// Root of F(T) = level on the increasing (rising=true) or decreasing branch.
double solve_F_level(double level, bool rising, const MapParams& mp);

enum class CurveKind { SaddleNode, Hopf, BTPoint };
const char* curve_kind_name(CurveKind k);

struct CurveSample {
    double T;
    double gamma;
    double s;
    double y;
    Branch branch;
    bool endpoint = false;
};

struct BifurcationCurve {
    CurveKind kind;
    double k1;
    double omega;
    std::vector<CurveSample> samples;
};

// Left side of the Hopf condition and its T-derivative.
double hopf_function(double T, const MapParams& mp);
double hopf_function_dT(double T, const MapParams& mp);

// For each gamma in the grid, every T > T_M solving the Hopf condition with
// a non-real eigenvalue pair. Endpoints on T = T_M are located between grid
// values by bisection in gamma and flagged.
BifurcationCurve hopf_locus(const MapParams& mp, const std::vector<double>& gamma_grid);

// Saddle-node surfaces as curves gamma(T) = F(T)/(1 +- k1) on the given T grid.
std::vector<BifurcationCurve> saddle_node_curves(const MapParams& mp, const std::vector<double>& T_grid);

struct BTPoint {
    double T;
    double gamma;
    double s;
    double y;
    Jacobian2 jac;
};

std::vector<BTPoint> bt_points(const MapParams& mp);

double F_n(int n, double omega, const MapParams& mp);
std::vector<FixedPointRecord> frequency_locked(int n, const MapParams& mp);

struct PendulumParams {
    double A;
    double B;
    double tau_scale;
    double y_c;
    double s_c;
    int ell;
    bool valid_pendulum;  // B < 1 and gamma < M
};

// centre selects s_c = centre * pi/(2 omega), centre in {1, 2}.
PendulumParams pendulum_reduction(int ell, const MapParams& mp, int centre = 2);

// Runs G and the discrete pendulum side by side in (x, theta) coordinates and
// returns the largest coordinate deviation over n steps.
double pendulum_orbit_check(const PendulumParams& pp, const MapParams& mp, const CylinderPoint& start,
                            int n);

} // namespace hetero
