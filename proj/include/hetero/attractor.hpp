#pragma once

#include "hetero/bifurcation.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hetero {

// g(y) = y^delta + gamma has no fixed points in (0, 1)
struct NoFixedPointsError : std::domain_error {
    using std::domain_error::domain_error;
};

struct AveragedFixedPoints {
    double y_hat;    // stable
    double y_tilde;  // unstable
    double y_star;
    double R;
};

// Uses mp.delta and mp.k1; gamma is passed separately.
AveragedFixedPoints averaged_fixed_points(double gamma, const MapParams& mp);

struct GraphError : std::runtime_error {
    enum class Kind { NotAGraph, NoConvergence };
    Kind kind;
    GraphError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

struct CurveOptions {
    int grid_size = 512;
    int max_iter = 5000;
    double tol = 1e-8;
};

struct InvariantCurve {
    double period = 0.0;
    std::vector<double> s;
    std::vector<double> h;
    double residual = 0.0;
    int iterations = 0;

    std::function<double(double)> interp;  // periodic monotone cubic through (s, h)

    double eval(double s_query) const;
};

InvariantCurve invariant_curve(const MapParams& mp, const CurveOptions& opt = {});

// Net number of turns around the cylinder made by the image of the sampled graph.
int winding_degree(const InvariantCurve& c, const MapParams& mp);

struct AnnulusCheck {
    double y_lo;
    double y_hi;
    int samples;
    int mapped_inside;
};

// Random points of the annulus |y - y_hat| <= R gamma pushed through G once.
AnnulusCheck annulus_invariance(const MapParams& mp, int n, std::uint64_t seed);

// Mean advance of s per iterate over the period, for an orbit started on the curve.
double rotation_number(const InvariantCurve& c, const MapParams& mp, int n_iter);

enum class ManifoldSide { StablePlus, StableMinus, UnstablePlus, UnstableMinus };
const char* side_name(ManifoldSide s);

struct ManifoldOptions {
    double seed_distance = 1e-6;
    int segments = 30;         // fundamental segments per side
    double max_spacing = 2e-3;
    double arc_budget = 6.0;
    std::size_t max_points = 200000;
};

struct ManifoldPolyline {
    FixedPointRecord saddle;
    ManifoldSide side;
    std::vector<CylinderPoint> points;     // universal cover coordinates, NaN marks a gap
    std::vector<double> segment_lengths;   // arc length of each fundamental segment
    bool truncated = false;
};

// Branches of the saddle of the T-shifted map. Needs real eigenvalues
// 0 < |lambda_s| < 1 < |lambda_u|.
std::vector<ManifoldPolyline> trace_manifolds(const FixedPointRecord& saddle, const MapParams& mp,
                                              const ManifoldOptions& opt = {});

struct HomoclinicResult {
    bool found = false;
    std::vector<CylinderPoint> points;
};

// Crossings between unstable and stable polylines (stable copies shifted by
// whole periods), ignoring a ball of the given radius around the saddle.
HomoclinicResult find_homoclinic(const std::vector<ManifoldPolyline>& branches, double period,
                                 double exclusion);

// Any saddle of the T-shifted map with a homoclinic crossing.
HomoclinicResult homoclinic_at_T(double T, const MapParams& mp, const ManifoldOptions& opt = {});

struct LyapunovResult {
    double exponent = 0.0;
    int steps = 0;
    bool truncated = false;
};

LyapunovResult lyapunov_exponent(const CylinderPoint& pt, double T, const MapParams& mp, int n_iter,
                                 int n_discard);

struct PeriodicSink {
    bool found = false;
    int period = 0;
    CylinderPoint point{};
    double spectral_radius = 0.0;
    double log_rate = 0.0;  // ln(spectral radius) / period
};

// Looks for an attracting cycle of the T-shifted map reached from pt.
PeriodicSink find_periodic_sink(const CylinderPoint& pt, double T, const MapParams& mp, int n_transient,
                                int max_period);

} // namespace hetero
