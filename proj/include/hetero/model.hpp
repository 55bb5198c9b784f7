#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetero {

constexpr double pi = 3.14159265358979323846;

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Physical parameters of the forced system.
struct SystemParams {
    double alpha = 1.0;
    double beta = -0.1;
    double gamma = 0.0;
    double omega = 1.0;
};

struct DerivedConstants {
    double delta_hat;  // contracting/expanding ratio at each node
    double delta;      // delta_hat^2
    double K;          // return time is -K ln y
    double K_hat;      // pi/K
    double K_map;      // decay rate of the cylinder map, 1/K
    double M;          // maximum of F
    double T_M;        // argmax of F, in map units (uses K_map)
    double k_bar;      // forcing gain near v
    double K1;         // forcing gain near w (tail integral)
    double k1;         // k_bar/K1
    bool reduction_valid;
};

using State3 = std::array<double, 3>;

struct EquilibriumData {
    State3 location;
    double expanding;
    double contracting;
    double radial;
};

// Throws ParameterError naming the violated inequality.
void validate(const SystemParams& p);

// Soft diagnostics that do not prevent a run.
std::vector<std::string> warnings(const SystemParams& p);

DerivedConstants derive_constants(const SystemParams& p,
                                  std::optional<double> k1_override = std::nullopt);

// Closed forms shared by the map-level code; only depend on (K, delta).
double peak_time(double K, double delta);
double peak_value(double delta);

State3 vector_field(double t, const State3& u, const SystemParams& p);

std::pair<EquilibriumData, EquilibriumData> equilibria(const SystemParams& p);

double radius(const State3& u);

} // namespace hetero
