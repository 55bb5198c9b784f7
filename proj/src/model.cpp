#include "hetero/model.hpp"

#include <cmath>

namespace hetero {

void validate(const SystemParams& p)
{
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma) ||
        !std::isfinite(p.omega))
        throw ParameterError("parameters must be finite");
    if (!(p.alpha > 0.0)) throw ParameterError("alpha > 0 violated");
    if (!(p.beta < 0.0)) throw ParameterError("beta < 0 violated");
    if (!(std::abs(p.beta) < p.alpha)) throw ParameterError("|beta| < alpha violated");
    if (p.beta - p.alpha == -2.0) throw ParameterError("beta - alpha != -2 violated");
    if (!(p.gamma >= 0.0)) throw ParameterError("gamma >= 0 violated");
    if (!(p.omega > 0.0)) throw ParameterError("omega > 0 violated");
}

std::vector<std::string> warnings(const SystemParams& p)
{
    std::vector<std::string> out;
    if (std::abs(p.beta - p.alpha + 2.0) < 1e-2)
        out.emplace_back("beta - alpha is close to -2; linearisation near the nodes is poor");
    const double c = p.alpha - p.beta;
    if (!(c * c < 4.0 * p.alpha))
        out.emplace_back("(alpha - beta)^2 >= 4 alpha; the reduction to the cylinder map is not justified");
    return out;
}

double peak_time(double K, double delta)
{
    return std::log(delta) / (K * (delta - 1.0));
}

double peak_value(double delta)
{
    // delta^{1/(1-delta)} - delta^{delta/(1-delta)} = delta^{1/(1-delta)} (delta-1)/delta
    const double base = std::exp(-std::log(delta) / (delta - 1.0));
    return base * (delta - 1.0) / delta;
}

DerivedConstants derive_constants(const SystemParams& p, std::optional<double> k1_override)
{
    validate(p);
    DerivedConstants dc{};
    const double e = p.alpha + p.beta;
    const double c = p.alpha - p.beta;
    dc.delta_hat = c / e;
    dc.delta = dc.delta_hat * dc.delta_hat;
    dc.K = 2.0 * p.alpha / (e * e);
    dc.K_hat = pi * e * e / (2.0 * p.alpha);
    dc.K_map = 1.0 / dc.K;
    dc.M = peak_value(dc.delta);
    dc.T_M = peak_time(dc.K_map, dc.delta);
    dc.k_bar = 1.0 / std::sqrt(c * c + 4.0 * p.omega * p.omega);
    dc.K1 = 2.0 * p.omega / (e * e + 4.0 * p.omega * p.omega);
    dc.k1 = dc.k_bar / dc.K1;
    if (k1_override) {
        if (!(*k1_override > 0.0)) throw ParameterError("k1_override > 0 violated");
        dc.k1 = *k1_override;
    }
    dc.reduction_valid = c * c < 4.0 * p.alpha;
    return dc;
}

State3 vector_field(double t, const State3& u, const SystemParams& p)
{
    const double x = u[0], y = u[1], z = u[2];
    const double r2 = x * x + y * y + z * z;
    const double a = p.alpha, b = p.beta;
    const double damp = 1.0 - r2;
    return {
        x * damp - a * x * z + b * x * z * z + p.gamma * (1.0 - x) * std::sin(2.0 * p.omega * t),
        y * damp + a * y * z + b * y * z * z,
        z * damp - a * (y * y - x * x) - b * z * (x * x + y * y),
    };
}

std::pair<EquilibriumData, EquilibriumData> equilibria(const SystemParams& p)
{
    const double e = p.alpha + p.beta;
    const double c = p.alpha - p.beta;
    return {EquilibriumData{{0.0, 0.0, 1.0}, e, c, -2.0},
            EquilibriumData{{0.0, 0.0, -1.0}, e, c, -2.0}};
}

double radius(const State3& u)
{
    return std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
}

} // namespace hetero
