#include "spinbus/core.hpp"

#include <cmath>

namespace spinbus {

double dipolar_coupling(const PhysicalConstants& c, double r_nm) {
    if (r_nm <= 0) throw std::domain_error("dipolar_coupling: r must be > 0");
    return c.dipolar_angular * c.dipolar_prefactor / (r_nm * r_nm * r_nm);
}

RotatedHyperfine rotated_hyperfine(const PhysicalConstants& c, JTAxis axis) {
    if (axis == JTAxis::Parallel) {
        return {0.0, 0.0, c.n_hyperfine_par, std::abs(c.n_hyperfine_par)};
    }
    const double d = (c.n_hyperfine_par - c.n_hyperfine_perp) / (3.0 * std::sqrt(3.0));
    const double alpha = d * 2.0 / std::sqrt(6.0);
    const double beta = d * 2.0 / std::sqrt(2.0);
    const double gamma = c.n_hyperfine_par / 9.0 + 8.0 * c.n_hyperfine_perp / 9.0;
    const double split = std::sqrt(alpha * alpha + beta * beta + gamma * gamma);
    return {alpha, beta, gamma, split};
}

std::array<double, 4> impurity_line_offsets(const PhysicalConstants& c, bool rounded) {
    if (rounded) return {+80e6, -80e6, +60e6, -60e6};
    const double half_par = c.n_hyperfine_par / 2.0;
    const double half_gamma = rotated_hyperfine(c, JTAxis::Tilted1).gamma / 2.0;
    return {+half_par, -half_par, +half_gamma, -half_gamma};
}

double jt_relaxation_rate(const PhysicalConstants& c, double temperature_k) {
    if (temperature_k <= 0) throw std::domain_error("jt_relaxation_rate: T must be > 0");
    return c.jt_attempt_rate *
           std::exp(-c.jt_activation_ev / (c.boltzmann_ev_per_k * temperature_k));
}

double gradient_detuning(const SystemSpec& spec, double dy_nm) {
    return spec.gradient_t_per_m * spec.constants.electron_gyro * dy_nm * 1e-9;
}

double nitrogen_hyperfine_shift(const PhysicalConstants& c, JTAxis axis, int nuclear_state) {
    const double coeff =
        (axis == JTAxis::Parallel) ? c.n_hyperfine_par : rotated_hyperfine(c, axis).gamma;
    return coeff * (nuclear_state >= 0 ? 0.5 : -0.5);
}

} // namespace spinbus
