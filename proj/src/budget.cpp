#include "spinbus/budget.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spinbus {

namespace {

// calibrated constants (see header); frozen against the published operating points
constexpr double kAdia = 7.0e-4;
constexpr double kOff = 0.25;
constexpr double kDip = 0.25;
constexpr double kT1FFST = 2.0 * std::numbers::sqrt2;  // on N * t_ffst / T1

double band_center_spacing(int n, double kappa) {
    return 2.0 * std::numbers::pi * kappa / (n + 1.0);
}

} // namespace

void SSBudgetParams::validate() const {
    if (n < 1 || kappa_hz <= 0 || omega_i_hz <= 0 || delta_g_hz <= 0 || t_ss_s <= 0 || t1_s <= 0)
        throw std::domain_error("SSBudgetParams: all parameters must be positive");
}

void FFSTBudgetParams::validate() const {
    if (n < 1 || kappa_hz <= 0 || omega_n_hz <= 0 || omega_hz <= 0 || delta_g_hz <= 0 || t1_s <= 0)
        throw std::domain_error("FFSTBudgetParams: all parameters must be positive");
}

double FFSTBudgetParams::g_eff_hz() const {
    return 2.0 * std::numbers::sqrt2 * kappa_hz * omega_hz / delta_hz();
}

double FFSTBudgetParams::t_ffst_s() const { return std::sqrt(static_cast<double>(n)) / g_eff_hz(); }

ErrorBudget ss_budget(const SSBudgetParams& p) {
    p.validate();
    ErrorBudget b;
    const double n = p.n;
    b.terms["adiabatic"] = n * kAdia / std::pow(p.kappa_hz * p.t_ss_s, 2.0);
    b.terms["off_resonant"] = n * kOff * std::pow(p.omega_i_hz / p.delta_g_hz, 2.0);
    b.terms["dip"] = n * kDip * std::pow(p.kappa_hz / p.omega_i_hz, 2.0);
    b.terms["t1"] = n * p.t_ss_s / p.t1_s;
    if (p.include_t2) b.terms["t2"] = n * std::pow(p.t_ss_s / p.t2_s, 3.0);
    for (const auto& [k, v] : b.terms) b.total += v;
    // unit-coefficient (published-form) evaluation for reference
    b.alternatives["unit_total"] =
        n * (1.0 / std::pow(p.kappa_hz * p.t_ss_s, 2.0) + std::pow(p.omega_i_hz / p.delta_g_hz, 2.0) +
             std::pow(p.kappa_hz / p.omega_i_hz, 2.0) + p.t_ss_s / p.t1_s);
    b.alternatives["t2_term"] = n * std::pow(p.t_ss_s / p.t2_s, 3.0);
    return b;
}

ErrorBudget ffst_budget(const FFSTBudgetParams& p) {
    p.validate();
    ErrorBudget b;
    const double n = p.n;
    const double g = p.g_eff_hz();
    const double t = p.t_ffst_s();
    const double sp_bc = band_center_spacing(p.n, p.kappa_hz);
    const double sp_kn = p.kappa_hz / n;
    const double sp = (p.spacing == ModeSpacing::BandCenter) ? sp_bc : sp_kn;
    b.terms["off_resonant"] =
        kOff * (p.omega_n_hz * p.omega_n_hz + p.omega_hz * p.omega_hz) /
        (p.delta_g_hz * p.delta_g_hz);
    const double g_lin = g / (2.0 * std::numbers::sqrt2);  // kappa Omega / Delta
    b.terms["fermi"] = std::pow(g_lin / std::sqrt(n) / sp, 2.0);
    b.terms["g_control"] = std::pow(p.kappa_hz / p.delta_hz(), 2.0);
    b.terms["t1"] = kT1FFST * n * t / p.t1_s;
    for (const auto& [k, v] : b.terms) b.total += v;
    // alternative conventions, reported not summed
    b.alternatives["fermi_kappa_over_n"] = std::pow(g_lin / std::sqrt(n) / sp_kn, 2.0);
    b.alternatives["fermi_band_center"] = std::pow(g_lin / std::sqrt(n) / sp_bc, 2.0);
    b.alternatives["unit_total"] = (p.omega_n_hz * p.omega_n_hz + p.omega_hz * p.omega_hz) /
                                       (p.delta_g_hz * p.delta_g_hz) +
                                   std::pow(g / std::sqrt(n) / sp_kn, 2.0) +
                                   std::pow(p.kappa_hz / p.delta_hz(), 2.0) + n * t / p.t1_s;
    b.alternatives["t_ffst"] = t;
    return b;
}

double ss_coherent_sim_estimate(double kappa_hz, double omega_i_hz, double delta_g_hz,
                                double t_ss_s) {
    // endpoint floor + averaged endpoint kick + off-resonant excitation
    const double floor = 2.0 * std::pow(kappa_hz / omega_i_hz, 2.0);
    const double kick = 1.0 / (8.0 * std::pow(t_ss_s * omega_i_hz, 2.0));
    const double off = kOff * std::pow(omega_i_hz / delta_g_hz, 2.0);
    return floor + kick + off;
}

namespace {

template <typename F>
std::pair<std::pair<double, double>, double> grid_minimize(F f, double lo1, double hi1, double lo2,
                                                           double hi2, bool& boundary) {
    constexpr int kPts = 64;
    constexpr int kRounds = 3;
    double bx = lo1, by = lo2, bv = std::numeric_limits<double>::infinity();
    boundary = false;
    for (int round = 0; round < kRounds; ++round) {
        std::vector<double> xs(kPts), ys(kPts);
        for (int i = 0; i < kPts; ++i) {
            xs[static_cast<size_t>(i)] =
                std::exp(std::log(lo1) + (std::log(hi1) - std::log(lo1)) * i / (kPts - 1));
            ys[static_cast<size_t>(i)] =
                std::exp(std::log(lo2) + (std::log(hi2) - std::log(lo2)) * i / (kPts - 1));
        }
        int bi = 0, bj = 0;
        bv = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kPts; ++i)
            for (int j = 0; j < kPts; ++j) {
                const double v = f(xs[static_cast<size_t>(i)], ys[static_cast<size_t>(j)]);
                if (v < bv) {
                    bv = v;
                    bi = i;
                    bj = j;
                }
            }
        if (round == 0 && (bi == 0 || bi == kPts - 1 || bj == 0 || bj == kPts - 1))
            boundary = true;
        bx = xs[static_cast<size_t>(bi)];
        by = ys[static_cast<size_t>(bj)];
        lo1 = xs[static_cast<size_t>(std::max(bi - 2, 0))];
        hi1 = xs[static_cast<size_t>(std::min(bi + 2, kPts - 1))];
        lo2 = ys[static_cast<size_t>(std::max(bj - 2, 0))];
        hi2 = ys[static_cast<size_t>(std::min(bj + 2, kPts - 1))];
    }
    return {{bx, by}, bv};
}

} // namespace

SSOptimum optimize_ss(int n, double kappa_hz, double delta_g_hz, double t1_s) {
    if (n < 1 || kappa_hz <= 0 || delta_g_hz <= 0 || t1_s <= 0)
        throw std::domain_error("optimize_ss: positive inputs required");
    auto eval = [&](double t_ss, double omega) {
        SSBudgetParams p;
        p.n = n;
        p.kappa_hz = kappa_hz;
        p.delta_g_hz = delta_g_hz;
        p.t1_s = t1_s;
        p.t_ss_s = t_ss;
        p.omega_i_hz = omega;
        return ss_budget(p).total;
    };
    bool boundary = false;
    auto [xy, v] = grid_minimize(eval, 1e-7, 1e-1, 1e3, 1e7, boundary);
    SSOptimum o;
    o.t_ss_s = xy.first;
    o.omega_i_hz = xy.second;
    SSBudgetParams p;
    p.n = n;
    p.kappa_hz = kappa_hz;
    p.delta_g_hz = delta_g_hz;
    p.t1_s = t1_s;
    p.t_ss_s = o.t_ss_s;
    p.omega_i_hz = o.omega_i_hz;
    o.budget = ss_budget(p);
    o.boundary_warning = boundary;
    return o;
}

FFSTOptimum optimize_ffst(int n, double kappa_hz, double delta_g_hz, double t1_s,
                          ModeSpacing spacing) {
    if (n < 1 || kappa_hz <= 0 || delta_g_hz <= 0 || t1_s <= 0)
        throw std::domain_error("optimize_ffst: positive inputs required");
    auto eval = [&](double omega_n, double omega) {
        FFSTBudgetParams p;
        p.n = n;
        p.kappa_hz = kappa_hz;
        p.delta_g_hz = delta_g_hz;
        p.t1_s = t1_s;
        p.omega_n_hz = omega_n;
        p.omega_hz = omega;
        p.spacing = spacing;
        return ffst_budget(p).total;
    };
    bool boundary = false;
    auto [xy, v] = grid_minimize(eval, 1e4, 1e7, 1e2, 1e6, boundary);
    FFSTOptimum o;
    o.omega_n_hz = xy.first;
    o.omega_hz = xy.second;
    FFSTBudgetParams p;
    p.n = n;
    p.kappa_hz = kappa_hz;
    p.delta_g_hz = delta_g_hz;
    p.t1_s = t1_s;
    p.omega_n_hz = o.omega_n_hz;
    p.omega_hz = o.omega_hz;
    p.spacing = spacing;
    o.t_ffst_s = p.t_ffst_s();
    o.budget = ffst_budget(p);
    o.boundary_warning = boundary;
    return o;
}

double ContourGrid::at(int i_t1, int i_time) const {
    return infidelity[static_cast<size_t>(i_t1) * time_axis.size() + static_cast<size_t>(i_time)];
}

double ContourGrid::min_over_time(int i_t1) const {
    double m = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < time_axis.size(); ++j)
        m = std::min(m, infidelity[static_cast<size_t>(i_t1) * time_axis.size() + j]);
    return m;
}

std::string ContourGrid::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "t1_s,t_total_s,infidelity\n";
    for (size_t i = 0; i < t1_axis.size(); ++i)
        for (size_t j = 0; j < time_axis.size(); ++j)
            os << t1_axis[i] << ',' << time_axis[j] << ',' << infidelity[i * time_axis.size() + j]
               << '\n';
    return os.str();
}

ContourGrid contour_grid(BudgetMethod method, int n, double kappa_hz, double delta_g_hz,
                         std::pair<double, double> t1_range, std::pair<double, double> time_range,
                         int n_t1, int n_time) {
    if (t1_range.first <= 0 || time_range.first <= 0)
        throw std::domain_error("contour_grid: ranges must be positive");
    if (n_t1 > 512 || n_time > 512) throw std::domain_error("contour_grid: grid capped at 512");
    ContourGrid g;
    for (int i = 0; i < n_t1; ++i)
        g.t1_axis.push_back(std::exp(std::log(t1_range.first) +
                                     (std::log(t1_range.second) - std::log(t1_range.first)) *
                                         (n_t1 == 1 ? 0.0 : static_cast<double>(i) / (n_t1 - 1))));
    for (int j = 0; j < n_time; ++j)
        g.time_axis.push_back(
            std::exp(std::log(time_range.first) +
                     (std::log(time_range.second) - std::log(time_range.first)) *
                         (n_time == 1 ? 0.0 : static_cast<double>(j) / (n_time - 1))));
    g.infidelity.resize(static_cast<size_t>(n_t1) * static_cast<size_t>(n_time));

    for (int i = 0; i < n_t1; ++i) {
        const double t1 = g.t1_axis[static_cast<size_t>(i)];
        for (int j = 0; j < n_time; ++j) {
            const double t_total = g.time_axis[static_cast<size_t>(j)];
            double best = std::numeric_limits<double>::infinity();
            if (method == BudgetMethod::SS) {
                const double t_ss = t_total / n;
                // 1-D optimization over Omega_i at fixed exposure t_total
                for (int m = 0; m < 96; ++m) {
                    const double omega = std::exp(std::log(1e3) + (std::log(1e7) - std::log(1e3)) * m / 95.0);
                    const double v = n * (kAdia / std::pow(kappa_hz * t_ss, 2.0) +
                                          kOff * std::pow(omega / delta_g_hz, 2.0) +
                                          kDip * std::pow(kappa_hz / omega, 2.0)) +
                                     t_total / t1;
                    best = std::min(best, v);
                }
            } else {
                // the cell's duration fixes g_eff; optimize over Omega_N
                const double g_eff = std::sqrt(static_cast<double>(n)) / t_total;
                const double sp = band_center_spacing(n, kappa_hz);
                const double fermi = std::pow(
                    g_eff / (2.0 * std::numbers::sqrt2) / std::sqrt(static_cast<double>(n)) / sp,
                    2.0);
                for (int m = 0; m < 96; ++m) {
                    const double omega_n =
                        std::exp(std::log(1e4) + (std::log(1e7) - std::log(1e4)) * m / 95.0);
                    const double omega =
                        g_eff * omega_n / (2.0 * std::numbers::sqrt2 * kappa_hz);
                    const double v =
                        kOff * (omega_n * omega_n + omega * omega) / (delta_g_hz * delta_g_hz) +
                        fermi + std::pow(kappa_hz / omega_n, 2.0) + n * t_total / t1;
                    best = std::min(best, v);
                }
            }
            g.infidelity[static_cast<size_t>(i) * static_cast<size_t>(n_time) +
                         static_cast<size_t>(j)] = best;
        }
    }
    return g;
}

double threshold_margin(const ErrorBudget& budget, double epsilon) {
    return epsilon - budget.total;
}

} // namespace spinbus
