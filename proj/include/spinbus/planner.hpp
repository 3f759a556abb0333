#ifndef SPINBUS_PLANNER_HPP
#define SPINBUS_PLANNER_HPP

// Architecture planning: super-plaquette frequency allocation, saw-tooth /
// zig-zag lattice generation with geometry checks and conversion-yield
// Monte Carlo, and the next-nearest-neighbor refocusing scheduler.

#include <cstdint>
#include <string>
#include <vector>

#include "spinbus/dynamics.hpp"

namespace spinbus {

enum class OffsetsMode { Rounded, Exact };

struct FrequencyLine {
    int row;
    std::string species;   // "nv+", "nv-", "n"
    std::string label;     // offset label
    double frequency_hz;   // signed offset from the row-0 base line
};

struct FrequencyPlan {
    double gradient_per_row_hz;
    int rows;
    std::vector<FrequencyLine> lines;
    double min_spacing_hz;  // exact brute-force minimum over all pairs

    std::string to_csv() const;
};

// Lines per row n: nitrogen at n*G + offsets, NV ladders at +-(3 GHz + n*G)
// (the |0> -> |-1> ladder mirrors, tracking its field dependence).
FrequencyPlan build_frequency_plan(double gradient_per_row_hz, int rows,
                                   OffsetsMode mode = OffsetsMode::Rounded,
                                   const PhysicalConstants& c = {});

struct GradientCandidate {
    double zeta_hz;          // G = 3 * zeta
    double gradient_hz;
    double min_spacing_hz;
    bool admissible;         // exists integer n with n*G = 3 GHz - zeta
    bool collision_flagged;  // min spacing < 1 MHz
};

// Scan zeta over [range] with the given resolution; candidates ranked by
// min spacing, descending.
std::vector<GradientCandidate> search_gradient(std::pair<double, double> zeta_range_hz,
                                               double zeta_step_hz, int rows,
                                               OffsetsMode mode = OffsetsMode::Rounded);

struct LayoutConfig {
    double h_nm = 6.0;
    double w_nm = 19.0;
    double plaquette_x_nm = 525.0;
    double plaquette_y_nm = 650.0;
    double link_min_nm = 19.5;
    double link_max_nm = 20.5;
};

struct LayoutSite {
    double x_nm, y_nm;
    int half_w_units;  // exact lattice coordinates, x = units * w/2
    int h_units;       //                            y = units * h
    char row_label;    // 'A'..'D'
    std::string role;  // "N-impurity" or "NV-candidate"
};

struct LayoutPlan {
    LayoutConfig config;
    std::vector<LayoutSite> horizontal_chain;
    std::vector<LayoutSite> vertical_chain;
    std::vector<double> horizontal_links_nm;
    std::vector<double> vertical_links_nm;
    double diag_ab_nm;     // sqrt(h^2 + w^2)
    double diag_da_nm;     // sqrt((3h)^2 + (w/2)^2)
    bool links_ok;
    std::vector<std::string> violations;
    int impurities_per_horizontal_link;
    int impurities_per_vertical_link;

    std::string to_csv() const;
};

LayoutPlan generate_layout(const LayoutConfig& config = {});

struct YieldReport {
    double p_conversion;
    int sites_per_plaquette;
    long trials;
    double functional_fraction;
    double stderr_mc;
    double closed_form;           // 1 - (1-p)^sites
    double failure_probability;   // (1-p)^sites
    bool nominal_claim_met;       // failure < 1e-2
    std::uint64_t seed;
};

YieldReport yield_monte_carlo(double p_conversion = 0.4, int sites = 8, long trials = 100000,
                              std::uint64_t seed = 1);

struct NNNTermCheck {
    std::string term;       // e.g. "A+C-"
    int sign_first_half;    // toggled sign under the echo
    int sign_second_half;
    bool refocused;         // average is zero
};

struct RefocusPlan {
    EchoSchedule schedule_eff1;   // flips rows 1,2: leaves AB + CD
    EchoSchedule schedule_eff2;   // flips rows 2,3: leaves BC + DA'
    EchoSchedule composed;        // symmetrized Trotter interleaving
    std::vector<NNNTermCheck> nnn_checks;      // every next-nearest saw-tooth term
    std::vector<std::string> surviving_eff1;   // NN terms kept by echo 1
    std::vector<std::string> surviving_eff2;
    double segment_time;
    int trotter_steps;
    // wall duration is composed.total_time = 2 * steps * segment_time; each
    // pair set acts half the time, so the composed sequence approximates the
    // ideal nearest-neighbor evolution for effective_time = half the wall time
    double effective_time;
};

// Echo flips are Z-phase flips on the row sets (driven-frame phase advance);
// `sites_by_row[r]` lists the chain sites in row r+1 (rows 1..4 cycle A..D).
RefocusPlan echo_schedule_nnn(const std::vector<std::vector<int>>& sites_by_row,
                              double segment_time, int trotter_steps);

// Saw-tooth chain sites -> row index (0..3) cycling A,B,C,D along the chain.
std::vector<std::vector<int>> sawtooth_rows(int n_sites);

struct GeometricCoupling {
    int i, j;
    double kappa_hz;
};

// Nearest and next-nearest flip-flop couplings along an n-site saw-tooth
// chain, inverse-cube in the link distances and normalized so the A-B link
// carries kappa_nn_hz.
std::vector<GeometricCoupling> sawtooth_couplings(int n_sites, const LayoutConfig& config = {},
                                                  double kappa_nn_hz = 1.0);

} // namespace spinbus

#endif
