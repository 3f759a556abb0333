#include "spinbus/planner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace spinbus {

namespace {

std::array<double, 4> offsets_for(OffsetsMode mode, const PhysicalConstants& c) {
    return impurity_line_offsets(c, mode == OffsetsMode::Rounded);
}

double brute_force_min_spacing(const std::vector<FrequencyLine>& lines) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lines.size(); ++i)
        for (size_t j = i + 1; j < lines.size(); ++j)
            best = std::min(best, std::abs(lines[i].frequency_hz - lines[j].frequency_hz));
    return best;
}

} // namespace

std::string FrequencyPlan::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "row,species,label,frequency_hz\n";
    for (const auto& l : lines)
        os << l.row << ',' << l.species << ',' << l.label << ',' << l.frequency_hz << '\n';
    return os.str();
}

FrequencyPlan build_frequency_plan(double gradient_per_row_hz, int rows, OffsetsMode mode,
                                   const PhysicalConstants& c) {
    if (rows < 1) throw std::domain_error("build_frequency_plan: rows must be >= 1");
    FrequencyPlan plan;
    plan.gradient_per_row_hz = gradient_per_row_hz;
    plan.rows = rows;
    const auto offs = offsets_for(mode, c);
    const std::array<std::string, 4> labels = {"+par/2", "-par/2", "+gamma/2", "-gamma/2"};
    const double zfs = 3.0e9;
    for (int n = 0; n < rows; ++n) {
        const double base = n * gradient_per_row_hz;
        for (size_t i = 0; i < offs.size(); ++i)
            plan.lines.push_back({n, "n", labels[i], base + offs[i]});
        plan.lines.push_back({n, "nv+", "0->+1", +(zfs + base)});
        plan.lines.push_back({n, "nv-", "0->-1", -(zfs + base)});
    }
    plan.min_spacing_hz = brute_force_min_spacing(plan.lines);
    return plan;
}

std::vector<GradientCandidate> search_gradient(std::pair<double, double> zeta_range_hz,
                                               double zeta_step_hz, int rows, OffsetsMode mode) {
    if (zeta_step_hz <= 0) throw std::domain_error("search_gradient: step must be > 0");
    std::vector<GradientCandidate> out;
    const double zfs = 3.0e9;
    for (double z = zeta_range_hz.first; z <= zeta_range_hz.second + 0.5 * zeta_step_hz;
         z += zeta_step_hz) {
        GradientCandidate cand{};
        cand.zeta_hz = z;
        cand.gradient_hz = 3.0 * z;
        const auto plan = build_frequency_plan(cand.gradient_hz, rows, mode);
        cand.min_spacing_hz = plan.min_spacing_hz;
        cand.admissible = false;
        if (cand.gradient_hz > 0) {
            const double n_exact = (zfs - z) / cand.gradient_hz;
            cand.admissible = std::abs(n_exact - std::round(n_exact)) < 1e-9;
        }
        cand.collision_flagged = cand.min_spacing_hz < 1e6;
        out.push_back(cand);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.min_spacing_hz > b.min_spacing_hz;
    });
    return out;
}

std::string LayoutPlan::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "chain,index,row_label,x_nm,y_nm,role\n";
    for (size_t i = 0; i < horizontal_chain.size(); ++i) {
        const auto& s = horizontal_chain[i];
        os << "horizontal," << i << ',' << s.row_label << ',' << s.x_nm << ',' << s.y_nm << ','
           << s.role << '\n';
    }
    for (size_t i = 0; i < vertical_chain.size(); ++i) {
        const auto& s = vertical_chain[i];
        os << "vertical," << i << ',' << s.row_label << ',' << s.x_nm << ',' << s.y_nm << ','
           << s.role << '\n';
    }
    return os.str();
}

LayoutPlan generate_layout(const LayoutConfig& config) {
    if (config.h_nm <= 0 || config.w_nm <= 0)
        throw std::domain_error("generate_layout: pitches must be positive");
    // cap the site count against degenerate pitches
    if (config.plaquette_x_nm / config.w_nm > 5000 || config.plaquette_y_nm / config.h_nm > 5000)
        throw std::domain_error("generate_layout: pitches too small for the plaquette span");
    LayoutPlan plan;
    plan.config = config;
    const double hw = config.w_nm / 2.0;

    // horizontal saw-tooth: steps (w,h),(w,h),(w,h),(w/2,-3h), rows A,B,C,D
    {
        int x_units = 0, y_units = 0;
        const char* labels = "ABCD";
        int i = 0;
        while (x_units * hw <= config.plaquette_x_nm) {
            LayoutSite s;
            s.half_w_units = x_units;
            s.h_units = y_units;
            s.x_nm = x_units * hw;
            s.y_nm = y_units * config.h_nm;
            s.row_label = labels[i % 4];
            s.role = "N-impurity";
            plan.horizontal_chain.push_back(s);
            if (i % 4 == 3) {
                x_units += 1;  // w/2
                y_units -= 3;
            } else {
                x_units += 2;  // w
                y_units += 1;
            }
            ++i;
        }
    }
    // vertical zig-zag: steps (+-w/2, 3h)
    {
        int x_units = 0, y_units = 0;
        int i = 0;
        while (y_units * config.h_nm <= config.plaquette_y_nm) {
            LayoutSite s;
            s.half_w_units = x_units;
            s.h_units = y_units;
            s.x_nm = x_units * hw;
            s.y_nm = y_units * config.h_nm;
            s.row_label = static_cast<char>('A' + (i % 4));
            s.role = "N-impurity";
            plan.vertical_chain.push_back(s);
            x_units += (i % 2 == 0) ? 1 : -1;
            y_units += 3;
            ++i;
        }
    }

    auto link = [&](const LayoutSite& a, const LayoutSite& b) {
        const double dx = (b.half_w_units - a.half_w_units) * hw;
        const double dy = (b.h_units - a.h_units) * config.h_nm;
        return std::hypot(dx, dy);
    };
    for (size_t i = 0; i + 1 < plan.horizontal_chain.size(); ++i)
        plan.horizontal_links_nm.push_back(
            link(plan.horizontal_chain[i], plan.horizontal_chain[i + 1]));
    for (size_t i = 0; i + 1 < plan.vertical_chain.size(); ++i)
        plan.vertical_links_nm.push_back(link(plan.vertical_chain[i], plan.vertical_chain[i + 1]));

    plan.diag_ab_nm = std::hypot(config.w_nm, config.h_nm);
    plan.diag_da_nm = std::hypot(config.w_nm / 2.0, 3.0 * config.h_nm);
    plan.links_ok = true;
    auto check = [&](const char* which, const std::vector<double>& ls) {
        for (size_t i = 0; i < ls.size(); ++i) {
            if (ls[i] < config.link_min_nm || ls[i] > config.link_max_nm) {
                plan.links_ok = false;
                std::ostringstream os;
                os << which << " link " << i << " length " << ls[i] << " nm outside ["
                   << config.link_min_nm << ", " << config.link_max_nm << "]";
                plan.violations.push_back(os.str());
            }
        }
    };
    check("horizontal", plan.horizontal_links_nm);
    check("vertical", plan.vertical_links_nm);
    plan.impurities_per_horizontal_link = static_cast<int>(plan.horizontal_chain.size());
    plan.impurities_per_vertical_link = static_cast<int>(plan.vertical_chain.size());
    return plan;
}

YieldReport yield_monte_carlo(double p_conversion, int sites, long trials, std::uint64_t seed) {
    if (trials < 10000) throw std::domain_error("yield_monte_carlo: trials must be >= 1e4");
    if (p_conversion < 0 || p_conversion > 1)
        throw std::domain_error("yield_monte_carlo: p out of [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long ok = 0;
    for (long t = 0; t < trials; ++t) {
        bool any = false;
        for (int s = 0; s < sites; ++s)
            if (u(rng) < p_conversion) any = true;
        if (any) ++ok;
    }
    YieldReport r{};
    r.p_conversion = p_conversion;
    r.sites_per_plaquette = sites;
    r.trials = trials;
    r.functional_fraction = static_cast<double>(ok) / static_cast<double>(trials);
    r.stderr_mc = std::sqrt(r.functional_fraction * (1.0 - r.functional_fraction) /
                            static_cast<double>(trials));
    r.failure_probability = std::pow(1.0 - p_conversion, sites);
    r.closed_form = 1.0 - r.failure_probability;
    r.nominal_claim_met = r.failure_probability < 1e-2;
    r.seed = seed;
    return r;
}

std::vector<GeometricCoupling> sawtooth_couplings(int n_sites, const LayoutConfig& config,
                                                  double kappa_nn_hz) {
    std::vector<double> xs, ys;
    double x = 0, y = 0;
    for (int i = 0; i < n_sites; ++i) {
        xs.push_back(x);
        ys.push_back(y);
        if (i % 4 == 3) {
            x += config.w_nm / 2;
            y -= 3 * config.h_nm;
        } else {
            x += config.w_nm;
            y += config.h_nm;
        }
    }
    const double d0 = std::hypot(config.w_nm, config.h_nm);
    std::vector<GeometricCoupling> out;
    for (int i = 0; i < n_sites; ++i)
        for (int j = i + 1; j < n_sites && j <= i + 2; ++j) {
            const double d = std::hypot(xs[static_cast<size_t>(j)] - xs[static_cast<size_t>(i)],
                                        ys[static_cast<size_t>(j)] - ys[static_cast<size_t>(i)]);
            out.push_back({i, j, kappa_nn_hz * std::pow(d0 / d, 3.0)});
        }
    return out;
}

std::vector<std::vector<int>> sawtooth_rows(int n_sites) {
    std::vector<std::vector<int>> rows(4);
    for (int i = 0; i < n_sites; ++i) rows[static_cast<size_t>(i % 4)].push_back(i);
    return rows;
}

namespace {

// symmetric echo segment for one effective Hamiltonian: quarter, flip, half,
// flip, quarter (Z flips on the given sites)
void append_echo_segment(EchoSchedule& sched, double t0, double tau,
                         const std::vector<int>& flip_sites) {
    sched.events.push_back({t0 + 0.25 * tau, flip_sites, FlipAxis::Z});
    sched.events.push_back({t0 + 0.75 * tau, flip_sites, FlipAxis::Z});
}

std::vector<int> rows_union(const std::vector<std::vector<int>>& by_row, int r1, int r2) {
    std::vector<int> s = by_row[static_cast<size_t>(r1)];
    s.insert(s.end(), by_row[static_cast<size_t>(r2)].begin(), by_row[static_cast<size_t>(r2)].end());
    std::sort(s.begin(), s.end());
    return s;
}

} // namespace

RefocusPlan echo_schedule_nnn(const std::vector<std::vector<int>>& sites_by_row,
                              double segment_time, int trotter_steps) {
    if (sites_by_row.size() != 4)
        throw std::invalid_argument("echo_schedule_nnn: expected 4 rows");
    if (segment_time <= 0 || trotter_steps < 1)
        throw std::invalid_argument("echo_schedule_nnn: bad segment_time/steps");
    RefocusPlan plan;
    plan.segment_time = segment_time;
    plan.trotter_steps = trotter_steps;
    const auto flips1 = rows_union(sites_by_row, 0, 1);  // rows 1,2
    const auto flips2 = rows_union(sites_by_row, 1, 2);  // rows 2,3

    plan.schedule_eff1.total_time = segment_time;
    append_echo_segment(plan.schedule_eff1, 0.0, segment_time, flips1);
    plan.schedule_eff2.total_time = segment_time;
    append_echo_segment(plan.schedule_eff2, 0.0, segment_time, flips2);

    // Strang interleaving: [eff1 tau/2][eff2 tau][eff1 tau/2] per step
    plan.composed.total_time = 2.0 * segment_time * trotter_steps;
    plan.effective_time = segment_time * trotter_steps;
    double t = 0.0;
    for (int s = 0; s < trotter_steps; ++s) {
        append_echo_segment(plan.composed, t, 0.5 * segment_time, flips1);
        t += 0.5 * segment_time;
        append_echo_segment(plan.composed, t, segment_time, flips2);
        t += segment_time;
        append_echo_segment(plan.composed, t, 0.5 * segment_time, flips1);
        t += 0.5 * segment_time;
    }
    std::sort(plan.composed.events.begin(), plan.composed.events.end(),
              [](const EchoEvent& a, const EchoEvent& b) { return a.time < b.time; });

    // symbolic sign bookkeeping: rows of the endpoints decide the toggled sign
    struct Term {
        const char* name;
        int row_a, row_b;  // 1-based
        bool nnn;
    };
    const std::vector<Term> terms = {
        {"A+B-", 1, 2, false}, {"B+C-", 2, 3, false}, {"C+D-", 3, 4, false},
        {"D+A'-", 4, 1, false},
        {"A+C-", 1, 3, true},  {"B+D-", 2, 4, true},  {"C+A'-", 3, 1, true},
        {"D+B'-", 4, 2, true}};
    auto toggled = [](const Term& t, int fr1, int fr2) {
        const bool a = (t.row_a == fr1 || t.row_a == fr2);
        const bool b = (t.row_b == fr1 || t.row_b == fr2);
        return (a != b) ? -1 : +1;  // exactly one endpoint flipped -> sign reversal
    };
    for (const auto& t : terms) {
        if (!t.nnn) {
            if (toggled(t, 1, 2) == +1) plan.surviving_eff1.push_back(t.name);
            if (toggled(t, 2, 3) == +1) plan.surviving_eff2.push_back(t.name);
        } else {
            for (auto [f1, f2] : {std::pair{1, 2}, std::pair{2, 3}}) {
                NNNTermCheck c;
                c.term = std::string(t.name) + (f1 == 1 ? " (echo rows 1,2)" : " (echo rows 2,3)");
                c.sign_first_half = +1;
                c.sign_second_half = toggled(t, f1, f2);
                c.refocused = (c.sign_first_half + c.sign_second_half == 0);
                plan.nnn_checks.push_back(c);
            }
        }
    }
    return plan;
}

} // namespace spinbus
