#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spinbus/budget.hpp"
#include "spinbus/protocols.hpp"

using namespace spinbus;

TEST_CASE("register gate truth tables are exact permutations") {
    SystemSpec spec;
    const auto cen = *gate_ce_not_n(spec).unitary;
    // basis order (e,n): 0up, 0dn, 1up, 1dn
    CHECK(std::abs(cen(3, 2) - 1.0) < 1e-12);  // |1 up> -> |1 dn>
    CHECK(std::abs(cen(2, 3) - 1.0) < 1e-12);  // |1 dn> -> |1 up>
    CHECK(std::abs(cen(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(cen(1, 1) - 1.0) < 1e-12);

    const auto cne = *gate_cn_not_e(spec).unitary;
    // flips e iff n = down
    MatrixXc expect = MatrixXc::Zero(4, 4);
    expect(0, 0) = expect(2, 2) = 1.0;  // n=up untouched
    expect(3, 1) = expect(1, 3) = 1.0;  // n=dn: 0dn <-> 1dn
    CHECK((cne - expect).cwiseAbs().maxCoeff() < 1e-10);

    const auto swp = *gate_register_swap(spec).unitary;
    // SWAP with the nuclear qubit mapping |1>_q = |down>: |1 up> <-> |0 dn>
    MatrixXc sexp = MatrixXc::Zero(4, 4);
    sexp(0, 0) = sexp(3, 3) = 1.0;
    sexp(1, 2) = sexp(2, 1) = 1.0;
    CHECK((swp - sexp).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("CP wait time is 1/(2A)") {
    SystemSpec spec;
    const auto cne = gate_cn_not_e(spec);
    CHECK(cne.duration == doctest::Approx(1.0 / (2 * 3.0e6)));
    CHECK(cne.duration == doctest::Approx(166.7e-9).epsilon(1e-3));
}

TEST_CASE("finite-Rabi mode reports off-resonant infidelity") {
    SystemSpec spec;
    const auto ideal = gate_ce_not_n(spec);
    const auto finite = gate_ce_not_n(spec, 1e6);
    CHECK(ideal.fidelity == 1.0);
    CHECK(finite.fidelity < 1.0);
    CHECK(finite.fidelity > 0.8);
    // weaker drive -> less off-resonant excitation
    CHECK(gate_ce_not_n(spec, 1e5).fidelity > finite.fidelity);
}

TEST_CASE("ramp profile shape properties") {
    const double kappa = 1.0;
    const auto r = optimal_ramp(kappa, 10.0, 50.0);
    SUBCASE("curves continuous, cross exactly once at the midpoint") {
        CHECK(r.difference(0.0) == doctest::Approx(-50.0));
        CHECK(r.difference(10.0) == doctest::Approx(+50.0));
        CHECK(r.difference(5.0) == doctest::Approx(0.0).epsilon(1e-12));
        int crossings = 0;
        double prev = r.difference(0.0);
        for (int i = 1; i <= 1000; ++i) {
            const double x = r.difference(10.0 * i / 1000.0);
            if (prev < 0 && x >= 0) ++crossings;
            prev = x;
        }
        CHECK(crossings == 1);
        const auto [o1, o2] = r.omegas(3.3);
        CHECK(o1 > 0);
        CHECK(o2 > 0);
    }
    SUBCASE("midpoint has the slowest sweep rate") {
        auto rate = [&](double t) {
            return std::abs(r.difference(t + 1e-4) - r.difference(t - 1e-4)) / 2e-4;
        };
        const double mid = rate(5.0);
        CHECK(mid < rate(1.0));
        CHECK(mid < rate(9.0));
        CHECK(mid < rate(2.5));
    }
    CHECK_THROWS_AS(optimal_ramp(1.0, -1.0, 50.0), std::domain_error);
    CHECK_THROWS_AS(optimal_ramp(1.0, 1.0, 0.5), std::domain_error);
}

TEST_CASE("ramp shape alternatives behave sanely") {
    const auto la = optimal_ramp(1.0, 10.0, 50.0, RampShape::LocalAdiabatic);
    const auto ln = optimal_ramp(1.0, 10.0, 50.0, RampShape::Linear);
    const auto th = optimal_ramp(1.0, 10.0, 50.0, RampShape::Tanh);
    for (const auto* r : {&la, &ln, &th}) {
        CHECK(r->difference(0.0) == doctest::Approx(-50.0));
        CHECK(r->difference(10.0) == doctest::Approx(+50.0));
        CHECK(std::abs(r->difference(5.0)) < 1e-9);
    }
    // linear sweeps at constant rate; the local-adiabatic one is slower at the crossing
    const double mid_la = std::abs(la.difference(5.05) - la.difference(4.95));
    const double mid_ln = std::abs(ln.difference(5.05) - ln.difference(4.95));
    CHECK(mid_la < mid_ln);
}

TEST_CASE("adiabatic pair swap") {
    const double kappa = 1.0;
    SUBCASE("slow ramp approaches perfect transfer; kt=20 error bounded by 3/(kt)^2") {
        const auto ramp = optimal_ramp(kappa, 20.0, 50.0);
        const auto res = adiabatic_pair_swap(kappa, ramp);
        const double err = 1.0 - res.fidelity_avg;
        CHECK(err <= 3.0 * 2.5e-3);  // <= 3x the 1/(kt)^2 scaling form
        CHECK(err >= 1e-5);          // dominated by the ramp endpoint floor
        CHECK(res.report.fidelity > 0.99);
    }
    SUBCASE("quadratic adiabatic law (averaged branch error, slope -2 +- 0.3)") {
        std::vector<double> kts = {5.0, 8.41, 14.14, 23.78, 40.0};
        std::vector<double> lx, ly;
        for (double kt : kts) {
            double acc = 0.0;
            const int pts = 12;
            for (int j = 0; j < pts; ++j) {
                const double t = kt * (0.9 + 0.2 * j / (pts - 1));
                acc += adiabatic_branch_fidelity(kappa, optimal_ramp(kappa, t, 50.0));
            }
            lx.push_back(std::log(kt));
            ly.push_back(std::log(1.0 - acc / pts));
        }
        // monotone decrease within the 1e-9 noise floor
        for (size_t i = 0; i + 1 < ly.size(); ++i)
            CHECK(std::exp(ly[i + 1]) <= std::exp(ly[i]) + 1e-9);
        // least-squares slope
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(lx.size());
        for (int i = 0; i < n; ++i) {
            sx += lx[static_cast<size_t>(i)];
            sy += ly[static_cast<size_t>(i)];
            sxx += lx[static_cast<size_t>(i)] * lx[static_cast<size_t>(i)];
            sxy += lx[static_cast<size_t>(i)] * ly[static_cast<size_t>(i)];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope == doctest::Approx(-2.0).epsilon(0.15));
    }
    SUBCASE("spectator at 10 kappa detuning leaks below (1/10)^2 x O(1)") {
        const auto ramp = optimal_ramp(kappa, 20.0, 50.0);
        const auto res = adiabatic_pair_swap(kappa, ramp, 10.0 * kappa, 4);
        CHECK(res.spectator_leakage < 5e-2);
    }
}

TEST_CASE("sequential swap") {
    const double kappa = 1.0;
    SUBCASE("N=3 dense transfer above 0.999 with a generous ramp") {
        const auto ramp = optimal_ramp(kappa, 30.0, 150.0);
        const auto rep = sequential_swap(ChainSpec::uniform(3, kappa), ramp);
        CHECK(rep.fidelity > 0.999);
        CHECK(rep.duration == doctest::Approx(2 * 30.0));
    }
    SUBCASE("pairwise bookkeeping: duration is exactly n_swaps * t_ss") {
        const auto ramp = optimal_ramp(kappa, 10.0, 50.0);
        const auto rep =
            sequential_swap(ChainSpec::uniform(19, kappa), ramp, SequentialMode::Pairwise);
        CHECK(rep.duration == 18 * 10.0);
        CHECK(rep.parameters.at("n_swaps") == 18);
    }
}

TEST_CASE("18 swaps at the budget-optimal pair time total about 3 ms") {
    const auto o = optimize_ss(18, 8.7e3, 1e7, 0.25);
    const auto ramp = optimal_ramp(8.7e3, o.t_ss_s, 50.0 * 8.7e3);
    const auto rep = sequential_swap(ChainSpec::uniform(19, 8.7e3), ramp, SequentialMode::Pairwise);
    CHECK(rep.duration == doctest::Approx(3e-3).epsilon(0.5));
    CHECK(rep.fidelity > 0.9);
}

TEST_CASE("ffst tuning") {
    const double kappa = 12.6e3;
    SUBCASE("odd N band center: Delta = Omega_N exactly") {
        const auto t = ffst_tune(7, kappa, 4, 100.0, 2e5);
        CHECK(t.delta == doctest::Approx(2e5));
        CHECK(t.resonance_defect < 1e-9);
    }
    SUBCASE("N=7 k=3 mode energy") {
        const auto t = ffst_tune(7, kappa, 3, 100.0);
        CHECK(t.delta == doctest::Approx(9.64e3).epsilon(1e-3));
    }
    SUBCASE("fastest mode selection") {
        CHECK(ffst_fastest_mode(7) == 4);
        CHECK(ffst_fastest_mode(4) == 2);
        // returned mode maximizes the end amplitude
        for (int n : {4, 5, 6, 7}) {
            const int k = ffst_fastest_mode(n);
            const double amp = std::abs(chain_mode_amplitude(n, k, 1));
            for (int kk = 1; kk <= n; ++kk)
                CHECK(std::abs(chain_mode_amplitude(n, kk, 1)) <= amp + 1e-12);
        }
    }
    SUBCASE("selectivity guard") {
        CHECK_THROWS_AS(ffst_tune(7, kappa, 4, 0.9 * kappa), std::domain_error);
    }
}

TEST_CASE("ffst transfer") {
    const double kappa = 1.0;
    SUBCASE("tuned even-N transfer reaches 0.99; band-center tuning fails (no mode there)") {
        const auto tuned = ffst_tune(4, kappa, 2, 0.05 * kappa);
        const auto rep = ffst_transfer(tuned, 0.0, TransferTarget::RoundTrip);
        CHECK(rep.fidelity >= 0.99);
        // a fake tuning at E=0 (even N has no mode there) moves no population
        FFSTTuning untuned = tuned;
        untuned.delta = 0.0;
        const auto rep2 = ffst_transfer(untuned, rep.duration, TransferTarget::ToFar);
        const auto rep_tuned = ffst_transfer(tuned, 0.0, TransferTarget::ToFar);
        // single-pass unpolarized fidelity saturates near 1/2 (chain CP phases)
        CHECK(rep_tuned.fidelity > 0.45);
        CHECK(rep2.fidelity < rep_tuned.fidelity);
    }
    SUBCASE("transfer time scales as sqrt(N)/g") {
        const double g = 0.05;
        std::vector<double> ts;
        for (int n : {4, 8}) {
            const auto t = ffst_tune(n, kappa, ffst_fastest_mode(n), g);
            ts.push_back(ffst_transfer(t, 0.0).duration);
        }
        // doubling N should scale the duration by ~sqrt(2) (mode amplitudes included)
        CHECK(ts[1] / ts[0] == doctest::Approx(std::sqrt(2.0)).epsilon(0.25));
    }
    SUBCASE("resonance selectivity: half-spacing detune suppresses transfer 10x") {
        const auto tuned = ffst_tune(4, kappa, 2, 0.05 * kappa);
        auto m = [&](const FFSTTuning& t) {
            ChainSpec c = ChainSpec::uniform(t.n, t.kappa);
            c.g_left = c.g_right = t.g_left;
            return build_ffst_hamiltonian(c, t.delta, t.delta, HamiltonianForm::Quadratic);
        };
        const double t_half = ffst_transfer(tuned, 0.0).duration;
        auto p_of = [&](const FFSTTuning& t) {
            auto q = evolve_quadratic(m(t), t_half);
            return std::norm(q.propagator(t.n + 1, 0));
        };
        FFSTTuning detuned = tuned;
        detuned.delta += 0.5 * tuned.mode_margin;
        CHECK(p_of(tuned) / p_of(detuned) >= 10.0);
    }
}

TEST_CASE("remote gate circuit") {
    const double kappa = 1.0;
    const auto tuning = ffst_tune(4, kappa, 2, 0.05 * kappa);
    SUBCASE("ideal components: disentangling and a clean controlled-phase gate") {
        const auto res = remote_gate_circuit(tuning, TransferKind::Ideal);
        CHECK(res.chain_dependence < 1e-6);
        CHECK(res.report.fidelity > 0.999);
    }
    SUBCASE("non-commuting middle gate breaks the disentangling (negative control)") {
        const auto res = remote_gate_circuit(tuning, TransferKind::Ideal, MiddleGate::NonCommuting);
        CHECK(res.chain_dependence > 1e-3);
    }
    SUBCASE("simulated transfers stay close at weak coupling") {
        const auto res = remote_gate_circuit(tuning, TransferKind::Simulated);
        CHECK(res.report.fidelity > 0.95);
    }
}

TEST_CASE("nuclear-to-dressed mapping") {
    const double delta = 200.0, omega_f = 40.0;
    SUBCASE("alpha=1 basis case maps to |-> up") {
        const auto rep = map_nuclear_to_dressed(1.0, 0.0, 20.0, omega_f, delta);
        CHECK(rep.fidelity > 0.999);
    }
    SUBCASE("balanced superposition with a slow ramp") {
        const auto rep =
            map_nuclear_to_dressed(1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 20.0, omega_f, delta);
        CHECK(rep.fidelity > 0.999);
    }
    SUBCASE("diabatic turn-on degrades the mapping (negative control)") {
        const auto slow =
            map_nuclear_to_dressed(1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 20.0, omega_f, delta);
        const auto fast =
            map_nuclear_to_dressed(1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1e-4, omega_f, delta);
        CHECK(fast.fidelity < slow.fidelity - 1e-3);
    }
}

TEST_CASE("directionality margin") {
    const double kappa = 12.6e3;
    SUBCASE("separation formula") {
        const auto rep = directionality_margin(4, 6, kappa, 100.0);
        CHECK(rep.separation_hz == doctest::Approx(kappa * 2.0 / 24.0));
        CHECK(rep.separation_hz == doctest::Approx(1.05e3).epsilon(1e-2));
        CHECK(!rep.no_margin);
    }
    SUBCASE("leakage at g = separation/10 stays perturbative") {
        const auto rep = directionality_margin(4, 6, kappa, kappa * 2.0 / 240.0);
        CHECK(rep.leakage < 0.1);
    }
    SUBCASE("equal lengths flagged") {
        const auto rep = directionality_margin(5, 5, kappa, 100.0);
        CHECK(rep.no_margin);
        CHECK(rep.separation_hz == 0.0);
    }
}

TEST_CASE("disorder compensation") {
    const int n = 5;
    std::mt19937_64 rng(7);  // draw with a visibly asymmetric E=0 mode
    ChainSpec c = ChainSpec::uniform(n, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& k : c.couplings) k *= 1.0 + 0.2 * u(rng);
    SUBCASE("odd-N disordered chain keeps an exact E=0 mode") {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i)
            h(i, i + 1) = h(i + 1, i) = c.couplings[static_cast<size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        double emin = 1e9;
        for (int i = 0; i < n; ++i) emin = std::min(emin, std::abs(es.eigenvalues()(i)));
        CHECK(emin < 1e-12);
    }
    SUBCASE("compensation recovers the transfer") {
        const auto res = disorder_compensation(c, 0.05);
        CHECK(res.fidelity_compensated >= 0.98);
        // this draw leaves a visibly degraded uncompensated baseline
        CHECK(res.fidelity_uncompensated < 0.95);
        CHECK(res.fidelity_compensated > res.fidelity_uncompensated);
        // no disorder: g_left = g_right
        const auto clean = disorder_compensation(ChainSpec::uniform(n, 1.0), 0.05);
        CHECK(clean.g_left == doctest::Approx(clean.g_right));
    }
}

TEST_CASE("gate report serializes to json") {
    SystemSpec spec;
    const auto rep = gate_cn_not_e(spec);
    const auto j = rep.to_json();
    CHECK(j.find("\"protocol\":\"cn_not_e\"") != std::string::npos);
    CHECK(j.find("\"fidelity\"") != std::string::npos);
    CHECK(j.find("\"duration\"") != std::string::npos);
}
