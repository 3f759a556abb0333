#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spinbus/dynamics.hpp"

using namespace spinbus;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("stationary state acquires only a phase") {
    auto m = build_ising_pair(3.0, 7.0, 0.2, -0.4);
    auto psi0 = StateVector::basis_state(m.layout, 2);
    auto psi = evolve_dense(m, psi0, 0.37);
    CHECK(std::abs(std::abs(psi.amplitudes(2)) - 1.0) < 1e-12);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("resonant two-site flip-flop follows the Rabi closed form") {
    // analytic oracle: population transfer cos^2(2 pi kappa t) -> full at t = 1/(4 kappa)
    const double kappa = 2.7e3;
    auto m = build_driven_chain(ChainSpec::uniform(2, kappa));
    const long in = m.layout.index_of({0, 1});
    const long out = m.layout.index_of({1, 0});
    auto psi0 = StateVector::basis_state(m.layout, in);
    for (double frac : {0.25, 0.5, 1.0, 1.7}) {
        const double t = frac / (4.0 * kappa);
        auto psi = evolve_dense(m, psi0, t);
        const double expect = std::pow(std::sin(kTwoPi * kappa * t), 2);
        CHECK(std::norm(psi.amplitudes(out)) == doctest::Approx(expect).epsilon(1e-9));
    }
    // full transfer at t = 1/(4 kappa)
    auto psi = evolve_dense(m, psi0, 1.0 / (4 * kappa));
    CHECK(std::norm(psi.amplitudes(out)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("driven evolution stepper converges and preserves norm") {
    // two-level Rabi pulse with a shaped envelope against a fine-dt reference
    HamiltonianModel m;
    m.layout = HilbertLayout::spin_half_chain(1);
    m.static_part = MatrixXc::Zero(2, 2);
    const double om = 1.0e4;
    m.drive_parts.push_back(
        {2.0 * spin_half_sx(),
         [om](double t) { return om * std::sin(kTwoPi * 2e3 * t) * std::sin(kTwoPi * 2e3 * t); },
         om});
    auto psi0 = StateVector::basis_state(m.layout, 0);
    EvolveOptions fine;
    fine.dt = 1e-7;
    auto ref = evolve_dense(m, psi0, 2.0e-4, fine);
    EvolveOptions a, b;
    a.dt = 4e-6;
    b.dt = 2e-6;
    auto pa = evolve_dense(m, psi0, 2.0e-4, a);
    auto pb = evolve_dense(m, psi0, 2.0e-4, b);
    const double ea = (pa.amplitudes - ref.amplitudes).norm();
    const double eb = (pb.amplitudes - ref.amplitudes).norm();
    CHECK(pa.norm() == doctest::Approx(1.0).epsilon(1e-9));
    // second-order stepping: halving dt cuts the error ~4x
    CHECK(ea / eb > 3.0);
    CHECK(ea / eb < 5.5);
}

TEST_CASE("quadratic propagation") {
    SUBCASE("t=0 is the identity") {
        auto m = build_driven_chain(ChainSpec::uniform(5, 1.0), HamiltonianForm::Quadratic);
        auto q = evolve_quadratic(m, 0.0);
        CHECK((q.propagator - MatrixXc::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("bare chain propagator phases follow E_k") {
        const int n = 6;
        auto m = build_driven_chain(ChainSpec::uniform(n, 1.0), HamiltonianForm::Quadratic);
        const double t = 0.37;
        auto q = evolve_quadratic(m, t);
        // project onto mode k and compare the phase
        for (int k = 1; k <= n; ++k) {
            VectorXc mode(n);
            for (int i = 1; i <= n; ++i) mode(i - 1) = chain_mode_amplitude(n, k, i);
            const Complex phase = (mode.adjoint() * q.propagator * mode)(0);
            const Complex expect = std::polar(1.0, -kTwoPi * chain_mode_energy(n, k, 1.0) * t);
            CHECK(std::abs(phase - expect) < 1e-10);
        }
    }
    SUBCASE("N=50 runs without dense construction") {
        auto m = build_driven_chain(ChainSpec::uniform(50, 1.0), HamiltonianForm::Quadratic);
        auto q = evolve_quadratic(m, 1.0);
        CHECK(q.unitarity_defect() < 1e-9);
    }
    SUBCASE("dense and quadratic single-excitation amplitudes agree to 1e-8") {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(0.5, 1.5);
        for (int trial = 0; trial < 5; ++trial) {
            const int n = 3 + static_cast<int>(rng() % 5);
            ChainSpec c = ChainSpec::uniform(n, 1.0);
            for (auto& k : c.couplings) k = u(rng);
            for (auto& o : c.on_site) o = u(rng) - 1.0;
            auto md = build_driven_chain(c, HamiltonianForm::Dense);
            auto mq = build_driven_chain(c, HamiltonianForm::Quadratic);
            const double t = 0.9;
            auto q = evolve_quadratic(mq, t);
            const auto ix = single_excitation_indices(md.layout);
            auto psi0 = StateVector::basis_state(md.layout, ix[0]);
            auto psi = evolve_dense(md, psi0, t);
            for (int j = 0; j < n; ++j)
                CHECK(std::abs(psi.amplitudes(ix[static_cast<size_t>(j)]) - q.propagator(j, 0)) <
                      1e-8);
        }
    }
}

TEST_CASE("excitation number is conserved by XX models") {
    auto m = build_driven_chain(ChainSpec::uniform(4, 1.0, 0.3));
    auto psi0 = StateVector::basis_state(m.layout, m.layout.index_of({0, 1, 0, 1}));
    auto psi = evolve_dense(m, psi0, 1.3);
    double sz = 0.0;
    for (long i = 0; i < m.layout.total_dim; ++i) {
        int ups = 0;
        for (int s = 0; s < 4; ++s) ups += (m.layout.digit(i, s) == 0) ? 1 : 0;
        sz += ups * std::norm(psi.amplitudes(i));
    }
    CHECK(sz == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("echo schedules") {
    SUBCASE("empty schedule equals evolve_dense") {
        auto m = build_ising_pair(2.0, 5.0, 0.3, -0.2);
        EchoSchedule sched;
        sched.total_time = 0.83;
        auto psi0 = StateVector::basis_state(m.layout, 1);
        auto a = apply_echo_schedule(m, sched, psi0);
        auto b = evolve_dense(m, psi0, 0.83);
        CHECK((a.amplitudes - b.amplitudes).norm() < 1e-12);
    }
    SUBCASE("double flip at the same instant is the identity") {
        auto m = build_ising_pair(2.0, 5.0, 0.3, -0.2);
        EchoSchedule sched;
        sched.total_time = 0.0;
        sched.events.push_back({0.0, {0}, FlipAxis::X});
        sched.events.push_back({0.0, {0}, FlipAxis::X});
        const auto u = echo_propagator(m, sched);
        CHECK((u - MatrixXc::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("single X flip at t/2 refocuses the Ising pair") {
        // 4-dim dense oracle: expect X_1 (x) exp(-2 pi i omega_2 Sz_2 t)
        const double kappa = 2.0, w1 = 5.0, w2 = 3.0, t = 0.71;
        auto m = build_ising_pair(kappa, 0.0, w1, w2);
        EchoSchedule sched;
        sched.total_time = t;
        sched.events.push_back({t / 2, {0}, FlipAxis::X});
        const auto u = echo_propagator(m, sched);
        auto l = m.layout;
        MatrixXc expect = embed(l, 0, pauli_x());
        HamiltonianModel free;
        free.layout = l;
        free.static_part = w2 * embed(l, 1, spin_half_sz());
        expect = expect * propagator_dense(free, t);
        CHECK((u - expect).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("schedule with its time-reverse composes to identity") {
        auto m = build_driven_chain(ChainSpec::uniform(6, 1.0, 0.2));
        EchoSchedule fwd;
        fwd.total_time = 0.4;
        fwd.events.push_back({0.1, {0, 2}, FlipAxis::Z});
        fwd.events.push_back({0.3, {0, 2}, FlipAxis::Z});
        const auto u = echo_propagator(m, fwd);
        // the echo closes (two identical Z flips), so u composed with the
        // reversed-Hamiltonian evolution must be the identity
        HamiltonianModel rev = m;
        rev.static_part = -m.static_part;
        EchoSchedule back;
        back.total_time = 0.4;
        back.events.push_back({0.1, {0, 2}, FlipAxis::Z});
        back.events.push_back({0.3, {0, 2}, FlipAxis::Z});
        const auto v = echo_propagator(rev, back);
        const MatrixXc prod = v * u;
        CHECK((prod - MatrixXc::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("out-of-range event times rejected") {
        auto m = build_ising_pair(1.0, 1.0, 0.0, 0.0);
        EchoSchedule bad;
        bad.total_time = 1.0;
        bad.events.push_back({2.0, {0}, FlipAxis::X});
        auto psi0 = StateVector::basis_state(m.layout, 0);
        CHECK_THROWS(apply_echo_schedule(m, bad, psi0));
    }
}

TEST_CASE("process fidelity conventions") {
    const long d = 4;
    MatrixXc u = MatrixXc::Identity(d, d);
    CHECK(process_fidelity(u, u) == doctest::Approx(1.0));
    CHECK(process_fidelity(std::polar(1.0, 1.234) * u, u) == doctest::Approx(1.0));
    MatrixXc x = MatrixXc::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    CHECK(process_fidelity(x, MatrixXc::Identity(2, 2)) == doctest::Approx(0.0));
    CHECK_THROWS(process_fidelity(x, u));
    // subspace restriction
    MatrixXc big = MatrixXc::Identity(d, d);
    big(3, 3) = -1.0;
    CHECK(process_fidelity(big, MatrixXc::Identity(d, d), {0, 1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("unpolarized transfer fidelity basics") {
    SUBCASE("identity protocol is a perfect round trip") {
        const int n = 3;
        const long d = 1L << (n + 2);
        CHECK(transfer_fidelity_unpolarized(MatrixXc::Identity(d, d), n,
                                            TransferTarget::RoundTrip) == doctest::Approx(1.0));
    }
    SUBCASE("polarized chain is the all-down special case") {
        // a protocol that swaps the end sites perfectly: permutation built by hand
        const int n = 2;
        auto l = HilbertLayout::spin_half_chain(n + 2);
        MatrixXc u = MatrixXc::Zero(l.total_dim, l.total_dim);
        for (long b = 0; b < l.total_dim; ++b) {
            std::vector<int> digs;
            for (int s = 0; s < n + 2; ++s) digs.push_back(l.digit(b, s));
            std::swap(digs[0], digs[static_cast<size_t>(n + 1)]);
            u(l.index_of(digs), b) = 1.0;
        }
        CHECK(transfer_fidelity_unpolarized(u, n, TransferTarget::ToFar) == doctest::Approx(1.0));
    }
}

TEST_CASE("unpolarized averaging samples beyond 8 chain sites") {
    const int n = 9;  // sampling path, >= 256 seeded states
    const long d = 1L << (n + 2);
    const double f = transfer_fidelity_unpolarized(MatrixXc::Identity(d, d), n,
                                                   TransferTarget::RoundTrip, 12345, 256);
    CHECK(f == doctest::Approx(1.0));
}

TEST_CASE("overlong dt rejected by the precondition") {
    HamiltonianModel m;
    m.layout = HilbertLayout::spin_half_chain(1);
    m.static_part = MatrixXc::Zero(2, 2);
    m.drive_parts.push_back({2.0 * spin_half_sx(), [](double) { return 1e4; }, 1e4});
    auto psi0 = StateVector::basis_state(m.layout, 0);
    EvolveOptions coarse;
    coarse.dt = 1.0;  // far above 0.1/f_max
    CHECK_THROWS_AS(evolve_dense(m, psi0, 1e-3, coarse), std::domain_error);
}

TEST_CASE("norm drift raises an integration failure") {
    HamiltonianModel m;
    m.layout = HilbertLayout::spin_half_chain(1);
    m.static_part = MatrixXc::Zero(2, 2);
    m.drive_parts.push_back({spin_half_sx(), [](double) { return 1.0; }, 1.0});
    StateVector bad;
    bad.layout = m.layout;
    bad.amplitudes = VectorXc::Zero(2);
    // a non-normalized state cannot drift; instead check the tolerance wiring
    // by injecting an absurd tolerance
    auto psi0 = StateVector::basis_state(m.layout, 0);
    EvolveOptions opts;
    opts.norm_tolerance = -1.0;  // impossible to satisfy
    CHECK_THROWS(evolve_dense(m, psi0, 1.0, opts));
}

TEST_CASE("trajectory csv emits t and site populations") {
    auto m = build_driven_chain(ChainSpec::uniform(2, 1.0));
    auto psi0 = StateVector::basis_state(m.layout, m.layout.index_of({0, 1}));
    const auto csv = trajectory_csv(m, psi0, 0.25, 4);
    CHECK(csv.find("t,p_site0,p_site1") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
