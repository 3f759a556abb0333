#include "spinbus/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace spinbus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

MatrixXc spectral_exp(const MatrixXc& h, double t) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
    const auto& w = es.eigenvalues();
    const auto& v = es.eigenvectors();
    VectorXc phase(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        phase(i) = std::polar(1.0, -kTwoPi * w(i) * t);
    return v * phase.asDiagonal() * v.adjoint();
}

double max_frequency(const HamiltonianModel& model) {
    // conservative spectral-radius bound from absolute row sums at peak drive
    MatrixXc h = model.static_part.cwiseAbs();
    for (const auto& d : model.drive_parts) h += d.peak_amplitude * d.op.cwiseAbs();
    double f = h.cwiseAbs().rowwise().sum().maxCoeff();
    return std::max(f, 1.0);
}

MatrixXc flip_operator(const HilbertLayout& layout, const EchoEvent& ev) {
    MatrixXc g = MatrixXc::Identity(layout.total_dim, layout.total_dim);
    for (int s : ev.sites) {
        MatrixXc local;
        switch (ev.axis) {
            case FlipAxis::X: local = pauli_x(); break;
            case FlipAxis::Z: local = pauli_z(); break;
            case FlipAxis::Y: {
                local = MatrixXc::Zero(2, 2);
                local(0, 1) = Complex(0, -1);
                local(1, 0) = Complex(0, 1);
                break;
            }
        }
        g = embed(layout, s, local) * g;
    }
    return g;
}

} // namespace

StateVector StateVector::basis_state(const HilbertLayout& layout, long index) {
    StateVector s;
    s.layout = layout;
    s.amplitudes = VectorXc::Zero(layout.total_dim);
    s.amplitudes(index) = 1.0;
    return s;
}

double QuadraticState::unitarity_defect() const {
    const auto n = propagator.rows();
    return (propagator * propagator.adjoint() - MatrixXc::Identity(n, n)).cwiseAbs().maxCoeff();
}

void EchoSchedule::validate() const {
    double prev = 0.0;
    for (const auto& e : events) {
        if (e.time < prev || e.time > total_time)
            throw std::invalid_argument("EchoSchedule: events must be time-ordered in [0, total]");
        prev = e.time;
    }
}

MatrixXc propagator_dense(const HamiltonianModel& model, double t) {
    if (model.form != HamiltonianForm::Dense)
        throw std::invalid_argument("propagator_dense: model is not in dense form");
    if (model.has_drives())
        throw std::invalid_argument("propagator_dense: driven model, use the driven variant");
    return spectral_exp(model.static_part, t);
}

MatrixXc propagator_dense_driven(const HamiltonianModel& model, double t,
                                 const EvolveOptions& opts) {
    if (!model.has_drives()) return propagator_dense(model, t);
    const double fmax = max_frequency(model);
    if (opts.dt > 0 && opts.dt > 0.1 / fmax)
        throw std::domain_error("propagator_dense_driven: dt must resolve the fastest "
                                "frequency (dt <= 0.1/f_max)");
    double dt = opts.dt > 0 ? opts.dt : 0.02 / fmax;
    const long n = std::max(1L, static_cast<long>(std::ceil(t / dt)));
    dt = t / static_cast<double>(n);
    MatrixXc u = MatrixXc::Identity(model.layout.total_dim, model.layout.total_dim);
    for (long i = 0; i < n; ++i) {
        const double tm = (static_cast<double>(i) + 0.5) * dt;
        u = spectral_exp(model.at(tm), dt) * u;
    }
    return u;
}

StateVector evolve_dense(const HamiltonianModel& model, const StateVector& psi0, double t_final,
                         const EvolveOptions& opts) {
    if (model.form != HamiltonianForm::Dense)
        throw std::invalid_argument("evolve_dense: model is not in dense form");
    StateVector out = psi0;
    if (!model.has_drives()) {
        out.amplitudes = spectral_exp(model.static_part, t_final) * psi0.amplitudes;
    } else {
        const double fmax = max_frequency(model);
        if (opts.dt > 0 && opts.dt > 0.1 / fmax)
            throw std::domain_error("evolve_dense: dt must resolve the fastest frequency "
                                    "(dt <= 0.1/f_max)");
        double dt = opts.dt > 0 ? opts.dt : 0.02 / fmax;
        const long n = std::max(1L, static_cast<long>(std::ceil(t_final / dt)));
        dt = t_final / static_cast<double>(n);
        VectorXc psi = psi0.amplitudes;
        for (long i = 0; i < n; ++i) {
            const double tm = (static_cast<double>(i) + 0.5) * dt;
            psi = spectral_exp(model.at(tm), dt) * psi;
        }
        out.amplitudes = psi;
    }
    const double drift = std::abs(out.norm() - psi0.norm());
    if (drift > opts.norm_tolerance)
        throw std::runtime_error("evolve_dense: norm drift " + std::to_string(drift) +
                                 " exceeds tolerance; reduce dt");
    return out;
}

QuadraticState evolve_quadratic(const HamiltonianModel& model, double t_final) {
    if (!model.quadratic)
        throw std::invalid_argument("evolve_quadratic: model has no quadratic form");
    const auto& q = *model.quadratic;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.h);
    const auto& w = es.eigenvalues();
    const Eigen::MatrixXcd v = es.eigenvectors().cast<Complex>();
    VectorXc phase(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        phase(i) = std::polar(1.0, -kTwoPi * w(i) * t_final);
    QuadraticState s;
    s.propagator = v * phase.asDiagonal() * v.adjoint();
    s.propagator *= std::polar(1.0, -kTwoPi * q.scalar_offset * t_final);
    return s;
}

MatrixXc echo_propagator(const HamiltonianModel& model, const EchoSchedule& schedule,
                         const EvolveOptions& opts) {
    schedule.validate();
    MatrixXc u = MatrixXc::Identity(model.layout.total_dim, model.layout.total_dim);
    double t = 0.0;
    auto advance = [&](double until) {
        if (until > t) {
            if (model.has_drives()) {
                // segment evolution with the drive clock offset to t
                HamiltonianModel seg = model;
                for (auto& d : seg.drive_parts) {
                    auto base = d.envelope;
                    double off = t;
                    d.envelope = [base, off](double tau) { return base(tau + off); };
                }
                u = propagator_dense_driven(seg, until - t, opts) * u;
            } else {
                u = spectral_exp(model.static_part, until - t) * u;
            }
            t = until;
        }
    };
    for (const auto& ev : schedule.events) {
        advance(ev.time);
        u = flip_operator(model.layout, ev) * u;
    }
    advance(schedule.total_time);
    return u;
}

StateVector apply_echo_schedule(const HamiltonianModel& model, const EchoSchedule& schedule,
                                const StateVector& psi0, const EvolveOptions& opts) {
    StateVector out = psi0;
    out.amplitudes = echo_propagator(model, schedule, opts) * psi0.amplitudes;
    return out;
}

double process_fidelity(const MatrixXc& u_actual, const MatrixXc& u_target,
                        const std::vector<long>& subspace) {
    if (u_actual.rows() != u_target.rows())
        throw std::invalid_argument("process_fidelity: dimension mismatch");
    Complex tr(0, 0);
    long dim;
    if (subspace.empty()) {
        tr = (u_target.adjoint() * u_actual).trace();
        dim = u_actual.rows();
    } else {
        for (long i : subspace)
            for (long j : subspace) tr += std::conj(u_target(i, j)) * u_actual(i, j);
        dim = static_cast<long>(subspace.size());
    }
    const double f = std::norm(tr) / (static_cast<double>(dim) * static_cast<double>(dim));
    return std::min(f, 1.0);
}

double transfer_fidelity_unpolarized(const MatrixXc& protocol_u, int n_chain,
                                     TransferTarget target, std::uint64_t seed, int min_samples) {
    const int m = n_chain + 2;
    if ((1L << m) != protocol_u.rows())
        throw std::invalid_argument("transfer_fidelity_unpolarized: dimension mismatch");
    const HilbertLayout layout = HilbertLayout::spin_half_chain(m);
    const int src = 0;
    const int far = m - 1;
    const int dst = (target == TransferTarget::RoundTrip) ? src : far;
    const int spectator = (target == TransferTarget::RoundTrip) ? far : src;

    std::vector<long> chain_states;
    const long n_all = 1L << n_chain;
    if (n_chain <= 8) {
        for (long n = 0; n < n_all; ++n) chain_states.push_back(n);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<long> dist(0, n_all - 1);
        for (int i = 0; i < min_samples; ++i) chain_states.push_back(dist(rng));
    }

    // F(theta) = A + Re(e^{-i theta} B); max over the output-Z frame = A + |B|
    double a_sum = 0.0;
    Complex b_sum(0, 0);
    for (long n : chain_states) {
        for (int a = 0; a < 2; ++a) {
            for (long mm = 0; mm < n_all; ++mm) {
                Complex k00(0, 0), k11(0, 0);
                for (int s = 0; s < 2; ++s) {
                    std::vector<int> digs(static_cast<size_t>(m), 1);
                    digs[static_cast<size_t>(src)] = s ? 0 : 1;  // qubit |1> = up = digit 0
                    for (int i = 0; i < n_chain; ++i)
                        digs[static_cast<size_t>(1 + i)] = ((n >> i) & 1L) ? 0 : 1;
                    digs[static_cast<size_t>(far)] = 1;  // non-transporting end starts |down>
                    const long col = layout.index_of(digs);
                    std::vector<int> dout(static_cast<size_t>(m), 1);
                    dout[static_cast<size_t>(dst)] = s ? 0 : 1;  // diagonal element b == s
                    for (int i = 0; i < n_chain; ++i)
                        dout[static_cast<size_t>(1 + i)] = ((mm >> i) & 1L) ? 0 : 1;
                    dout[static_cast<size_t>(spectator)] = a ? 0 : 1;
                    const long row = layout.index_of(dout);
                    if (s == 0)
                        k00 = protocol_u(row, col);
                    else
                        k11 = protocol_u(row, col);
                }
                a_sum += (std::norm(k00) + std::norm(k11)) / 4.0;
                b_sum += k11 * std::conj(k00) / 2.0;
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(chain_states.size());
    return std::min(a_sum * inv + std::abs(b_sum) * inv, 1.0);
}

std::string trajectory_csv(const HamiltonianModel& model, const StateVector& psi0, double t_final,
                           int n_rows, const EvolveOptions& opts) {
    std::ostringstream os;
    os.precision(12);
    os << "t";
    for (int s = 0; s < model.layout.num_sites(); ++s) os << ",p_site" << s;
    os << '\n';
    for (int r = 0; r <= n_rows; ++r) {
        const double t = t_final * r / n_rows;
        const StateVector psi = evolve_dense(model, psi0, t, opts);
        os << t;
        for (int s = 0; s < model.layout.num_sites(); ++s) {
            double p = 0.0;
            for (long i = 0; i < model.layout.total_dim; ++i)
                if (model.layout.digit(i, s) == 0) p += std::norm(psi.amplitudes(i));
            os << ',' << p;
        }
        os << '\n';
    }
    return os.str();
}

} // namespace spinbus
