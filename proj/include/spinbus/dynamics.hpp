#ifndef SPINBUS_DYNAMICS_HPP
#define SPINBUS_DYNAMICS_HPP

// Time evolution engines: unitary dense propagation (exponential midpoint
// stepping, spectrally exact for static models), quadratic single-particle
// propagation for long chains, echo/toggling-frame transforms and fidelity
// metrics.
//
// Fidelity convention: entanglement (process) fidelity
//   F = |Tr(P V^dag U P)|^2 / dim(P)^2
// on the stated subspace. Chain-averaged transfer fidelities additionally
// maximize over one deterministic Z phase on the output qubit (the frame
// rotation is known and trackable); see transfer_fidelity_unpolarized.

#include <cstdint>
#include <optional>

#include "spinbus/hamiltonian.hpp"

namespace spinbus {

struct StateVector {
    HilbertLayout layout;
    VectorXc amplitudes;

    double norm() const { return amplitudes.norm(); }
    static StateVector basis_state(const HilbertLayout& layout, long index);
};

struct QuadraticState {
    Eigen::MatrixXcd propagator;  // N x N single-particle propagator, includes
                                  // the scalar sector phase of the model
    double unitarity_defect() const;
};

enum class FlipAxis { X, Y, Z };

struct EchoEvent {
    double time;
    std::vector<int> sites;
    FlipAxis axis = FlipAxis::X;
};

struct EchoSchedule {
    std::vector<EchoEvent> events;  // time-ordered within [0, total_time]
    double total_time = 0.0;
    void validate() const;
};

struct EvolveOptions {
    double dt = 0.0;              // 0: auto, 0.02 / f_max (f_max from the model,
                                  // drives taken at their peak amplitudes)
    double norm_tolerance = 1e-6; // drift beyond this raises
};

// psi(t_final) under the (possibly driven) dense model. Static models are
// propagated with a single spectral exponential; driven models step with
// midpoint-sampled exponentials (norm-preserving by construction).
StateVector evolve_dense(const HamiltonianModel& model, const StateVector& psi0, double t_final,
                         const EvolveOptions& opts = {});

// Full propagator of a static dense model (spectral exponential).
MatrixXc propagator_dense(const HamiltonianModel& model, double t);
// Propagator of a driven dense model via midpoint stepping.
MatrixXc propagator_dense_driven(const HamiltonianModel& model, double t,
                                 const EvolveOptions& opts = {});

// Single-particle propagator exp(-2 pi i h t) * exp(-2 pi i c t) of a
// quadratic model (spectral decomposition of the coefficient matrix).
QuadraticState evolve_quadratic(const HamiltonianModel& model, double t_final);

// Piecewise evolution with interleaved instantaneous site-local pi flips.
StateVector apply_echo_schedule(const HamiltonianModel& model, const EchoSchedule& schedule,
                                const StateVector& psi0, const EvolveOptions& opts = {});
MatrixXc echo_propagator(const HamiltonianModel& model, const EchoSchedule& schedule,
                         const EvolveOptions& opts = {});

// |Tr(P V^dag U P)|^2 / dim(P)^2; empty projector = full space.
double process_fidelity(const MatrixXc& u_actual, const MatrixXc& u_target,
                        const std::vector<long>& subspace = {});

enum class TransferTarget { ToFar, RoundTrip };

// Average over chain computational states of the end-to-end qubit map
// fidelity under protocol_u, which acts on site0 (+) chain (+) site(N+1),
// all spin-1/2. The non-transporting end starts |down>. Exhaustive for
// n_chain <= 8; seeded sampling (>= 256 states) beyond.
double transfer_fidelity_unpolarized(const MatrixXc& protocol_u, int n_chain,
                                     TransferTarget target = TransferTarget::ToFar,
                                     std::uint64_t seed = 1, int min_samples = 256);

// Trajectory dump helper: rows of (t, site populations) for plotting.
std::string trajectory_csv(const HamiltonianModel& model, const StateVector& psi0, double t_final,
                           int n_rows, const EvolveOptions& opts = {});

} // namespace spinbus

#endif
