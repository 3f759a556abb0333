#ifndef SPINBUS_PROTOCOLS_HPP
#define SPINBUS_PROTOCOLS_HPP

// Protocol library: the register gate set, adiabatic sequential SWAP with
// optimized ramps, free-fermion state transfer (tuning, directionality,
// disorder compensation), the remote-gate circuit, and the nuclear-to-dressed
// state mapping.

#include <map>
#include <optional>

#include "spinbus/dynamics.hpp"

namespace spinbus {

struct GateReport {
    std::string protocol;
    double fidelity = 1.0;
    double duration = 0.0;   // seconds
    std::map<std::string, double> parameters;
    std::optional<MatrixXc> unitary;

    std::string to_json() const;
};

enum class RampShape { LocalAdiabatic, Linear, Tanh };

struct RampProfile {
    double t_ss = 0.0;        // s
    double span = 0.0;        // Hz; Omega_1 - Omega_2 sweeps -span..+span
    double omega_bar = 0.0;   // Hz; common Rabi offset, both curves stay > 0
    double kappa = 0.0;       // Hz; sets the local-adiabatic gap
    RampShape shape = RampShape::LocalAdiabatic;

    double difference(double t) const;              // x(t) = Omega1 - Omega2
    std::pair<double, double> omegas(double t) const;
    double omega_start() const { return omegas(0.0).first; }
    double omega_end() const { return omegas(t_ss).first; }
};

// Local-adiabatic (sweep rate ~ gap^2, gap = sqrt(x^2 + (2 kappa)^2)) ramp
// over x in [-omega_max, +omega_max], normalized to duration t_ss.
RampProfile optimal_ramp(double kappa, double t_ss, double omega_max,
                         RampShape shape = RampShape::LocalAdiabatic);

// Ideal-pulse register gates on the {|0>,|1>}_e x {up,down}_n subspace.
// Basis order (e, n): 0up, 0dn, 1up, 1dn; nuclear qubit |1> = |down>.
// C_eNOT_n: RF pi pulse, flips n iff e = |1>.
// C_nNOT_e: Hadamard_e . CP . Hadamard_e with the CP from hyperfine free
// evolution for tau = 1/(2A) (phase convention 2 pi A Sz Iz t, Sz in {0,1}),
// plus an ideal local Z correction; flips e iff n = |down>.
// rabi_hz > 0 switches on the finite-Rabi off-resonant infidelity estimate.
GateReport gate_ce_not_n(const SystemSpec& spec, double rabi_hz = 0.0);
GateReport gate_cn_not_e(const SystemSpec& spec, double rabi_hz = 0.0);
GateReport gate_register_swap(const SystemSpec& spec, double rabi_hz = 0.0);

struct PairSwapResult {
    GateReport report;           // fidelity = single-shot transfer population
    double fidelity_avg;         // Stueckelberg-averaged over +-10% duration window
    double branch_fidelity;      // adiabatic eigenstate-to-eigenstate
    double spectator_leakage;    // population left on the spectator site (if any)
};

// Two-site adiabatic SWAP under the ramp; optional spectator site coupled to
// site 2 at constant Rabi offset delta_next quantifies next-neighbor leakage.
PairSwapResult adiabatic_pair_swap(double kappa, const RampProfile& ramp,
                                   std::optional<double> delta_next = std::nullopt,
                                   int avg_points = 12);

// Probability of staying on the adiabatic branch through the crossing
// (eigenstate-to-eigenstate); isolates the non-adiabatic error from the
// ramp-endpoint localization floor.
double adiabatic_branch_fidelity(double kappa, const RampProfile& ramp);

enum class SequentialMode { Dense, Pairwise };

// Sequential adiabatic SWAP down an n-site chain: n-1 pair swaps, total
// duration (n-1) * t_ss. Dense mode simulates the full chain with parked
// spins staggered away from the active pair; pairwise mode composes per-pair
// results (fidelities multiply).
GateReport sequential_swap(const ChainSpec& chain, const RampProfile& ramp,
                           SequentialMode mode = SequentialMode::Dense);

struct FFSTTuning {
    int n = 0;
    int k = 0;               // target eigenmode
    double kappa = 0.0;      // Hz
    double delta = 0.0;      // Hz, NV end-site energy (rotating frame)
    double omega = 0.0;      // Hz, NV two-photon Rabi (0 in the bare XX frame)
    double omega_n = 0.0;    // Hz, impurity Rabi / chain on-site energy
    double g_left = 0.0, g_right = 0.0;
    double mode_margin = 0.0;       // Hz to the nearest other mode
    double resonance_defect = 0.0;  // |delta - omega_n - E_k|
    bool selectivity_warning = false;
};

// Fastest-transfer mode: (N+1)/2 for odd N, N/2 for even N (tied with N/2+1).
int ffst_fastest_mode(int n);

// Solve the resonance condition Delta - Omega_N = E_k; with omega_n > 0 the
// dressing fields are populated via g = 2 sqrt(2) kappa Omega / Delta.
// Throws if g_target exceeds half the local mode spacing.
FFSTTuning ffst_tune(int n, double kappa, int k, double g_target, double omega_n = 0.0);

// Builds and simulates the (N+2)-site transfer; duration 0 selects the
// three-state half period 1 / (2 sqrt(a^2+b^2)), a/b = g * end amplitudes.
// Fidelity is the unpolarized-chain average (dense, N <= 10).
GateReport ffst_transfer(const FFSTTuning& tuning, double duration = 0.0,
                         TransferTarget target = TransferTarget::ToFar);

// Many-body unitary of the ideal (single-mode) transfer at the exact half
// period, via the Jordan-Wigner form of the mode-filtered quadratic model.
MatrixXc ffst_ideal_transfer_unitary(const FFSTTuning& tuning);

enum class TransferKind { Ideal, Simulated };
enum class MiddleGate { ControlledPhase, NonCommuting };

struct RemoteGateResult {
    GateReport report;             // fidelity vs CZ(n1,n2) modulo local Z frames
    double chain_dependence;       // max Choi deviation across chain basis states
};

// Fig.-3c-style circuit: register SWAP, chain transfer, local two-qubit gate,
// return transfer, register SWAP; nuclear-nuclear gate on [n1 e1 chain e2 n2].
RemoteGateResult remote_gate_circuit(const FFSTTuning& tuning, TransferKind kind,
                                     MiddleGate middle = MiddleGate::ControlledPhase);

// Methods mapping alpha|0>(nuc) + beta pattern -> (alpha|-> + beta|D>)|up>:
// simultaneous opposite-sign pi pulses, RF nuclear flip, adiabatic Omega ramp.
GateReport map_nuclear_to_dressed(Complex alpha, Complex beta, double t_ramp, double omega_final,
                                  double delta);

struct DirectionalityReport {
    double separation_hz;      // kappa |N1 - N2| / (N1 N2)
    double g_over_separation;
    double leakage;            // population in the off-resonant chain
    bool no_margin;            // N1 == N2
};

DirectionalityReport directionality_margin(int n_left, int n_right, double kappa, double g);

struct DisorderCompensation {
    double g_left, g_right;
    double mode_energy;
    double end_amp_left, end_amp_right;
    double fidelity_compensated;    // single-excitation transfer probability
    double fidelity_uncompensated;  // baseline with g_left = g_right
    double duration;
};

// E~0-mode compensation: g_left/g_right set inversely proportional to the
// mode end amplitudes. Coupling disorder only. Throws if the mode end
// amplitude falls below the localization threshold.
DisorderCompensation disorder_compensation(const ChainSpec& chain, double g_nominal,
                                           double localization_threshold = 1e-3);

} // namespace spinbus

#endif
