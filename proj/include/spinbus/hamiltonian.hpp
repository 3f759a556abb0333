#ifndef SPINBUS_HAMILTONIAN_HPP
#define SPINBUS_HAMILTONIAN_HPP

// Builders for every Hamiltonian the toolkit simulates, as dense labeled
// tensor-product operators or as quadratic (single-particle) coefficient
// forms for number-conserving XX models.
//
// Convention notes (consumed by all builders):
//  - spin-1/2 operators use S = sigma/2; NV pseudo-spin {|0>,|1>} maps to
//    {down, up} where the XX model applies;
//  - kappa denotes the flip-flop coefficient of the driven XX model
//    (Eq.-3-style terms); static Ising couplings carry the coefficient
//    4*kappa;
//  - every builder records the largest terms it dropped under the secular
//    approximation as (label, neglected amplitude, protecting splitting).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spinbus/hilbert.hpp"

namespace spinbus {

enum class HamiltonianForm { Dense, Quadratic };

struct DrivePart {
    MatrixXc op;                                  // Hermitian
    std::function<double(double)> envelope;       // time (s) -> amplitude (Hz)
    double peak_amplitude = 1.0;                  // bound on |envelope|, Hz
};

struct DroppedTerm {
    std::string label;
    double amplitude_hz;
    double splitting_hz;
};

struct QuadraticForm {
    // single-particle matrix: diagonal on-site, off-diagonal hopping, Hz
    Eigen::MatrixXd h;
    // scalar offset c (Hz) with H_dense = JW(h) + c*I; equals -sum(on_site)/2
    // for the Sz convention, so dense and quadratic sector phases agree.
    double scalar_offset = 0.0;
};

struct HamiltonianModel {
    HilbertLayout layout;
    MatrixXc static_part;                 // dense, Hz
    std::vector<DrivePart> drive_parts;
    HamiltonianForm form = HamiltonianForm::Dense;
    std::optional<QuadraticForm> quadratic;
    std::vector<DroppedTerm> dropped;     // secular bookkeeping

    bool has_drives() const { return !drive_parts.empty(); }
    MatrixXc at(double t) const {
        MatrixXc h = static_part;
        for (const auto& d : drive_parts) h += d.envelope(t) * d.op;
        return h;
    }
    // max |H - H^dag| element relative to ||H||
    double hermiticity_defect() const;
    // single-excitation sector block of the dense operator (all spin-1/2 sites)
    MatrixXc single_excitation_block() const;
    // column-major text dump (debugging/export)
    std::string to_csv() const;
};

struct ChainSpec {
    int n_chain = 0;
    std::vector<double> couplings;     // kappa_i, length n_chain-1, Hz
    double g_left = 0.0, g_right = 0.0;
    std::vector<double> on_site;       // Omega_i or delta_i, length n_chain, Hz

    static ChainSpec uniform(int n, double kappa, double omega = 0.0);
    void validate() const;
};

// Eq.-1-style NV register: H = D0 Sz^2 + mu_e B Sz + mu_n B Iz + A Sz Iz,
// dim 6 (3-level NV x 2-level nucleus), diagonal.
HamiltonianModel build_register_hamiltonian(const SystemSpec& spec);

// Secular Ising pair: H = 4 kappa Sz1 Sz2 + sum_i (omega0 + delta_i) Sz_i.
HamiltonianModel build_ising_pair(double kappa, double omega0, double delta1, double delta2);

// Driven rotating-frame XX chain: sum kappa_i (S+S- + h.c.) + sum Omega_i Sz_i.
HamiltonianModel build_driven_chain(const ChainSpec& chain,
                                    HamiltonianForm form = HamiltonianForm::Dense);

// (N+2)-site mixed chain NV1 - chain - NV2; end couplings g_left/g_right,
// end-site on-site energies (the NV detunings in the rotating frame).
HamiltonianModel build_ffst_hamiltonian(const ChainSpec& chain, double e_left, double e_right,
                                        HamiltonianForm form = HamiltonianForm::Dense);

// Three-level coupling control (two-photon-driven NV x nitrogen):
// H = -Delta(|1><1| + |-1><-1|) - Omega(|0><1| + |0><-1| + h.c.)
//     - Omega_N Sx^N + 4 kappa Sz^NV Sz^N.
HamiltonianModel build_three_level_coupling(double omega, double delta, double omega_n,
                                            double kappa);

// Secular nitrogen pair (two electron spins; nuclear spins enter as classical
// shifts): Zeeman + per-spin hyperfine shift + 4 kappa Sz Sz Ising dipolar.
// Spin 2 sits one row further along the gradient.
HamiltonianModel build_nitrogen_pair_secular(JTAxis jt1, JTAxis jt2, int nuclear1, int nuclear2,
                                             double r_nm, const SystemSpec& spec);

struct SecularRatio {
    std::string label;
    double ratio_sq;   // (amplitude / splitting)^2
    bool flagged;
};

struct SecularReport {
    std::vector<SecularRatio> ratios;
    double worst = 0.0;
    bool ok(double threshold = 1e-3) const { return worst < threshold; }
};

SecularReport secular_validity(const HamiltonianModel& model, double threshold = 1e-3);

// Closed-form XX chain eigenmode energy E_k = 2 kappa cos(k pi / (N+1)), k=1..N.
double chain_mode_energy(int n, int k, double kappa);
// Mode amplitude phi_k(i) = sqrt(2/(N+1)) sin(k pi i/(N+1)), i=1..N.
double chain_mode_amplitude(int n, int k, int i);

} // namespace spinbus

#endif
