#ifndef SPINBUS_CORE_HPP
#define SPINBUS_CORE_HPP

// Units, physical constants, spin species and dipolar/hyperfine parameter
// derivation shared by every other module.
//
// Unit convention: all couplings and splittings are linear frequencies in Hz
// (hbar absorbed); every time-evolution phase is 2*pi*f*t. Lengths in nm,
// fields in Tesla, temperatures in Kelvin, times in seconds.

#include <array>
#include <stdexcept>
#include <string>

namespace spinbus {

struct PhysicalConstants {
    double zero_field_splitting = 2.87e9;   // Hz, NV ground-state ZFS
    // Electron gyromagnetic ratio, Hz/T. Stored positive so that an axis
    // aligned field lowers ms=-1 relative to ms=+1 (2*mu_e*B below at 1 T).
    double electron_gyro = 2.8e10;
    double nuclear_gyro = -4.3e6;           // Hz/T, 15N
    double nv_hyperfine = 3.0e6;            // Hz, A (NV electron - 15N nucleus)
    double n_hyperfine_par = -159.7e6;      // Hz, nitrogen A_parallel
    double n_hyperfine_perp = -113.8e6;     // Hz, nitrogen A_perp
    double jt_attempt_rate = 4.0e12;        // 1/s, Jahn-Teller attempt frequency
    double jt_activation_ev = 0.76;         // eV
    double boltzmann_ev_per_k = 8.617333e-5;
    // Point-dipole electron-electron prefactor, Hz*nm^3. kappa(r) = pref/r^3
    // is the flip-flop coefficient of the driven XX model; the static Ising
    // coefficient is 4*kappa. Fits both published (kappa, r) pairs to <2%.
    double dipolar_prefactor = 52.0e6;
    // optional (1 - 3 cos^2 theta) geometry multiplier, default 1
    double dipolar_angular = 1.0;
};

enum class SpinKind { NVElectron, NitrogenElectron, Nuclear };

enum class JTAxis { Parallel, Tilted1, Tilted2, Tilted3 };

struct SpinSpecies {
    SpinKind kind = SpinKind::NitrogenElectron;
    JTAxis jt_axis = JTAxis::Parallel;   // nitrogen only
    int nuclear_state = +1;              // +-1 meaning m_I = +-1/2, nitrogen only

    static SpinSpecies nv() { return {SpinKind::NVElectron, JTAxis::Parallel, +1}; }
    static SpinSpecies nitrogen(JTAxis a = JTAxis::Parallel, int nuc = +1) {
        return {SpinKind::NitrogenElectron, a, nuc};
    }
    static SpinSpecies nuclear() { return {SpinKind::Nuclear, JTAxis::Parallel, +1}; }

    int levels() const { return kind == SpinKind::NVElectron ? 3 : 2; }
};

struct SystemSpec {
    PhysicalConstants constants{};
    double b0_tesla = 1.0;
    double gradient_t_per_m = 5.357e5;   // ~150 MHz per 10 nm row
    double row_pitch_nm = 10.0;
    double temperature_k = 300.0;

    void validate() const {
        if (b0_tesla <= 0) throw std::domain_error("SystemSpec: B0 must be > 0");
        if (row_pitch_nm <= 0) throw std::domain_error("SystemSpec: row_pitch must be > 0");
    }
};

// Flip-flop coupling kappa = prefactor/r^3 (Hz), r in nm.
double dipolar_coupling(const PhysicalConstants& c, double r_nm);

struct RotatedHyperfine {
    double alpha;      // Hz
    double beta;       // Hz
    double gamma;      // Hz, the Sz*Iz coefficient A_par/9 + 8 A_perp/9
    double splitting;  // Hz, sqrt(alpha^2+beta^2+gamma^2)
};

// Hyperfine constants of a nitrogen in the lab frame for the given JT axis.
// Parallel axis returns (0, 0, A_par). All tilted axes are equivalent.
RotatedHyperfine rotated_hyperfine(const PhysicalConstants& c, JTAxis axis);

// ESR line offsets of a nitrogen impurity from omega_0:
// {+A_par/2, -A_par/2, +gamma/2, -gamma/2}; rounded mode gives {+-80, +-60} MHz.
std::array<double, 4> impurity_line_offsets(const PhysicalConstants& c, bool rounded = false);

// Jahn-Teller reorientation rate 1/T1^N = attempt * exp(-eps/kT).
// Note: evaluates to ~0.7 1/s at 300 K (T1 ~ 1.4 s); the literature also
// quotes a room-temperature T1^N of ~2 ms. Both numbers are surfaced here;
// this function is the Arrhenius law verbatim.
double jt_relaxation_rate(const PhysicalConstants& c, double temperature_k);

// Gradient-induced detuning between rows separated by dy_nm:
// delta = (dB/dy) * mu_e * dy.
double gradient_detuning(const SystemSpec& spec, double dy_nm);

// Effective hyperfine Sz coefficient for a nitrogen: A_par (parallel JT) or
// gamma (tilted), times m_I = +-1/2.
double nitrogen_hyperfine_shift(const PhysicalConstants& c, JTAxis axis, int nuclear_state);

} // namespace spinbus

#endif
