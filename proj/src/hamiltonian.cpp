#include "spinbus/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spinbus {

namespace {

constexpr double kPi = std::numbers::pi;

MatrixXc xx_dense_from_quadratic(const QuadraticForm& q, const HilbertLayout& layout) {
    // JW(h) carries sum h_ii (Sz_i + 1/2); adding the stored offset
    // (-sum h_ii / 2) restores the traceless Sz convention of the dense builders.
    MatrixXc h = jordan_wigner_dense(q.h);
    h += q.scalar_offset * MatrixXc::Identity(layout.total_dim, layout.total_dim);
    return h;
}

} // namespace

double HamiltonianModel::hermiticity_defect() const {
    auto defect = [](const MatrixXc& m) {
        const double n = m.cwiseAbs().maxCoeff();
        if (n == 0.0) return 0.0;
        return (m - m.adjoint()).cwiseAbs().maxCoeff() / n;
    };
    double worst = defect(static_part);
    for (const auto& d : drive_parts) worst = std::max(worst, defect(d.op));
    return worst;
}

MatrixXc HamiltonianModel::single_excitation_block() const {
    const auto ix = single_excitation_indices(layout);
    const int n = static_cast<int>(ix.size());
    MatrixXc block(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) block(i, j) = static_part(ix[static_cast<size_t>(i)], ix[static_cast<size_t>(j)]);
    return block;
}

std::string HamiltonianModel::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    const long d = layout.total_dim;
    for (long col = 0; col < d; ++col) {
        for (long row = 0; row < d; ++row) {
            const Complex v = static_part(row, col);
            os << v.real() << ',' << v.imag();
            os << (row + 1 == d ? '\n' : ',');
        }
    }
    return os.str();
}

ChainSpec ChainSpec::uniform(int n, double kappa, double omega) {
    ChainSpec c;
    c.n_chain = n;
    c.couplings.assign(static_cast<size_t>(std::max(0, n - 1)), kappa);
    c.on_site.assign(static_cast<size_t>(n), omega);
    return c;
}

void ChainSpec::validate() const {
    if (n_chain < 1) throw std::invalid_argument("ChainSpec: n_chain must be >= 1");
    if (static_cast<int>(couplings.size()) != n_chain - 1)
        throw std::invalid_argument("ChainSpec: couplings length must be n_chain-1");
    if (static_cast<int>(on_site.size()) != n_chain)
        throw std::invalid_argument("ChainSpec: on_site length must be n_chain");
    for (double k : couplings)
        if (k <= 0) throw std::invalid_argument("ChainSpec: couplings must be > 0");
}

HamiltonianModel build_register_hamiltonian(const SystemSpec& spec) {
    spec.validate();
    const auto& c = spec.constants;
    HamiltonianModel m;
    m.layout = HilbertLayout::of({SpinSpecies::nv(), SpinSpecies::nuclear()});
    const MatrixXc sz = nv_sz(), sz2 = nv_sz2();
    const MatrixXc iz = spin_half_sz();
    const double b = spec.b0_tesla;
    m.static_part = c.zero_field_splitting * embed(m.layout, 0, sz2) +
                    c.electron_gyro * b * embed(m.layout, 0, sz) +
                    c.nuclear_gyro * b * embed(m.layout, 1, iz) +
                    c.nv_hyperfine * embed2(m.layout, 0, sz, 1, iz);
    // flip terms A(SxIx + SyIy) dropped against the ZFS + electron Zeeman
    m.dropped.push_back({"nv_hyperfine_flip", c.nv_hyperfine,
                         std::min(c.zero_field_splitting, std::abs(c.electron_gyro) * b)});
    return m;
}

HamiltonianModel build_ising_pair(double kappa, double omega0, double delta1, double delta2) {
    HamiltonianModel m;
    m.layout = HilbertLayout::spin_half_chain(2);
    const MatrixXc sz = spin_half_sz();
    m.static_part = 4.0 * kappa * embed2(m.layout, 0, sz, 1, sz) +
                    (omega0 + delta1) * embed(m.layout, 0, sz) +
                    (omega0 + delta2) * embed(m.layout, 1, sz);
    // dipolar flip-flop suppressed by the detuning difference
    m.dropped.push_back({"dipolar_flip_flop", kappa, std::abs(delta1 - delta2)});
    return m;
}

namespace {

HamiltonianModel xx_model(const std::vector<double>& hop, const std::vector<double>& onsite,
                          HamiltonianForm form) {
    const int n = static_cast<int>(onsite.size());
    HamiltonianModel m;
    m.form = form;
    QuadraticForm q;
    q.h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) q.h(i, i) = onsite[static_cast<size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) {
        q.h(i, i + 1) = hop[static_cast<size_t>(i)];
        q.h(i + 1, i) = hop[static_cast<size_t>(i)];
    }
    double sum = 0.0;
    for (double o : onsite) sum += o;
    q.scalar_offset = -sum / 2.0;
    m.quadratic = q;
    if (form == HamiltonianForm::Dense) {
        if ((1L << n) > kDenseDimCap)
            throw std::length_error("xx model: dense form refused above dimension cap");
        m.layout = HilbertLayout::spin_half_chain(n);
        m.static_part = xx_dense_from_quadratic(q, m.layout);
    } else {
        // layout kept for bookkeeping; no dense matrix materialized
        m.layout.sites.assign(static_cast<size_t>(n), SpinSpecies::nitrogen());
        m.layout.dims.assign(static_cast<size_t>(n), 2);
        m.layout.total_dim = 0;
    }
    return m;
}

} // namespace

HamiltonianModel build_driven_chain(const ChainSpec& chain, HamiltonianForm form) {
    chain.validate();
    auto m = xx_model(chain.couplings, chain.on_site, form);
    double kmax = 0.0, omax = 0.0;
    for (double k : chain.couplings) kmax = std::max(kmax, k);
    for (double o : chain.on_site) omax = std::max(omax, std::abs(o));
    m.dropped.push_back({"counter_rotating", kmax, 2.0 * std::max(omax, kmax)});
    return m;
}

HamiltonianModel build_ffst_hamiltonian(const ChainSpec& chain, double e_left, double e_right,
                                        HamiltonianForm form) {
    chain.validate();
    std::vector<double> hop;
    hop.push_back(chain.g_left);
    hop.insert(hop.end(), chain.couplings.begin(), chain.couplings.end());
    hop.push_back(chain.g_right);
    std::vector<double> onsite;
    onsite.push_back(e_left);
    onsite.insert(onsite.end(), chain.on_site.begin(), chain.on_site.end());
    onsite.push_back(e_right);
    return xx_model(hop, onsite, form);
}

HamiltonianModel build_three_level_coupling(double omega, double delta, double omega_n,
                                            double kappa) {
    if (delta <= 0) throw std::domain_error("build_three_level_coupling: Delta must be > 0");
    HamiltonianModel m;
    m.layout = HilbertLayout::of({SpinSpecies::nv(), SpinSpecies::nitrogen()});
    // NV basis: 0 = ms=-1, 1 = ms=0, 2 = ms=+1
    MatrixXc hnv = MatrixXc::Zero(3, 3);
    hnv(0, 0) = -delta;
    hnv(2, 2) = -delta;
    hnv(1, 2) = hnv(2, 1) = -omega;
    hnv(1, 0) = hnv(0, 1) = -omega;
    m.static_part = embed(m.layout, 0, hnv) - omega_n * embed(m.layout, 1, spin_half_sx()) +
                    4.0 * kappa * embed2(m.layout, 0, nv_sz(), 1, spin_half_sz());
    // population of |+> suppressed by Delta
    m.dropped.push_back({"bright_state_leak", kappa, delta});
    return m;
}

HamiltonianModel build_nitrogen_pair_secular(JTAxis jt1, JTAxis jt2, int nuclear1, int nuclear2,
                                             double r_nm, const SystemSpec& spec) {
    spec.validate();
    const auto& c = spec.constants;
    HamiltonianModel m;
    m.layout = HilbertLayout::spin_half_chain(2);
    const MatrixXc sz = spin_half_sz();
    const double omega0 = c.electron_gyro * spec.b0_tesla;
    const double hf1 = nitrogen_hyperfine_shift(c, jt1, nuclear1);
    const double hf2 = nitrogen_hyperfine_shift(c, jt2, nuclear2);
    const double grad = gradient_detuning(spec, spec.row_pitch_nm);
    const double kappa = dipolar_coupling(c, r_nm);
    m.static_part = (omega0 + hf1) * embed(m.layout, 0, sz) +
                    (omega0 + grad + hf2) * embed(m.layout, 1, sz) +
                    4.0 * kappa * embed2(m.layout, 0, sz, 1, sz);
    // electron flip-flop vs the frequency mismatch between the two spins
    const double mismatch = std::abs(hf1 - (hf2 + grad));
    m.dropped.push_back({"electron_flip_flop", kappa, mismatch});
    // nuclear spin flips in the rotated hyperfine basis vs the hyperfine splitting
    const auto rot = rotated_hyperfine(c, jt2 == JTAxis::Parallel ? jt1 : jt2);
    const double nuc_zeeman = std::abs(c.nuclear_gyro) * spec.b0_tesla;
    const double transverse =
        rot.splitting > 0
            ? nuc_zeeman * std::hypot(rot.alpha, rot.beta * rot.gamma / rot.splitting) /
                  std::max(std::hypot(rot.alpha, rot.gamma), 1.0)
            : 0.0;
    m.dropped.push_back({"nuclear_flip", transverse, rot.splitting});
    return m;
}

SecularReport secular_validity(const HamiltonianModel& model, double threshold) {
    SecularReport rep;
    for (const auto& d : model.dropped) {
        double r2;
        if (d.amplitude_hz == 0.0)
            r2 = 0.0;
        else if (d.splitting_hz == 0.0)
            r2 = std::numeric_limits<double>::infinity();
        else {
            const double r = d.amplitude_hz / d.splitting_hz;
            r2 = r * r;
        }
        rep.ratios.push_back({d.label, r2, r2 >= threshold});
        rep.worst = std::max(rep.worst, r2);
    }
    return rep;
}

double chain_mode_energy(int n, int k, double kappa) {
    if (k < 1 || k > n) throw std::domain_error("chain_mode_energy: k out of range");
    return 2.0 * kappa * std::cos(static_cast<double>(k) * kPi / (n + 1.0));
}

double chain_mode_amplitude(int n, int k, int i) {
    return std::sqrt(2.0 / (n + 1.0)) * std::sin(static_cast<double>(k) * kPi * i / (n + 1.0));
}

} // namespace spinbus
