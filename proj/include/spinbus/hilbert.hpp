#ifndef SPINBUS_HILBERT_HPP
#define SPINBUS_HILBERT_HPP

// Labeled tensor-product basis over mixed-dimension sites, with helpers to
// embed site-local operators and to realize fermion bilinears as dense spin
// operators (Jordan-Wigner, chain-ordered sites).

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "spinbus/core.hpp"

namespace spinbus {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

inline constexpr int kDenseDimCap = 4096;

struct HilbertLayout {
    std::vector<SpinSpecies> sites;
    std::vector<int> dims;
    long total_dim = 1;

    static HilbertLayout of(std::vector<SpinSpecies> s, long dim_cap = kDenseDimCap);
    // n spin-1/2 sites
    static HilbertLayout spin_half_chain(int n, long dim_cap = kDenseDimCap);

    int num_sites() const { return static_cast<int>(sites.size()); }

    // digit of basis index at a site; site 0 is the slowest (leftmost kron factor)
    int digit(long index, int site) const;
    // index from per-site digits
    long index_of(const std::vector<int>& digits) const;
    // stride of a site in the flattened index
    long stride(int site) const;

    bool operator==(const HilbertLayout& o) const {
        return dims == o.dims;  // dimension structure is what evolution cares about
    }
};

// Spin matrices, S = sigma/2 normalization for two-level sites.
// Two-level basis order: index 0 = up (Sz=+1/2), 1 = down.
// NV three-level basis order: index 0 = ms=-1, 1 = ms=0, 2 = ms=+1.
MatrixXc spin_half_sz();
MatrixXc spin_half_sx();
MatrixXc spin_half_sp();  // S+ = |up><down|
MatrixXc spin_half_sm();
MatrixXc nv_sz();         // diag(-1, 0, +1)
MatrixXc nv_sz2();        // diag(1, 0, 1)
MatrixXc pauli_x();
MatrixXc pauli_z();

// Embed a site-local operator into the full space.
MatrixXc embed(const HilbertLayout& layout, int site, const MatrixXc& op);
// Embed a two-site product op_a (site a) * op_b (site b), a != b.
MatrixXc embed2(const HilbertLayout& layout, int a, const MatrixXc& op_a, int b,
                const MatrixXc& op_b);

// Dense spin operator for the fermion bilinear sum_ij h(i,j) c_i^dag c_j over
// spin-1/2 sites in chain order (occupied = up). h must be Hermitian. For
// tridiagonal h this reproduces sum kappa (S+S- + S-S+) + sum h_ii (Sz + 1/2).
MatrixXc jordan_wigner_dense(const Eigen::MatrixXd& h);
MatrixXc jordan_wigner_dense(const MatrixXc& h);

// Basis indices of the single-excitation sector (exactly one up spin) of an
// all-spin-1/2 layout, ordered by the excited site.
std::vector<long> single_excitation_indices(const HilbertLayout& layout);

} // namespace spinbus

#endif
