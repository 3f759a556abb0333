#include "spinbus/hilbert.hpp"

#include <stdexcept>

namespace spinbus {

HilbertLayout HilbertLayout::of(std::vector<SpinSpecies> s, long dim_cap) {
    HilbertLayout l;
    l.sites = std::move(s);
    l.total_dim = 1;
    for (const auto& sp : l.sites) {
        l.dims.push_back(sp.levels());
        l.total_dim *= sp.levels();
    }
    if (l.total_dim > dim_cap)
        throw std::length_error("HilbertLayout: dense dimension cap exceeded (" +
                                std::to_string(l.total_dim) + " > " + std::to_string(dim_cap) +
                                "); use the quadratic form");
    return l;
}

HilbertLayout HilbertLayout::spin_half_chain(int n, long dim_cap) {
    return of(std::vector<SpinSpecies>(static_cast<size_t>(n), SpinSpecies::nitrogen()), dim_cap);
}

long HilbertLayout::stride(int site) const {
    long s = 1;
    for (int j = num_sites() - 1; j > site; --j) s *= dims[static_cast<size_t>(j)];
    return s;
}

int HilbertLayout::digit(long index, int site) const {
    return static_cast<int>((index / stride(site)) % dims[static_cast<size_t>(site)]);
}

long HilbertLayout::index_of(const std::vector<int>& digits) const {
    long ix = 0;
    for (int s = 0; s < num_sites(); ++s) ix = ix * dims[static_cast<size_t>(s)] + digits[static_cast<size_t>(s)];
    return ix;
}

MatrixXc spin_half_sz() {
    MatrixXc m(2, 2);
    m << 0.5, 0, 0, -0.5;
    return m;
}
MatrixXc spin_half_sx() {
    MatrixXc m(2, 2);
    m << 0, 0.5, 0.5, 0;
    return m;
}
MatrixXc spin_half_sp() {
    MatrixXc m(2, 2);
    m << 0, 1, 0, 0;
    return m;
}
MatrixXc spin_half_sm() { return spin_half_sp().adjoint(); }
MatrixXc nv_sz() {
    MatrixXc m = MatrixXc::Zero(3, 3);
    m(0, 0) = -1.0;
    m(2, 2) = 1.0;
    return m;
}
MatrixXc nv_sz2() {
    MatrixXc m = MatrixXc::Zero(3, 3);
    m(0, 0) = 1.0;
    m(2, 2) = 1.0;
    return m;
}
MatrixXc pauli_x() {
    MatrixXc m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
MatrixXc pauli_z() {
    MatrixXc m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

MatrixXc embed(const HilbertLayout& layout, int site, const MatrixXc& op) {
    const long d = layout.total_dim;
    const long str = layout.stride(site);
    const int dim = layout.dims[static_cast<size_t>(site)];
    if (op.rows() != dim || op.cols() != dim)
        throw std::invalid_argument("embed: operator dimension mismatch");
    MatrixXc out = MatrixXc::Zero(d, d);
    for (long col = 0; col < d; ++col) {
        const int dj = layout.digit(col, site);
        const long base = col - dj * str;
        for (int di = 0; di < dim; ++di) {
            const Complex v = op(di, dj);
            if (v != Complex(0, 0)) out(base + di * str, col) += v;
        }
    }
    return out;
}

MatrixXc embed2(const HilbertLayout& layout, int a, const MatrixXc& op_a, int b,
                const MatrixXc& op_b) {
    const long d = layout.total_dim;
    const long sa = layout.stride(a), sb = layout.stride(b);
    const int da = layout.dims[static_cast<size_t>(a)], db = layout.dims[static_cast<size_t>(b)];
    MatrixXc out = MatrixXc::Zero(d, d);
    for (long col = 0; col < d; ++col) {
        const int ja = layout.digit(col, a);
        const int jb = layout.digit(col, b);
        const long base = col - ja * sa - jb * sb;
        for (int ia = 0; ia < da; ++ia) {
            if (op_a(ia, ja) == Complex(0, 0)) continue;
            for (int ib = 0; ib < db; ++ib) {
                const Complex v = op_a(ia, ja) * op_b(ib, jb);
                if (v != Complex(0, 0)) out(base + ia * sa + ib * sb, col) += v;
            }
        }
    }
    return out;
}

MatrixXc jordan_wigner_dense(const MatrixXc& h) {
    const int n = static_cast<int>(h.rows());
    const long d = 1L << n;
    if (d > kDenseDimCap) throw std::length_error("jordan_wigner_dense: dimension cap exceeded");
    MatrixXc out = MatrixXc::Zero(d, d);
    // digit 0 = up = occupied; site 0 has the largest stride
    auto occ = [&](long state, int site) { return ((state >> (n - 1 - site)) & 1L) == 0; };
    for (long col = 0; col < d; ++col) {
        for (int j = 0; j < n; ++j) {
            if (!occ(col, j)) continue;
            // c_j annihilates at j; string sign from sites < j
            int sgn = 1;
            for (int l = 0; l < j; ++l)
                if (occ(col, l)) sgn = -sgn;
            const long mid = col | (1L << (n - 1 - j));  // j emptied (digit -> 1)
            for (int i = 0; i < n; ++i) {
                if (h(i, j) == Complex(0, 0)) continue;
                if (occ(mid, i)) continue;  // c_i^dag needs i empty
                int sgn2 = sgn;
                for (int l = 0; l < i; ++l)
                    if (occ(mid, l)) sgn2 = -sgn2;
                const long row = mid & ~(1L << (n - 1 - i));
                out(row, col) += static_cast<double>(sgn2) * h(i, j);
            }
        }
    }
    return out;
}

MatrixXc jordan_wigner_dense(const Eigen::MatrixXd& h) {
    return jordan_wigner_dense(MatrixXc(h.cast<Complex>()));
}

std::vector<long> single_excitation_indices(const HilbertLayout& layout) {
    const int n = layout.num_sites();
    std::vector<long> ix;
    ix.reserve(static_cast<size_t>(n));
    // all-down index has every digit 1
    long all_down = 0;
    for (int s = 0; s < n; ++s) all_down += layout.stride(s);
    for (int s = 0; s < n; ++s) ix.push_back(all_down - layout.stride(s));
    return ix;
}

} // namespace spinbus
