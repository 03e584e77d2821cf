#ifndef EESIM_ENGINE_COMMON_HPP
#define EESIM_ENGINE_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "eesim/params.hpp"

namespace eesim::detail {

using cplx = std::complex<double>;
using Matrix5cd = Eigen::Matrix<cplx, 5, 5>;

inline constexpr cplx kI{0.0, 1.0};

// Per-cell coupling of the even mode on normalized cell amplitudes:
// Vt/sqrt(dx) with Vt = 2 sqrt(pi) V.
inline double cell_coupling(double v, double dx) {
    return 2.0 * std::sqrt(M_PI) * v / std::sqrt(dx);
}

// Local Hamiltonian of the coupled triple {cell j0, atom, cavity} in the
// frame rotating at omega_ref. Also drives the spectator triples
// {sqrt(2) chi(j0,k), phi_a(k), phi_c(k)} of the two-excitation sector.
inline Eigen::Matrix3cd local_block3(const SystemParams &p, double dx,
                                     double omega_ref) {
    const double wa = cell_coupling(p.v_a, dx);
    const double wc = cell_coupling(p.v_c, dx);
    const cplx da = p.omega_a - omega_ref - kI * p.gamma_prime_a;
    const cplx dc = p.omega_c - omega_ref - kI * p.gamma_prime_c;
    Eigen::Matrix3cd h;
    h << 0.0, wa, wc,
         wa, da, p.j_coupling,
         wc, p.j_coupling, dc;
    return h;
}

// Local Hamiltonian of the two-excitation central block
// {chi(j0,j0), phi_a(j0), phi_c(j0), E_AC, E_2C}.
inline Matrix5cd local_block5(const SystemParams &p, double dx,
                              double omega_ref) {
    const double wa = cell_coupling(p.v_a, dx);
    const double wc = cell_coupling(p.v_c, dx);
    const double s2 = std::sqrt(2.0);
    const cplx da = p.omega_a - omega_ref - kI * p.gamma_prime_a;
    const cplx dc = p.omega_c - omega_ref - kI * p.gamma_prime_c;
    const double j = p.j_coupling;
    Matrix5cd h;
    h << 0.0, s2 * wa, s2 * wc, 0.0, 0.0,
         s2 * wa, da, j, wc, 0.0,
         s2 * wc, j, dc, wa, s2 * wc,
         0.0, wc, wa, da + dc, s2 * j,
         0.0, 0.0, s2 * wc, s2 * j, 2.0 * dc;
    return h;
}

template <typename M>
M step_propagator(const M &h, double dt) {
    return ((-kI * dt) * h).exp();
}

// Chirally transported amplitude vector: a one-cell right shift per step
// implemented as an origin offset over fixed storage, so free transport
// is exact and costs O(1).
class Ring1D {
public:
    explicit Ring1D(int n) : n_(n), a_(n, cplx(0, 0)) {}

    int size() const { return n_; }
    int array_index(int logical) const {
        int q = logical + s_;
        if (q >= n_) q -= n_;
        return q;
    }
    cplx &at(int logical) { return a_[array_index(logical)]; }
    const cplx &at(int logical) const { return a_[array_index(logical)]; }
    cplx &raw(int q) { return a_[q]; }
    const cplx &raw(int q) const { return a_[q]; }

    void shift_and_zero() {
        s_ = (s_ == 0) ? n_ - 1 : s_ - 1;
        a_[s_] = 0.0;
    }

    double squared_norm() const {
        double acc = 0;
        for (const auto &v : a_) acc += std::norm(v);
        return acc;
    }

    int offset() const { return s_; }

private:
    int n_;
    int s_ = 0;
    std::vector<cplx> a_;
};

// Two-photon amplitude grid with the same ring offset on both axes; the
// diagonal shift of chi is an O(n) zeroing of the entering row/column.
class Ring2D {
public:
    explicit Ring2D(int n) : n_(n), a_(static_cast<size_t>(n) * n, cplx(0, 0)) {}

    int size() const { return n_; }
    int array_index(int logical) const {
        int q = logical + s_;
        if (q >= n_) q -= n_;
        return q;
    }
    cplx &at(int j, int k) {
        return a_[static_cast<size_t>(array_index(j)) * n_ + array_index(k)];
    }
    const cplx &at(int j, int k) const {
        return a_[static_cast<size_t>(array_index(j)) * n_ + array_index(k)];
    }
    cplx *row_raw(int q) { return a_.data() + static_cast<size_t>(q) * n_; }
    const cplx *row_raw(int q) const {
        return a_.data() + static_cast<size_t>(q) * n_;
    }
    cplx &raw(size_t flat) { return a_[flat]; }
    const cplx &raw(size_t flat) const { return a_[flat]; }
    cplx *data() { return a_.data(); }
    const cplx *data() const { return a_.data(); }

    void shift_and_zero() {
        s_ = (s_ == 0) ? n_ - 1 : s_ - 1;
        cplx *row = row_raw(s_);
        for (int q = 0; q < n_; ++q) {
            row[q] = 0.0;
            a_[static_cast<size_t>(q) * n_ + s_] = 0.0;
        }
    }

    double squared_norm() const {
        double acc = 0;
        for (const auto &v : a_) acc += std::norm(v);
        return acc;
    }

    int offset() const { return s_; }

private:
    int n_;
    int s_ = 0;
    std::vector<cplx> a_;
};

} // namespace eesim::detail

#endif
