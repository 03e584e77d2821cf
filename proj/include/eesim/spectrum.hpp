#ifndef EESIM_SPECTRUM_HPP
#define EESIM_SPECTRUM_HPP

#include <Eigen/Dense>
#include <complex>

#include "eesim/params.hpp"

namespace eesim {

// Eigenvalues of an effective non-Hermitian Hamiltonian, sorted by
// ascending |Im| (ties broken by ascending Re). Im(lambda) is minus the
// amplitude decay rate, so index 0 is the longest-lived (EE) branch.
struct ComplexSpectrum {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd eigenvectors; // columns, unit Euclidean norm
};

ComplexSpectrum spectrum_of(const Eigen::MatrixXcd &heff);

// Interference condition residual (omega_a - omega_c)*V_A*V_C
// - J*(V_A^2 - V_C^2); zero iff a single-photon EE exists.
double ee_condition_residual(const SystemParams &p);

// J that zeroes the residual. Throws DegenerateCouplings when V_A ~ V_C
// with omega_a != omega_c.
double solve_j_for_ee(const SystemParams &p);

// Single-excitation effective Hamiltonian in basis {|e,0>, |g,1>}.
Eigen::Matrix2cd single_excitation_heff(const SystemParams &p);

// Two-excitation effective Hamiltonian in basis {|2,g>, |1,e>} (energy
// decay convention of the collective jump operator).
Eigen::Matrix2cd two_excitation_heff(const SystemParams &p);

// Normalized EE amplitudes (atom, cavity) = (V_C, -V_A)/norm.
struct EEAmplitudes {
    double atom;
    double cavity;
};
EEAmplitudes ee_state(const SystemParams &p);

// EE and bright single-photon frequencies from the closed forms.
double ee_frequency(const SystemParams &p);
double bright_frequency(const SystemParams &p);

// Three-mode interference condition: LHS - RHS of
// (w1-w2)V1V2 = J(V1^2-V2^2) + V1^2 V2 g^2 / (V2 J + V1(wA-w2)).
double three_mode_ee_residual(const ThreeModeParams &p);

// g > 0 that zeroes the three-mode residual; throws NoRealCoupling when
// the required g^2 is negative.
double solve_g_for_three_mode_ee(const ThreeModeParams &p);

// Single-excitation effective Hamiltonian in basis
// {|e>_atom, |1>_cav1, |1>_cav2}; the waveguide damps only the cavity
// block, gamma_ij = 2*pi*V_i*V_j.
Eigen::Matrix3cd three_mode_heff(const ThreeModeParams &p);

} // namespace eesim

#endif
