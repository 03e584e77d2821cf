#ifndef EESIM_VERIFY_HPP
#define EESIM_VERIFY_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "eesim/grid.hpp"
#include "eesim/params.hpp"
#include "eesim/twophoton.hpp"

namespace eesim {

// Brute-force reference for the two-excitation engine. The Hamiltonian is
// transcribed directly from the equations of motion, independently of the
// engine's local-propagator blocks, over the orthonormal basis
//   { sqrt(2) chi(j,k) | j<k } + { chi(j,j) } + phi_a + phi_c + E_AC + E_2C
// so Hermiticity of the result checks every coupling and sqrt(2) factor.
// `corrupt_sign` flips one coupling direction (negative control).
Eigen::MatrixXcd assemble_two_excitation_hamiltonian(const SystemParams &params,
                                                     const GridSpec &grid,
                                                     double omega_ref,
                                                     bool corrupt_sign = false);

int two_excitation_basis_dim(const GridSpec &grid);

Eigen::VectorXcd two_photon_state_to_vector(const TwoPhotonState &state,
                                            const GridSpec &grid);
TwoPhotonState vector_to_two_photon_state(const Eigen::VectorXcd &v,
                                          const GridSpec &grid);

// Reference propagation: per step the exact one-cell shift followed by
// the dense matrix exponential of the assembled coupling Hamiltonian.
TwoPhotonState brute_force_evolve(const SystemParams &params,
                                  const GridSpec &grid,
                                  const TwoPhotonState &initial, int n_steps,
                                  double omega_ref);

// Deterministic dense symmetric test state exercising every coupling;
// support is restricted to cells <= max_cell (all cells when negative) so
// a finite run stays clear of the grid edge.
TwoPhotonState random_two_photon_state(const GridSpec &grid,
                                       unsigned seed = 42, int max_cell = -1);

struct CheckResult {
    std::string name;
    bool pass = false;
    double metric = 0.0;
    std::string detail;
};

// The fast oracle suite behind `eesim verify`: Hermiticity, dense-expm
// equivalence, norm conservation, bosonic symmetry, exact free transport,
// the dark-state identity, the single-pole decay fit, and a corrupted
// negative control.
std::vector<CheckResult> run_verification();

} // namespace eesim

#endif
