#ifndef EESIM_ONEPHOTON_HPP
#define EESIM_ONEPHOTON_HPP

#include <Eigen/Dense>
#include <complex>
#include <limits>

#include "eesim/grid.hpp"
#include "eesim/params.hpp"
#include "eesim/trajectory.hpp"

namespace eesim {

// Single-excitation state: photon wavefunction xi(x) on the grid
// (normalization sum |xi|^2 dx) plus atom and cavity amplitudes. In the
// classical two-cavity reading e_a and e_c are the cavity-1/cavity-2
// coupled-mode amplitudes.
struct SingleExcState {
    Eigen::VectorXcd xi;
    std::complex<double> e_a{0.0, 0.0};
    std::complex<double> e_c{0.0, 0.0};

    double norm(double dx) const {
        return xi.squaredNorm() * dx + std::norm(e_a) + std::norm(e_c);
    }
};

struct EvolveOptions {
    // rotating-frame reference; NaN selects the EE frequency
    double omega_ref = std::numeric_limits<double>::quiet_NaN();
    double sample_interval = 0.0; // 0 -> 0.25 / gamma_unit
    bool check_boundary = true;
};

struct SingleRunResult {
    Trajectory traj; // t, t_gamma, pop_atom, pop_cavity, pop_waveguide, p_ee, norm
    SingleExcState final_state;
};

// Integrates the single-excitation dynamics with dt = dx: exact one-cell
// transport alternating with the exact local propagator of
// {xi(0), e_a, e_c}. Throws BoundaryReached if amplitude reaches the
// outermost 8 cells.
SingleRunResult evolve_single(const SystemParams &params, const GridSpec &grid,
                              SingleExcState state, double t_final,
                              const EvolveOptions &opts = {});

double p_ee_single(const SystemParams &params, const SingleExcState &state);

// Same engine with the two-cavity relabeling (atom slot = cavity 1):
// single-excitation amplitudes coincide with the classical coupled-mode
// amplitudes, so this reproduces the classical transient directly.
SingleRunResult classical_two_cavity(const SystemParams &params_as_two_cavities,
                                     const GridSpec &grid,
                                     const PulseSpec &pulse, double t_final,
                                     const EvolveOptions &opts = {});

} // namespace eesim

#endif
