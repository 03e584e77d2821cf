#ifndef EESIM_COHERENT_HPP
#define EESIM_COHERENT_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <limits>
#include <vector>

#include "eesim/params.hpp"
#include "eesim/trajectory.hpp"

namespace eesim {

// Fock cutoff per cavity mode (the atom adds a factor 2).
struct FockSpaceSpec {
    int n_max = 0;
    // cutoff rule n_max >= <N> + 5 sqrt(<N>), rounded up
    static int auto_cutoff(double mean_n);
};

// Coherent Gaussian drive in the rotating frame; beta(t) is the
// photon-flux amplitude with integral |beta|^2 dt = mean_n.
struct DriveEnvelope {
    double mean_n = 0.0;
    double t0 = 0.0;
    double sigma_t = 1.0;
    double detuning = 0.0; // carrier minus frame reference

    std::complex<double> beta(double t) const;
    // numerical quadrature of |beta|^2 over [0, t_end]
    double integrated_photon_number(double t_end, double dt) const;
};

// Rotating-frame Lindblad generator: Hamiltonian, the collective
// waveguide port L (the drive enters through it), independent intrinsic
// loss channels, observable operators and the EE projection vectors.
struct LindbladGenerator {
    int dim = 0;
    int n_max = 0;
    bool three_mode = false;
    Eigen::SparseMatrix<std::complex<double>> hamiltonian;
    Eigen::SparseMatrix<std::complex<double>> port;       // L
    std::vector<Eigen::SparseMatrix<std::complex<double>>> local_loss;
    Eigen::SparseMatrix<std::complex<double>> n_cavity;   // a^dag a
    Eigen::SparseMatrix<std::complex<double>> n_cavity2;  // second cavity
    Eigen::SparseMatrix<std::complex<double>> n_atom;     // sigma+ sigma-
    Eigen::VectorXcd ee_vector;   // single-photon EE state
    Eigen::VectorXcd ee_vector2;  // second least-lossy state (three-mode)
    std::vector<int> top_level_states; // basis indices at the Fock ceiling
    double rate_scale = 0.0; // largest detuning/coupling/decay rate
    double port_unit = 0.0;  // |L| on a single excitation, sqrt(2 sum gamma)
};

LindbladGenerator build_generator(const SystemParams &params, int n_max,
                                  double omega_ref
                                  = std::numeric_limits<double>::quiet_NaN());
LindbladGenerator build_generator(const ThreeModeParams &params, int n_max,
                                  double omega_ref
                                  = std::numeric_limits<double>::quiet_NaN());

struct MasterOptions {
    double dt = 0.0;              // 0 -> 0.01 / max rate
    double sample_interval = 0.0; // 0 -> 0.25 / gamma_unit
    bool check_positivity = false;
    double gamma_unit = 0.0;      // for the t_gamma axis; set by callers
};

struct MasterRunResult {
    Trajectory traj; // t_gamma, n_cavity(,n_cavity2), p_atom, p_ee(,p_ee2),
                     // trace_err, tail_pop
    Eigen::MatrixXcd rho_final;
};

// Fixed-step RK4 integration of
//   drho/dt = -i[H + H_d(t), rho] + sum_k D[L_k] rho,
//   H_d(t) = i (beta(t) L^dag - conj(beta(t)) L).
// Throws TruncationBreach when the Fock ceiling is populated and
// TraceDrift when the trace leaves 1 beyond tolerance.
MasterRunResult evolve_master(const LindbladGenerator &gen,
                              const DriveEnvelope &drive, double t_final,
                              const MasterOptions &opts = {});

// Fig. 4c style run: three-mode system at the interference condition,
// coherent pulse through the cavity port, both EE projections reported.
MasterRunResult run_three_mode_coherent(const ThreeModeParams &params,
                                        double mean_n, double t_final_gamma,
                                        int n_max = 0);

} // namespace eesim

#endif
