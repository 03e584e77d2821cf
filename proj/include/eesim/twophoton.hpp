#ifndef EESIM_TWOPHOTON_HPP
#define EESIM_TWOPHOTON_HPP

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <string>

#include "eesim/grid.hpp"
#include "eesim/params.hpp"
#include "eesim/trajectory.hpp"

namespace eesim {

// Two-excitation state: chi(x1,x2) with the symmetric normalization
// integral |chi|^2 dx1 dx2, the emitter+photon amplitudes phi_a/phi_c,
// and the doubly excited amplitudes E_AC (atom+cavity) and E_2C (two
// cavity photons).
struct TwoPhotonState {
    Eigen::MatrixXcd chi; // row index = x1, column = x2
    Eigen::VectorXcd phi_a;
    Eigen::VectorXcd phi_c;
    std::complex<double> e_ac{0.0, 0.0};
    std::complex<double> e_2c{0.0, 0.0};

    double stored_population(double dx) const {
        return (phi_a.squaredNorm() + phi_c.squaredNorm()) * dx
               + std::norm(e_ac) + std::norm(e_2c);
    }
    double waveguide_population(double dx) const {
        return chi.squaredNorm() * dx * dx;
    }
    double norm(double dx) const {
        return waveguide_population(dx) + stored_population(dx);
    }
};

// Free two-photon wavepacket on a grid; unit norm, symmetric, supported
// at x1,x2 < 0 for inputs (x1,x2 > 0 for extracted outgoing states).
struct TwoPhotonPulse {
    Eigen::MatrixXcd chi;
    GridSpec grid;
    double residual_discarded = 0.0;
};

// Symmetrized product of two Gaussian single-photon pulses, zeroed at
// x >= 0 and normalized. Throws SupportViolation if nothing remains.
TwoPhotonPulse build_gaussian_two_photon(const PulseSpec &a, const PulseSpec &b,
                                         const GridSpec &grid);

struct TwoPhotonOptions {
    double omega_ref = std::numeric_limits<double>::quiet_NaN();
    double sample_interval = 0.0;        // 0 -> 0.25 / gamma_unit
    double symmetry_audit_interval = 0.0; // 0 -> 2 / gamma_unit
    bool check_boundary = true;

    // optional early stop once P_EE settles (relative change over
    // `steady_window` below `steady_rel_tol`, no earlier than steady_t_min)
    bool steady_stop = false;
    double steady_window = 0.0; // 0 -> 2 / gamma_unit
    double steady_rel_tol = 1e-4;
    double steady_t_min = 0.0;
};

struct TwoPhotonRunResult {
    Trajectory traj; // t_gamma, p_atom, p_cav, p_wg2, e_ac2, e_2c2, p_ee, norm
    TwoPhotonState final_state;
    bool steady = false;
    double t_steady = 0.0;
    double t_end = 0.0;
};

// Two-excitation dynamics with dt = dx: chi shifts one cell along both
// axes per step (exact free transport), then the coupling row/column and
// the local amplitudes advance with the exact local propagator. Bosonic
// symmetry is preserved by construction and audited during the run.
TwoPhotonRunResult evolve_two_photon(const SystemParams &params,
                                     const GridSpec &grid, TwoPhotonState state,
                                     double t_final,
                                     const TwoPhotonOptions &opts = {});

// EE occupation probability
// integral |V_C phi_a - V_A phi_c|^2 dx / (V_A^2 + V_C^2).
double p_ee(const TwoPhotonState &state, const SystemParams &params,
            const GridSpec &grid);

// State with one photon trapped in the EE and a free photon F(x)
// impinging: phi_a = A_EE F, phi_c = C_EE F, chi = 0. F must be unit norm
// and supported at x < 0.
TwoPhotonState make_release_state(const SystemParams &params,
                                  const Eigen::VectorXcd &f,
                                  const GridSpec &grid);

// Outgoing two-photon part of a post-release state, normalized; throws
// ResidualTooLarge when the stored population exceeds the threshold.
TwoPhotonPulse extract_outgoing(const TwoPhotonState &state,
                                const GridSpec &grid,
                                double residual_threshold = 0.05);

// chi'(x1,x2) = conj(chi(-x1,-x2)): mirrors an outgoing packet into the
// incoming pulse that retraces the dynamics.
TwoPhotonPulse time_reverse(const TwoPhotonPulse &pulse);

// Fraction of the pulse norm within |x1 - x2| < window.
double bunching_weight(const TwoPhotonPulse &pulse, double window);

// Binary grid file ("EE2P"): u16 version, u32 M, f64 dx, f64 x0, f64 t,
// then M^2 little-endian (re, im) f64 pairs, row-major in x1.
void write_ee2p(const std::string &path, const TwoPhotonPulse &pulse, double t);
struct Ee2pFile {
    TwoPhotonPulse pulse;
    double t = 0.0;
};
Ee2pFile read_ee2p(const std::string &path);

} // namespace eesim

#endif
