#ifndef EESIM_PROTOCOLS_HPP
#define EESIM_PROTOCOLS_HPP

#include <optional>
#include <string>
#include <vector>

#include "eesim/params.hpp"
#include "eesim/trajectory.hpp"
#include "eesim/twophoton.hpp"

namespace eesim {

// Worker count for sweep execution: explicit argument, else EESIM_WORKERS,
// else hardware concurrency.
int default_workers();

struct TrapOptions {
    double dx_gamma = 0.05;
    double t_max_gamma = 60.0;  // NoSteadyState beyond this
    double settle_after_arrival_gamma = 10.0;
    bool keep_trajectory = false;
};

struct TrapOutcome {
    double p_ee_inf = 0.0;
    double t_steady_gamma = 0.0;
    Trajectory traj; // only when keep_trajectory
};

// Evolves the two-photon input until P_EE settles; requires the
// interference condition to |residual| < 1e-9.
TrapOutcome trap_efficiency(const SystemParams &params,
                            const TwoPhotonPulse &pulse,
                            const TrapOptions &opts = {});

// Gaussian two-photon input for a trapping run; center defaults to
// -max(5, 3 sigma)/Gamma and the carrier to the bright frequency. The
// grid is sized for t_max.
struct GaussianTrapInput {
    TwoPhotonPulse pulse;
    double x_center = 0.0;
    double carrier = 0.0;
};
GaussianTrapInput make_gaussian_trap_input(const SystemParams &params,
                                           double sigma_gamma,
                                           double carrier_abs,
                                           const TrapOptions &opts = {});

struct SweepAxis {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    int n = 17;
    bool log_scale = false;

    double value(int i) const;
};

struct SweepSpec {
    SystemParams base;   // omega_a, omega_c, v_a fixed; v_c/J per point
    SweepAxis row;
    SweepAxis col;
    double j_mask_factor = 0.1; // mask J > factor*(omega_c+omega_a)/2
    double dx_gamma = 0.05;
    double t_max_gamma = 60.0;
    int workers = 0;
};

struct SweepPoint {
    double row_value = 0.0;
    double col_value = 0.0;
    double p_ee = 0.0;
    bool masked = false;
    std::string mask_reason;
    double j_used = 0.0;
    double t_steady_gamma = 0.0;
};

struct OverlayLine {
    std::string label;
    double value;
};

struct SweepResult {
    SweepAxis row;
    SweepAxis col;
    std::vector<SweepPoint> points; // row-major
    std::vector<OverlayLine> overlays;

    const SweepPoint &at(int i, int j) const { return points[i * col.n + j]; }
    SweepPoint argmax() const;
    void write_csv(std::ostream &os) const;
    void write_csv_file(const std::string &path) const;
};

// Default axes reproduce the published sweeps: V_C/V_A in [0.1, 0.9]
// (linear) or k in omega_B + Gamma*[-4.5, 1.5], against sigma*Gamma in
// [0.2, 5] (log, so sigma*Gamma = 1 is a grid point).
SweepSpec default_vc_sigma_spec(const SystemParams &base);
SweepSpec default_k_sigma_spec(const SystemParams &base);

// P_EE(inf) versus V_C/V_A and sigma, J solved per point, with the
// strong-coupling mask applied.
SweepResult sweep_vc_sigma(const SweepSpec &spec);

// P_EE(inf) versus carrier and sigma at fixed V_C/V_A, with overlay
// annotations for the bright line and the two-excitation candidates.
SweepResult sweep_k_sigma(const SweepSpec &spec);

struct LossBranch {
    double gamma_prime_ratio = 0.0; // Gamma'_C / Gamma_C
    Trajectory full;
    Trajectory reference;
    double fitted_decay_full = 0.0;     // from P_EE(t), post-pulse
    double predicted_decay_full = 0.0;  // 2 Gamma'_C V_A^2/(V_A^2+V_C^2)
    double fitted_decay_ref = 0.0;      // from reference cavity population
    double predicted_decay_ref = 0.0;   // 2 (gamma_C + Gamma'_C)
    double peak_pop_full = 0.0;
    double peak_pop_ref = 0.0;
    double peak_rate_full = 0.0; // max d(p_cav)/dt, the excitation rate
    double peak_rate_ref = 0.0;
};

struct LossComparison {
    std::vector<LossBranch> branches;
};

// Two-photon excitation of the lossy system at the interference
// condition versus a bare cavity with the same Gamma_C, Gamma'_C and the
// same input pulse.
LossComparison loss_comparison(const SystemParams &params,
                               const std::vector<double> &gamma_prime_ratios,
                               double dx_gamma = 0.05,
                               double t_final_gamma = 40.0);

struct ReleaseOutcome {
    double sigma_gamma = 0.0;
    double residual_stored = 0.0;
    double p_ee_residual = 0.0;
};

struct ReleaseReport {
    std::vector<ReleaseOutcome> outcomes;
    double best_sigma_gamma = 0.0;
    bool monotone = true;
};

// Release run: photon trapped in the EE, Gaussian single photon of the
// given width impinges; returns the final state and the residual.
struct ReleaseRun {
    TwoPhotonState final_state;
    GridSpec grid;
    double residual_stored = 0.0;
    double p_ee_residual = 0.0;
    Eigen::VectorXcd pulse; // the single-photon input F
    Trajectory traj;
};
ReleaseRun release_run(const SystemParams &params, double sigma_gamma,
                       double dx_gamma = 0.05);

// Runs release for each width and returns the first one meeting the
// residual target; throws TargetNotMet when none does.
ReleaseReport optimize_release_pulse(const SystemParams &params,
                                     const std::vector<double> &sigmas_gamma,
                                     double target_residual = 0.03,
                                     double dx_gamma = 0.05);

struct PipelineResult {
    double release_residual = 0.0;
    double final_p_ee = 0.0;
    double t_steady_gamma = 0.0;
    double bunching_reversed = 0.0; // weight within |x1-x2| < sigma
    double bunching_gaussian = 0.0; // same for the Gaussian product input
    TwoPhotonPulse reversed_input;
    std::vector<std::string> artifacts;
};

// release -> extract -> time-reverse -> trap; persists the intermediate
// grids into artifact_dir when given.
PipelineResult optimal_trap_pipeline(const SystemParams &params,
                                     double sigma_release_gamma = 5.0,
                                     double dx_gamma = 0.05,
                                     const std::optional<std::string>
                                         &artifact_dir = std::nullopt);

} // namespace eesim

#endif
