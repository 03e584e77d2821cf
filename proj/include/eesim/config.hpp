#ifndef EESIM_CONFIG_HPP
#define EESIM_CONFIG_HPP

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eesim/params.hpp"

namespace eesim {

// Flat typed key-value run description with section headers. Unknown
// sections or keys are rejected with line diagnostics. Widths and
// positions are in 1/Gamma units (Gamma = pi (V_A^2+V_C^2)), frequencies
// in omega_ref units; key names carry the unit suffix.
struct RunConfig {
    struct CfgPulse {
        double sigma_gamma = 1.0;
        // NaN -> -max(5, 3 sigma)/Gamma
        double x_center_gamma = std::numeric_limits<double>::quiet_NaN();
        std::string carrier = "bright"; // bright | ee | <number>
    };

    std::string kind = "cavity-atom"; // cavity-atom | two-cavity | three-mode
    SystemParams sys;
    ThreeModeParams three;
    bool j_from_condition = false;
    bool g_from_condition = false;

    double dx_gamma = 0.05;
    int grid_m = 0;                 // 0 -> auto
    double grid_x0_gamma = std::numeric_limits<double>::quiet_NaN();

    CfgPulse pulse;
    CfgPulse pulse_b;
    bool has_pulse_b = false;

    double mean_n = std::numeric_limits<double>::quiet_NaN();
    double sigma_t_gamma = 1.0;
    double t0_gamma = 5.0;
    std::string drive_carrier = "ee";
    int n_max = 0; // 0 -> auto

    std::string mode;
    std::vector<double> gamma_prime_ratios{0.05, 0.1, 0.2};
    double sigma_release_gamma = 5.0;
    std::vector<double> sigma_list_gamma;

    double t_final_gamma = std::numeric_limits<double>::quiet_NaN();
    double t_max_gamma = 60.0;
    double steady_window_gamma = 2.0;
    double steady_rel_tol = 1e-4;

    std::string directory = "out";
    bool write_grids = true;
};

RunConfig parse_config_text(const std::string &text);
RunConfig parse_config_file(const std::string &path);

// Normalized re-emission; parse(emit(cfg)) is field-identical with cfg.
std::string emit_config(const RunConfig &cfg);

// Derived quantities; solving J or g failures surface as ConfigError.
struct ResolvedRun {
    RunConfig cfg;
    double gamma_unit = 0.0;
    double omega_ee = 0.0;
    double omega_bright = 0.0;
    double bright_amplitude_decay = 0.0;
    double ee_residual = 0.0;
    // three-mode extras
    double eq5_residual = 0.0;
    std::vector<double> heff_eigen_re;
    std::vector<double> heff_eigen_im;
    std::vector<double> two_exc_eigen_re;
    std::vector<double> two_exc_eigen_im;
    double ee_atom_weight = 0.0;
    double ee_cavity_weight = 0.0;
};
ResolvedRun resolve(const RunConfig &cfg);

struct RunArtifacts {
    std::vector<std::string> files;          // paths written (manifest last)
    std::map<std::string, std::string> summary; // key run results
    std::string manifest_path;
};

// Executes the configured experiment into out_dir and writes the run
// manifest; on simulation failure partial outputs are removed.
RunArtifacts execute_run(const ResolvedRun &run, const std::string &out_dir,
                         bool dry_run = false);

// Human-readable spectrum report (the `spectrum` subcommand).
std::string spectrum_report(const ResolvedRun &run);

std::uint64_t fnv1a64_file(const std::string &path);

} // namespace eesim

#endif
