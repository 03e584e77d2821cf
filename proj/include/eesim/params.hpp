#ifndef EESIM_PARAMS_HPP
#define EESIM_PARAMS_HPP

#include <cmath>

namespace eesim {

// Cavity-atom system coupled to a 1D waveguide at x=0 (v_g = 1).
// Frequencies are in units of omega_ref, waveguide couplings in
// sqrt(omega_ref). The same record describes the classical two-cavity
// system with the atom slot read as "cavity 1".
//
// Decay conventions used throughout:
//   gamma_i    = 2*pi*V_i^2            amplitude decay of mode i
//   gamma_unit = pi*(V_A^2 + V_C^2)    the reporting unit "Gamma" for
//                                      time axes (t*Gamma) and widths
//                                      (sigma*Gamma)
struct SystemParams {
    double omega_c = 1.0;
    double omega_a = 1.0;
    double j_coupling = 0.0;
    double v_c = 0.0;
    double v_a = 0.0;
    double gamma_prime_c = 0.0;
    double gamma_prime_a = 0.0;

    double gamma_c() const { return 2.0 * M_PI * v_c * v_c; }
    double gamma_a() const { return 2.0 * M_PI * v_a * v_a; }
    double gamma_unit() const { return M_PI * (v_a * v_a + v_c * v_c); }

    void validate() const;
    void validate_for_dynamics() const;
};

// Two cavities on the waveguide, atom inside cavity 1 with coupling g.
// The atom has no direct waveguide coupling.
struct ThreeModeParams {
    double omega_1 = 1.0;
    double omega_2 = 1.0;
    double omega_a = 1.0;
    double j_coupling = 0.0;
    double g_coupling = 0.0;
    double v_1 = 0.0;
    double v_2 = 0.0;
    double gamma_prime_1 = 0.0;
    double gamma_prime_2 = 0.0;
    double gamma_prime_a = 0.0;

    double gamma_1() const { return 2.0 * M_PI * v_1 * v_1; }
    double gamma_2() const { return 2.0 * M_PI * v_2 * v_2; }
    double gamma_unit() const { return M_PI * (v_1 * v_1 + v_2 * v_2); }

    void validate() const;
};

// Fig. 1 caption parameters with J solved for the interference condition;
// the baseline for most runs in this project.
SystemParams fig1_params();

// Fig. 4c caption parameters with g solved for the three-mode condition.
ThreeModeParams fig4c_params();

} // namespace eesim

#endif
