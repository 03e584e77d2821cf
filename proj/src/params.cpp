#include "eesim/params.hpp"

#include "eesim/errors.hpp"
#include "eesim/spectrum.hpp"

namespace eesim {

void SystemParams::validate() const {
    if (v_c < 0 || v_a < 0)
        throw InvalidParams("waveguide couplings must be non-negative");
    if (gamma_prime_c < 0 || gamma_prime_a < 0)
        throw InvalidParams("intrinsic losses must be non-negative");
}

void SystemParams::validate_for_dynamics() const {
    validate();
    if (v_c == 0 && v_a == 0)
        throw InvalidParams("at least one waveguide coupling must be nonzero");
}

void ThreeModeParams::validate() const {
    if (v_1 < 0 || v_2 < 0)
        throw InvalidParams("waveguide couplings must be non-negative");
    if (gamma_prime_1 < 0 || gamma_prime_2 < 0 || gamma_prime_a < 0)
        throw InvalidParams("intrinsic losses must be non-negative");
}

SystemParams fig1_params() {
    SystemParams p;
    p.omega_a = 1.0;
    p.omega_c = 0.96;
    p.v_a = std::sqrt(0.01);
    p.v_c = 0.5 * p.v_a;
    p.j_coupling = solve_j_for_ee(p);
    return p;
}

ThreeModeParams fig4c_params() {
    ThreeModeParams p;
    p.omega_1 = 1.0;
    p.omega_2 = 0.96;
    p.omega_a = 1.0;
    p.v_1 = std::sqrt(0.01);
    p.v_2 = 0.5 * p.v_1;
    p.j_coupling = 0.003;
    p.g_coupling = solve_g_for_three_mode_ee(p);
    return p;
}

} // namespace eesim
