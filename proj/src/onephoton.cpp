#include "eesim/onephoton.hpp"

#include <cmath>

#include "eesim/errors.hpp"
#include "eesim/spectrum.hpp"
#include "engine_common.hpp"

namespace eesim {

using detail::cplx;
using detail::Ring1D;

namespace {

double resolve_omega_ref(const SystemParams &p, double requested) {
    if (std::isnan(requested))
        return (p.v_a != 0.0 || p.v_c != 0.0) ? ee_frequency(p) : p.omega_c;
    return requested;
}

int resolve_sample_stride(const SystemParams &p, double dx, double interval) {
    if (interval <= 0.0) {
        const double g = p.gamma_unit();
        interval = (g > 0.0) ? 0.25 / g : 10.0 * dx;
    }
    return std::max(1, static_cast<int>(std::lround(interval / dx)));
}

void check_edges(const Ring1D &u, int guard, double tol) {
    const int m = u.size();
    for (int i = 0; i < guard; ++i) {
        if (std::abs(u.at(m - 1 - i)) > tol || std::abs(u.at(i)) > tol)
            throw BoundaryReached("waveguide amplitude reached the grid edge");
    }
}

} // namespace

double p_ee_single(const SystemParams &params, const SingleExcState &state) {
    const double v2 = params.v_a * params.v_a + params.v_c * params.v_c;
    if (v2 == 0.0)
        return 0.0;
    return std::norm(params.v_c * state.e_a - params.v_a * state.e_c) / v2;
}

SingleRunResult evolve_single(const SystemParams &params, const GridSpec &grid,
                              SingleExcState state, double t_final,
                              const EvolveOptions &opts) {
    params.validate();
    grid.validate();
    if (state.xi.size() != grid.n_cells)
        throw InvalidParams("state size does not match the grid");

    const int m = grid.n_cells;
    const int j0 = grid.coupling_index;
    const double dx = grid.dx;
    const double dt = dx;
    const double omega_ref = resolve_omega_ref(params, opts.omega_ref);
    const double gamma = params.gamma_unit();
    const double sdx = std::sqrt(dx);

    const Eigen::Matrix3cd p3 =
        detail::step_propagator(detail::local_block3(params, dx, omega_ref), dt);

    Ring1D u(m);
    for (int i = 0; i < m; ++i)
        u.at(i) = state.xi[i] * sdx;
    cplx ea = state.e_a;
    cplx ec = state.e_c;

    const int n_steps = static_cast<int>(std::lround(t_final / dt));
    const int stride = resolve_sample_stride(params, dx, opts.sample_interval);

    Trajectory traj;
    traj.columns = {"t", "t_gamma", "pop_atom", "pop_cavity",
                    "pop_waveguide", "p_ee", "norm"};
    const double v2 = params.v_a * params.v_a + params.v_c * params.v_c;
    auto sample = [&](double t) {
        const double pa = std::norm(ea);
        const double pc = std::norm(ec);
        const double pw = u.squared_norm();
        const double pee =
            v2 > 0 ? std::norm(params.v_c * ea - params.v_a * ec) / v2 : 0.0;
        traj.rows.push_back({t, t * gamma, pa, pc, pw, pee, pa + pc + pw});
    };
    sample(0.0);

    for (int n = 1; n <= n_steps; ++n) {
        u.shift_and_zero();
        cplx &uj = u.at(j0);
        const cplx u1 = p3(0, 0) * uj + p3(0, 1) * ea + p3(0, 2) * ec;
        const cplx a1 = p3(1, 0) * uj + p3(1, 1) * ea + p3(1, 2) * ec;
        const cplx c1 = p3(2, 0) * uj + p3(2, 1) * ea + p3(2, 2) * ec;
        uj = u1;
        ea = a1;
        ec = c1;

        if (opts.check_boundary && n % 8 == 0 && n != n_steps)
            check_edges(u, 8, 1e-8);
        if (n % stride == 0 || n == n_steps)
            sample(n * dt);
    }

    SingleRunResult out;
    out.traj = std::move(traj);
    out.traj.meta["omega_ref"] = std::to_string(omega_ref);
    out.final_state.xi.resize(m);
    for (int i = 0; i < m; ++i)
        out.final_state.xi[i] = u.at(i) / sdx;
    out.final_state.e_a = ea;
    out.final_state.e_c = ec;
    return out;
}

SingleRunResult classical_two_cavity(const SystemParams &params,
                                     const GridSpec &grid,
                                     const PulseSpec &pulse, double t_final,
                                     const EvolveOptions &opts) {
    SingleExcState state;
    state.xi = input_pulse(pulse, grid);
    SingleRunResult res = evolve_single(params, grid, state, t_final, opts);
    res.traj.meta["system"] = "two-cavity";
    res.traj.meta["note"] = "pop_atom is cavity 1, pop_cavity is cavity 2";
    return res;
}

} // namespace eesim
