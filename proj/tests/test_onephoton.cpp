#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "eesim/errors.hpp"
#include "eesim/grid.hpp"
#include "eesim/onephoton.hpp"
#include "eesim/params.hpp"
#include "eesim/spectrum.hpp"

using namespace eesim;

namespace {

SingleExcState pulse_state(const PulseSpec &spec, const GridSpec &g) {
    SingleExcState st;
    st.xi = input_pulse(spec, g);
    return st;
}

} // namespace

TEST_CASE("free transport is an exact shift and emitters stay closed") {
    SystemParams off;
    off.omega_a = 1.0;
    off.omega_c = 0.9;
    off.j_coupling = 0.04;
    // couplings off: photon translates rigidly, (e_a, e_c) is a closed
    // two-level system
    const GridSpec g = GridSpec::make(40.0, 40.0, 1.0);
    PulseSpec spec;
    spec.center = -20.0;
    spec.width = 3.0;
    spec.carrier = 0.4;
    SingleExcState st = pulse_state(spec, g);
    st.xi *= std::sqrt(0.5);
    st.e_a = 0.5;
    st.e_c = std::complex<double>(0.0, 0.5);
    const Eigen::VectorXcd xi0 = st.xi;
    const Eigen::Vector2cd e0(st.e_a, st.e_c);

    EvolveOptions opts;
    opts.omega_ref = 0.95;
    opts.check_boundary = false;
    const int n = 13;
    const SingleRunResult run =
        evolve_single(off, g, std::move(st), n * g.dx, opts);

    for (int i = 0; i < g.n_cells; ++i) {
        const std::complex<double> want =
            (i >= n) ? xi0[i - n] : std::complex<double>(0.0, 0.0);
        CHECK(run.final_state.xi[i] == want); // bitwise
    }
    Eigen::Matrix2cd h2;
    h2 << off.omega_a - opts.omega_ref, off.j_coupling, off.j_coupling,
        off.omega_c - opts.omega_ref;
    const Eigen::Vector2cd want =
        (std::complex<double>(0, -1) * h2 * (n * g.dx)).exp() * e0;
    CHECK(std::abs(run.final_state.e_a - want[0]) < 1e-12);
    CHECK(std::abs(run.final_state.e_c - want[1]) < 1e-12);
}

TEST_CASE("single-mode decay matches the Wigner-Weisskopf rate") {
    SystemParams p;
    p.omega_c = 0.96;
    p.v_c = 0.05;
    const double gamma = p.gamma_unit();
    const double dx = 0.02 / gamma;
    const double t_final = 60.0;
    const GridSpec g = GridSpec::make(8 * dx + 2.0, t_final + 8 * dx + 2.0, dx);
    SingleExcState st;
    st.xi = Eigen::VectorXcd::Zero(g.n_cells);
    st.e_c = 1.0;
    EvolveOptions opts;
    opts.omega_ref = p.omega_c;
    const SingleRunResult run = evolve_single(p, g, std::move(st), t_final, opts);

    const int ct = run.traj.col("t");
    const int cc = run.traj.col("pop_cavity");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto &r : run.traj.rows) {
        if (r[ct] <= 0 || r[cc] < 1e-12)
            continue;
        sx += r[ct];
        sy += std::log(r[cc]);
        sxx += r[ct] * r[ct];
        sxy += r[ct] * std::log(r[cc]);
        ++n;
    }
    const double rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(rate == doctest::Approx(2.0 * p.gamma_c()).epsilon(0.02));
}

TEST_CASE("norm conservation and single-photon transparency") {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    const GridSpec g = GridSpec::make(13.0 / gamma, 22.0 / gamma, 0.02 / gamma);
    PulseSpec spec;
    spec.center = -5.0 / gamma;
    spec.width = 1.0 / gamma;
    spec.carrier = 0.0; // at the EE frequency in the EE rotating frame
    const double t_final = 20.0 / gamma;
    const SingleRunResult run =
        evolve_single(p, g, pulse_state(spec, g), t_final);

    const int cn = run.traj.col("norm");
    const int ca = run.traj.col("pop_atom");
    const int cc = run.traj.col("pop_cavity");
    const int ct = run.traj.col("t_gamma");
    double drift = 0.0, peak = 0.0, post = 0.0;
    const double t_pulse = 5.0 + 3.0; // center arrival + trailing 3 sigma
    for (const auto &r : run.traj.rows) {
        drift = std::max(drift, std::abs(r[cn] - 1.0));
        peak = std::max(peak, r[ca] + r[cc]);
        if (r[ct] > t_pulse + 10.0)
            post = std::max(post, r[ca] + r[cc]);
    }
    CHECK(drift < 1e-6);
    CHECK(peak > 1e-3);
    CHECK(post < 1e-2 * peak); // transparency
}

TEST_CASE("classical two-cavity transient and off-resonant suppression") {
    const SystemParams p = fig1_params(); // atom slot read as cavity 1
    const double gamma = p.gamma_unit();
    const GridSpec g = GridSpec::make(13.0 / gamma, 22.0 / gamma, 0.02 / gamma);
    PulseSpec res;
    res.center = -5.0 / gamma;
    res.width = 1.0 / gamma;
    res.carrier = bright_frequency(p) - ee_frequency(p);
    const SingleRunResult on =
        classical_two_cavity(p, g, res, 20.0 / gamma);

    double peak = 0.0, post = 0.0;
    const int ca = on.traj.col("pop_atom");
    const int cc = on.traj.col("pop_cavity");
    const int ct = on.traj.col("t_gamma");
    for (const auto &r : on.traj.rows) {
        peak = std::max(peak, r[ca] + r[cc]);
        if (r[ct] > 18.0)
            post = std::max(post, r[ca] + r[cc]);
    }
    CHECK(post < 1e-2 * peak);

    PulseSpec far = res;
    far.carrier = res.carrier + 12.0 * gamma;
    const SingleRunResult offres =
        classical_two_cavity(p, g, far, 20.0 / gamma);
    double peak_off = 0.0;
    for (const auto &r : offres.traj.rows)
        peak_off = std::max(peak_off, r[ca] + r[cc]);
    CHECK(peak_off * 10.0 < peak);

    SystemParams lone = p;
    lone.j_coupling = 0.0;
    lone.v_c = 0.0;
    const SingleRunResult never =
        classical_two_cavity(lone, g, res, 10.0 / gamma);
    CHECK(never.traj.max_of("pop_cavity") == 0.0);
}

TEST_CASE("boundary guard") {
    SystemParams off;
    off.omega_c = 1.0;
    const GridSpec g = GridSpec::make(23.0, 12.0, 1.0);
    PulseSpec spec;
    spec.center = -12.0;
    spec.width = 2.0;
    SingleExcState st = pulse_state(spec, g);
    CHECK_THROWS_AS(evolve_single(off, g, std::move(st), 30.0), BoundaryReached);
}
