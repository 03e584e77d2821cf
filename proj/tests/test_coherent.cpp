#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eesim/coherent.hpp"
#include "eesim/errors.hpp"
#include "eesim/params.hpp"
#include "eesim/spectrum.hpp"

using namespace eesim;

TEST_CASE("drive envelope carries the stated photon number") {
    DriveEnvelope d;
    d.mean_n = 2.0;
    d.sigma_t = 25.0;
    d.t0 = 125.0;
    d.detuning = 0.01;
    const double integral = d.integrated_photon_number(500.0, 0.05);
    CHECK(integral == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(FockSpaceSpec::auto_cutoff(2.0) == 10);
}

TEST_CASE("generator structure") {
    SystemParams p = fig1_params();
    const LindbladGenerator gen = build_generator(p, 4);
    CHECK(gen.dim == 10);

    // the collective port annihilates the single-photon EE
    CHECK((gen.port * gen.ee_vector).norm() < 1e-15);

    // V_A = 0: the port acts on the cavity only; the atom decays via J
    SystemParams cavity_only = p;
    cavity_only.v_a = 0.0;
    const LindbladGenerator gc = build_generator(cavity_only, 4);
    // |g,1> -> |g,0> allowed, |e,0> -> |g,0> forbidden
    Eigen::VectorXcd atom_exc = Eigen::VectorXcd::Zero(gc.dim);
    atom_exc[5] = 1.0; // atom=1, n=0 with nf=5
    CHECK((gc.port * atom_exc).norm() == 0.0);

    // three-mode port has no atom component
    const ThreeModeParams t = fig4c_params();
    const LindbladGenerator g3 = build_generator(t, 2);
    Eigen::VectorXcd atom3 = Eigen::VectorXcd::Zero(g3.dim);
    atom3[g3.dim / 2] = 1.0; // atom=1, n1=n2=0
    CHECK((g3.port * atom3).norm() == 0.0);
    CHECK(g3.ee_vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g3.ee_vector2.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("undriven ground state stays dark") {
    const SystemParams p = fig1_params();
    const LindbladGenerator gen = build_generator(p, 3);
    DriveEnvelope d;
    d.mean_n = 0.0;
    d.sigma_t = 10.0;
    d.t0 = 50.0;
    MasterOptions opts;
    opts.gamma_unit = p.gamma_unit();
    const MasterRunResult run = evolve_master(gen, d, 200.0, opts);
    CHECK(run.traj.max_of("n_cavity") == 0.0);
    CHECK(run.traj.max_of("p_atom") == 0.0);
    CHECK(run.traj.max_of("p_ee") == 0.0);
}

TEST_CASE("coherent trapping run reaches a steady EE population") {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    const LindbladGenerator gen = build_generator(p, 8);
    DriveEnvelope d;
    d.mean_n = 2.0;
    d.sigma_t = 1.0 / gamma;
    d.t0 = 5.0 / gamma;
    MasterOptions opts;
    opts.gamma_unit = gamma;
    opts.check_positivity = true;
    const MasterRunResult run = evolve_master(gen, d, 40.0 / gamma, opts);

    const double pee = run.traj.last("p_ee");
    CHECK(pee > 0.05);
    // trace preserved at every sample
    CHECK(run.traj.max_of("trace_err") < 1e-8);
    CHECK(run.traj.max_of("tail_pop") < 1e-6);
    // population balance approaches the EE weights
    const double ratio = run.traj.last("p_atom") / run.traj.last("n_cavity");
    CHECK(ratio == doctest::Approx(0.25).epsilon(0.10));
}

TEST_CASE("linear response leaves no trapped population") {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    const LindbladGenerator gen = build_generator(p, 3);
    DriveEnvelope d;
    d.mean_n = 1e-4;
    d.sigma_t = 1.0 / gamma;
    d.t0 = 5.0 / gamma;
    MasterOptions opts;
    opts.gamma_unit = gamma;
    const MasterRunResult run = evolve_master(gen, d, 30.0 / gamma, opts);
    CHECK(run.traj.last("p_ee") < 1e-6);
}

TEST_CASE("observables are stable against the Fock cutoff") {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    DriveEnvelope d;
    d.mean_n = 2.0;
    d.sigma_t = 1.0 / gamma;
    d.t0 = 5.0 / gamma;
    MasterOptions opts;
    opts.gamma_unit = gamma;
    opts.dt = 0.05 / (2.0 * p.gamma_a());
    const MasterRunResult a =
        evolve_master(build_generator(p, 8), d, 25.0 / gamma, opts);
    const MasterRunResult b =
        evolve_master(build_generator(p, 10), d, 25.0 / gamma, opts);
    REQUIRE(a.traj.rows.size() == b.traj.rows.size());
    for (const std::string col : {"n_cavity", "p_atom", "p_ee"}) {
        const int ca = a.traj.col(col);
        const double scale = std::max(a.traj.max_of(col), 1e-12);
        double worst = 0.0;
        for (size_t i = 0; i < a.traj.rows.size(); ++i)
            worst = std::max(worst, std::abs(a.traj.rows[i][ca]
                                             - b.traj.rows[i][ca]));
        CHECK(worst / scale < 1e-4);
    }
}

TEST_CASE("truncation breach is detected") {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    const LindbladGenerator gen = build_generator(p, 1);
    DriveEnvelope d;
    d.mean_n = 4.0;
    d.sigma_t = 1.0 / gamma;
    d.t0 = 5.0 / gamma;
    MasterOptions opts;
    opts.gamma_unit = gamma;
    CHECK_THROWS_AS(evolve_master(gen, d, 20.0 / gamma, opts),
                    TruncationBreach);
}

TEST_CASE("three-mode coherent run traps population in the EEs") {
    const ThreeModeParams p = fig4c_params();
    // reduced cutoff keeps the unit test quick; the full run is in the
    // acceptance suite
    const MasterRunResult run = run_three_mode_coherent(p, 2.0, 25.0, 5);
    const double pee = run.traj.last("p_ee") + run.traj.last("p_ee2");
    CHECK(pee > 0.01);
    CHECK(run.traj.max_of("trace_err") < 1e-7);
}
