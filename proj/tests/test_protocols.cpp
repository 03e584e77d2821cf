#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "eesim/errors.hpp"
#include "eesim/params.hpp"
#include "eesim/protocols.hpp"
#include "eesim/spectrum.hpp"

using namespace eesim;

TEST_CASE("default sweep axes hit the published grid points") {
    const SystemParams p = fig1_params();
    const SweepSpec ks = default_k_sigma_spec(p);
    // the carrier axis contains the bright line exactly
    CHECK(ks.row.value(12) == doctest::Approx(bright_frequency(p)).epsilon(1e-12));
    // the log sigma axis contains sigma*Gamma = 1 exactly
    CHECK(ks.col.value(8) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ks.col.value(0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(ks.col.value(16) == doctest::Approx(5.0).epsilon(1e-12));

    const SweepSpec vs = default_vc_sigma_spec(p);
    CHECK(vs.row.value(8) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("trap efficiency edge cases") {
    SystemParams off_condition = fig1_params();
    off_condition.j_coupling *= 1.5;
    TwoPhotonPulse dummy;
    CHECK_THROWS_AS(trap_efficiency(off_condition, dummy), InvalidParams);

    const SystemParams p = fig1_params();
    TrapOptions topts;
    topts.dx_gamma = 0.1;
    GaussianTrapInput input =
        make_gaussian_trap_input(p, 1.0, bright_frequency(p), topts);
    input.pulse.chi.setZero();
    const TrapOutcome zero = trap_efficiency(p, input.pulse, topts);
    CHECK(zero.p_ee_inf == 0.0);
}

TEST_CASE("headline trapping value at coarse resolution") {
    const SystemParams p = fig1_params();
    TrapOptions topts;
    topts.dx_gamma = 0.1;
    const GaussianTrapInput input =
        make_gaussian_trap_input(p, 1.0, bright_frequency(p), topts);
    const TrapOutcome outcome = trap_efficiency(p, input.pulse, topts);
    CHECK(outcome.p_ee_inf == doctest::Approx(0.5).epsilon(0.12));
    CHECK(outcome.t_steady_gamma > 10.0);
}

TEST_CASE("strong-coupling mask matches the solved J exactly") {
    const SystemParams base = fig1_params();
    SweepSpec spec = default_vc_sigma_spec(base);
    spec.col.n = 1;
    spec.col.min = spec.col.max = 1.0;
    spec.dx_gamma = 0.1;
    const SweepResult res = sweep_vc_sigma(spec);
    REQUIRE(static_cast<int>(res.points.size()) == spec.row.n);
    const double j_limit = 0.1 * 0.5 * (base.omega_c + base.omega_a);
    for (int i = 0; i < spec.row.n; ++i) {
        SystemParams q = base;
        q.v_c = spec.row.value(i) * q.v_a;
        const double j = solve_j_for_ee(q);
        const SweepPoint &pt = res.at(i, 0);
        CHECK(pt.masked == (j > j_limit));
        if (pt.masked)
            CHECK(pt.mask_reason == "J exceeds 0.1*(omega_c+omega_a)/2");
        else
            CHECK(pt.j_used == doctest::Approx(j).epsilon(1e-15));
    }
}

TEST_CASE("sweeps are deterministic across reruns and worker counts") {
    SweepSpec spec = default_vc_sigma_spec(fig1_params());
    spec.row.n = 3;
    spec.row.min = 0.4;
    spec.row.max = 0.6;
    spec.col.n = 2;
    spec.col.min = 0.7;
    spec.col.max = 1.4;
    spec.dx_gamma = 0.15;

    spec.workers = 1;
    const SweepResult a = sweep_vc_sigma(spec);
    spec.workers = 2;
    const SweepResult b = sweep_vc_sigma(spec);
    std::ostringstream sa, sb;
    a.write_csv(sa);
    b.write_csv(sb);
    CHECK(sa.str() == sb.str());

    const SweepResult c = sweep_vc_sigma(spec);
    std::ostringstream sc;
    c.write_csv(sc);
    CHECK(sb.str() == sc.str());
}

TEST_CASE("release residual shrinks with pulse width") {
    const SystemParams p = fig1_params();
    const ReleaseRun narrow = release_run(p, 1.0, 0.1);
    const ReleaseRun wide = release_run(p, 3.0, 0.1);
    CHECK(narrow.residual_stored < 0.08);
    CHECK(wide.residual_stored < narrow.residual_stored);
    CHECK(narrow.p_ee_residual <= narrow.residual_stored + 1e-12);

    CHECK_THROWS_AS(optimize_release_pulse(p, {0.5}, 1e-6, 0.15),
                    TargetNotMet);
}

TEST_CASE("loss comparison fits the eigenvalue rates") {
    const SystemParams p = fig1_params();
    const LossComparison cmp = loss_comparison(p, {0.2}, 0.1, 35.0);
    REQUIRE(cmp.branches.size() == 1);
    const LossBranch &b = cmp.branches.front();
    CHECK(b.fitted_decay_full
          == doctest::Approx(b.predicted_decay_full).epsilon(0.05));
    CHECK(b.fitted_decay_ref
          == doctest::Approx(b.predicted_decay_ref).epsilon(0.05));
    CHECK(b.fitted_decay_full < 0.5 * b.fitted_decay_ref);
    CHECK(b.peak_rate_full > 0.0);
    CHECK(b.peak_rate_ref > 0.0);
}

TEST_CASE("pipeline at coarse resolution retraces the release") {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    const PipelineResult res = optimal_trap_pipeline(p, 5.0, 0.1);
    CHECK(res.release_residual < 0.04);
    CHECK(res.final_p_ee > 0.93);
    // spatial bunching of the optimal input
    CHECK(res.bunching_reversed > res.bunching_gaussian);

    // time-reversal symmetry: the trapped run's stored photon profile
    // retraces the original release pulse, mirrored and conjugated
    const ReleaseRun rel = release_run(p, 5.0, 0.1);
    TwoPhotonState trap_state;
    trap_state.chi = res.reversed_input.chi;
    trap_state.phi_a = Eigen::VectorXcd::Zero(rel.grid.n_cells);
    trap_state.phi_c = Eigen::VectorXcd::Zero(rel.grid.n_cells);
    TwoPhotonOptions evo;
    const double t_run = res.t_steady_gamma / gamma;
    const TwoPhotonRunResult trapped = evolve_two_photon(
        p, rel.grid, std::move(trap_state), t_run, evo);
    const EEAmplitudes ee = ee_state(p);
    Eigen::VectorXcd stored_photon =
        ee.atom * trapped.final_state.phi_a
        + ee.cavity * trapped.final_state.phi_c;
    stored_photon /= std::sqrt(stored_photon.squaredNorm() * rel.grid.dx);
    const int j0 = rel.grid.coupling_index;
    std::complex<double> overlap = 0.0;
    for (int i = 0; i < rel.grid.n_cells; ++i) {
        const int mi = 2 * j0 - i;
        if (mi >= 0 && mi < rel.grid.n_cells)
            overlap += std::conj(stored_photon[i])
                       * std::conj(rel.pulse[mi]) * rel.grid.dx;
    }
    CHECK(std::norm(overlap) > 0.9);

    // repeating the release yields outgoing radiation that overlaps the
    // pipeline input after mirroring
    const TwoPhotonPulse again =
        time_reverse(extract_outgoing(rel.final_state, rel.grid));
    std::complex<double> chi_overlap = 0.0;
    for (int j = 0; j < rel.grid.n_cells; ++j)
        for (int k = 0; k < rel.grid.n_cells; ++k)
            chi_overlap += std::conj(again.chi(j, k))
                           * res.reversed_input.chi(j, k);
    chi_overlap *= rel.grid.dx * rel.grid.dx;
    CHECK(std::norm(chi_overlap) > 0.9);
}
