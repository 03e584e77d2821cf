// Acceptance suite: runs every headline result end to end and prints one
// pass/fail line per criterion. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "eesim/coherent.hpp"
#include "eesim/errors.hpp"
#include "eesim/grid.hpp"
#include "eesim/onephoton.hpp"
#include "eesim/params.hpp"
#include "eesim/protocols.hpp"
#include "eesim/spectrum.hpp"
#include "eesim/twophoton.hpp"
#include "eesim/verify.hpp"

using namespace eesim;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string &detail) {
    std::printf("criterion %2d [%s] %s\n", id, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

std::string fmt(const char *pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// 1. EE condition arithmetic at the published parameter point.
void criterion_1() {
    SystemParams p;
    p.omega_a = 1.0;
    p.omega_c = 0.96;
    p.v_a = std::sqrt(0.01);
    p.v_c = 0.5 * p.v_a;
    p.j_coupling = solve_j_for_ee(p);

    const double j_expected = 0.04 * p.v_a * p.v_c / (p.v_a * p.v_a - p.v_c * p.v_c);
    const bool j_ok = std::abs(p.j_coupling - j_expected) < 1e-9
                      && std::abs(p.j_coupling - 0.0266667) < 5e-8;

    const ComplexSpectrum s = spectrum_of(single_excitation_heff(p));
    const double form_a = p.omega_c - p.j_coupling * p.v_c / p.v_a;
    const double form_b = p.omega_a - p.j_coupling * p.v_a / p.v_c;
    const bool ee_ok = std::abs(s.eigenvalues[0].imag()) < 1e-12
                       && std::abs(s.eigenvalues[0].real() - form_a) < 1e-9
                       && std::abs(s.eigenvalues[0].real() - form_b) < 1e-9
                       && std::abs(s.eigenvalues[0].real() - 0.9466667) < 5e-8;

    report(1, j_ok && ee_ok,
           fmt("J = %.10f, Re(lambda_EE) = %.10f, |Im(lambda_EE)| = %.2e",
               p.j_coupling, s.eigenvalues[0].real(),
               std::abs(s.eigenvalues[0].imag())));
}

// 2. Classical transparency: the transient vanishes after the pulse.
void criterion_2() {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    const GridSpec g = GridSpec::make(13.0 / gamma, 24.0 / gamma, 0.02 / gamma);
    PulseSpec spec;
    spec.center = -5.0 / gamma;
    spec.width = 1.0 / gamma;
    spec.carrier = 0.0; // EE carrier in the EE frame
    const SingleRunResult run = classical_two_cavity(p, g, spec, 22.0 / gamma);

    const int ct = run.traj.col("t_gamma");
    const int c1 = run.traj.col("pop_atom");
    const int c2 = run.traj.col("pop_cavity");
    double peak = 0.0, post = 0.0;
    for (const auto &r : run.traj.rows) {
        peak = std::max(peak, r[c1] + r[c2]);
        if (r[ct] > 18.0)
            post = std::max(post, r[c1] + r[c2]);
    }
    report(2, peak > 0.0 && post < 1e-2 * peak,
           fmt("peak stored = %.4e, post-pulse stored = %.4e (ratio %.2e)",
               peak, post, post / peak));
}

// 3. Coherent trapping: steady EE population with the EE balance.
void criterion_3() {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    const LindbladGenerator gen = build_generator(p, 8);
    DriveEnvelope drive;
    drive.mean_n = 2.0;
    drive.sigma_t = 1.0 / gamma;
    drive.t0 = 5.0 / gamma;
    MasterOptions opts;
    opts.gamma_unit = gamma;
    opts.sample_interval = 2.0 / gamma;
    const MasterRunResult run = evolve_master(gen, drive, 80.0 / gamma, opts);

    const double pee = run.traj.last("p_ee");
    const double ratio = run.traj.last("p_atom") / run.traj.last("n_cavity");
    const auto &rows = run.traj.rows;
    const int cp = run.traj.col("p_ee");
    const int ct = run.traj.col("t_gamma");
    const auto &last = rows[rows.size() - 1];
    const auto &prev = rows[rows.size() - 2];
    const double dpdt = std::abs(last[cp] - prev[cp])
                        / ((last[ct] - prev[ct]) / gamma);
    const bool ok = pee > 0.001 && std::abs(ratio - 0.25) <= 0.05 * 0.25
                    && dpdt < 1e-6 * gamma;
    report(3, ok,
           fmt("steady P_EE = %.4f, atom/cavity = %.4f (want 0.25 +- 5%%), "
               "|dP_EE/dt| = %.2e Gamma",
               pee, ratio, dpdt / gamma));
}

// 4. Two-photon trapping headline at M = 1024, stable under dx halving.
void criterion_4() {
    const SystemParams p = fig1_params();
    const double gamma = p.gamma_unit();
    const double carrier = bright_frequency(p);

    auto run_at = [&](int m, double dx_gamma) {
        GridSpec grid;
        grid.n_cells = m;
        grid.dx = dx_gamma / gamma;
        grid.coupling_index = static_cast<int>(std::lround(12.0 / dx_gamma));
        grid.x0 = -grid.coupling_index * grid.dx;
        grid.validate();
        PulseSpec spec;
        spec.center = -5.0 / gamma;
        spec.width = 1.0 / gamma;
        spec.carrier = carrier - ee_frequency(p);
        const TwoPhotonPulse pulse = build_gaussian_two_photon(spec, spec, grid);
        TrapOptions topts;
        topts.dx_gamma = dx_gamma;
        topts.t_max_gamma = 30.0;
        return trap_efficiency(p, pulse, topts).p_ee_inf;
    };

    const double coarse = run_at(1024, 0.05);
    const double fine = run_at(2048, 0.025);
    const bool ok = std::abs(coarse - 0.50) <= 0.05
                    && std::abs(fine - coarse) < 0.01;
    report(4, ok,
           fmt("P_EE(inf) = %.4f at M=1024 (want 0.50 +- 0.05), dx/2 shift "
               "= %.4f",
               coarse, std::abs(fine - coarse)));
}

// 5. Release residuals for sigma*Gamma = 1 and 5.
void criterion_5() {
    const SystemParams p = fig1_params();
    const ReleaseRun narrow = release_run(p, 1.0, 0.05);
    const ReleaseRun wide = release_run(p, 5.0, 0.05);
    const bool ok = narrow.residual_stored < 0.05 && wide.residual_stored < 0.03;
    report(5, ok,
           fmt("residual(sigma=1/Gamma) = %.4f (want < 0.05), "
               "residual(sigma=5/Gamma) = %.4f (want < 0.03)",
               narrow.residual_stored, wide.residual_stored));
}

// 6. Optimal pipeline: time-reversed release traps almost completely, and
//    the optimal input is bunched along x1 = x2.
void criterion_6() {
    const SystemParams p = fig1_params();
    const PipelineResult res = optimal_trap_pipeline(p, 5.0, 0.05);
    const bool ok = res.final_p_ee >= 0.95
                    && res.bunching_reversed > res.bunching_gaussian;
    report(6, ok,
           fmt("pipeline P_EE(inf) = %.4f (want >= 0.95), bunching %.4f vs "
               "gaussian %.4f",
               res.final_p_ee, res.bunching_reversed, res.bunching_gaussian));
}

// 7. Sweep maxima and the strong-coupling mask.
void criterion_7() {
    const SystemParams base = fig1_params();

    const SweepSpec vs = default_vc_sigma_spec(base);
    const SweepResult rv = sweep_vc_sigma(vs);
    const SweepPoint best_v = rv.argmax();
    const bool argmax_v_ok = best_v.row_value >= 0.4 && best_v.row_value <= 0.6;
    const bool argmax_s_ok = best_v.col_value >= 0.5 && best_v.col_value <= 2.0;

    bool mask_ok = true;
    const double j_limit = 0.1 * 0.5 * (base.omega_c + base.omega_a);
    for (int i = 0; i < rv.row.n; ++i) {
        SystemParams q = base;
        q.v_c = rv.row.value(i) * q.v_a;
        const bool want_masked = solve_j_for_ee(q) > j_limit;
        for (int j = 0; j < rv.col.n; ++j)
            if (rv.at(i, j).masked != want_masked)
                mask_ok = false;
    }

    const SweepSpec ks = default_k_sigma_spec(base);
    const SweepResult rk = sweep_k_sigma(ks);
    const SweepPoint best_k = rk.argmax();
    const double gamma = base.gamma_unit();
    const double wb = bright_frequency(base);
    const bool argmax_k_ok = std::abs(best_k.row_value - wb) <= gamma;
    const double headline = rk.at(12, 8).p_ee; // k = w_B, sigma*Gamma = 1
    const bool headline_ok = std::abs(headline - 0.5) <= 0.05;

    report(7,
           argmax_v_ok && argmax_s_ok && mask_ok && argmax_k_ok && headline_ok,
           fmt("argmax V_C/V_A = %.3f (want 0.4..0.6), argmax sigma = %.3f "
               "(want 0.5..2), mask %s, argmax k - w_B = %+.3f Gamma, "
               "headline cell = %.4f",
               best_v.row_value, best_v.col_value,
               mask_ok ? "exact" : "WRONG",
               (best_k.row_value - wb) / gamma, headline));
}

// 8. Loss study: trapped decay follows the eigenvalue rate, stays well
//    below the bare-cavity decay, and the excitation rates agree.
void criterion_8() {
    const SystemParams p = fig1_params();
    const LossComparison cmp = loss_comparison(p, {0.05, 0.1, 0.2}, 0.05);
    bool ok = true;
    std::string detail;
    for (const auto &b : cmp.branches) {
        const double fit_err = std::abs(b.fitted_decay_full
                                        - b.predicted_decay_full)
                               / b.predicted_decay_full;
        const double rate_gap = std::abs(b.peak_rate_full - b.peak_rate_ref)
                                / std::max(b.peak_rate_full, b.peak_rate_ref);
        const bool branch_ok = fit_err <= 0.03
                               && b.fitted_decay_full < 0.5 * b.fitted_decay_ref
                               && rate_gap <= 0.20;
        ok = ok && branch_ok;
        detail += fmt("[r=%.2f: fit err %.1f%%, decay ratio %.3f, rate gap "
                      "%.1f%%] ",
                      b.gamma_prime_ratio, 100 * fit_err,
                      b.fitted_decay_full / b.fitted_decay_ref,
                      100 * rate_gap);
    }
    report(8, ok, detail);
}

// 9. Three-mode EEs: a real eigenvalue at the solved g, and coherent
//    trapping into the EE projections.
void criterion_9() {
    const ThreeModeParams p = fig4c_params();
    const ComplexSpectrum s = spectrum_of(three_mode_heff(p));
    const bool eigen_ok = std::abs(s.eigenvalues[0].imag()) < 1e-10 * p.omega_1;

    const MasterRunResult run = run_three_mode_coherent(p, 2.0, 40.0);
    const double trapped = run.traj.last("p_ee") + run.traj.last("p_ee2");
    const bool ok = eigen_ok && trapped > 0.01;
    report(9, ok,
           fmt("g = %.6f, min |Im lambda| = %.2e, steady P_EE1+P_EE2 = %.4f",
               p.g_coupling, std::abs(s.eigenvalues[0].imag()), trapped));
}

// 10. The oracle suite.
void criterion_10() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = run_verification();
    const double wall = elapsed_since(t0);
    bool ok = true;
    for (const auto &c : checks) {
        std::printf("    %-32s %-4s %.3e\n", c.name.c_str(),
                    c.pass ? "ok" : "FAIL", c.metric);
        ok = ok && c.pass;
    }
    ok = ok && wall < 60.0;
    report(10, ok, fmt("%zu oracle checks in %.1f s", checks.size(), wall));
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_10(); // fast; run before the long sweeps
    criterion_8();
    criterion_9();
    criterion_7();
    std::printf("acceptance: %d failure(s), %.1f s total\n", failures,
                elapsed_since(t0));
    return failures;
}
