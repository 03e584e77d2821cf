#include "eesim/protocols.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include "eesim/errors.hpp"
#include "eesim/spectrum.hpp"

namespace eesim {

int default_workers() {
    if (const char *env = std::getenv("EESIM_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void parallel_for(int n, int workers, const std::function<void(int)> &fn) {
    workers = std::min(std::max(workers, 1), n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                fn(i);
        });
    for (auto &t : pool)
        t.join();
}

double pulse_center_for(double sigma) {
    return -std::max(5.0, 3.0 * sigma); // in 1/Gamma units
}

// time at which the pulse's norm centroid crosses x = 0
double arrival_time(const TwoPhotonPulse &pulse) {
    const int m = pulse.grid.n_cells;
    double w = 0.0, xw = 0.0;
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            const double p = std::norm(pulse.chi(j, k));
            w += p;
            xw += p * 0.5 * (pulse.grid.x(j) + pulse.grid.x(k));
        }
    return w > 0 ? -xw / w : 0.0;
}

} // namespace

GaussianTrapInput make_gaussian_trap_input(const SystemParams &params,
                                           double sigma_gamma,
                                           double carrier_abs,
                                           const TrapOptions &opts) {
    const double gamma = params.gamma_unit();
    const double sigma = sigma_gamma / gamma;
    const double xc = pulse_center_for(sigma_gamma) / gamma;
    const double left = -xc + 7.0 * sigma + 2.0 / gamma;
    const double right = opts.t_max_gamma / gamma + 5.0 * sigma + 2.0 / gamma;
    const GridSpec grid = GridSpec::make(left, right, opts.dx_gamma / gamma);

    PulseSpec spec;
    spec.center = xc;
    spec.width = sigma;
    spec.carrier = carrier_abs - ee_frequency(params); // rotating frame
    GaussianTrapInput out;
    out.pulse = build_gaussian_two_photon(spec, spec, grid);
    out.x_center = xc;
    out.carrier = carrier_abs;
    return out;
}

TrapOutcome trap_efficiency(const SystemParams &params,
                            const TwoPhotonPulse &pulse,
                            const TrapOptions &opts) {
    if (std::abs(ee_condition_residual(params)) >= 1e-9)
        throw InvalidParams("trap_efficiency requires the interference "
                            "condition to hold");
    const double gamma = params.gamma_unit();

    TwoPhotonState state;
    state.chi = pulse.chi;
    state.phi_a = Eigen::VectorXcd::Zero(pulse.grid.n_cells);
    state.phi_c = Eigen::VectorXcd::Zero(pulse.grid.n_cells);
    if (state.chi.squaredNorm() == 0.0) {
        TrapOutcome out;
        out.p_ee_inf = 0.0;
        return out;
    }

    TwoPhotonOptions evo;
    evo.steady_stop = true;
    evo.steady_t_min = arrival_time(pulse)
                       + opts.settle_after_arrival_gamma / gamma;
    TwoPhotonRunResult run = evolve_two_photon(
        params, pulse.grid, std::move(state), opts.t_max_gamma / gamma, evo);
    if (!run.steady)
        throw NoSteadyState("P_EE did not settle before t_max");

    TrapOutcome out;
    out.p_ee_inf = run.traj.last("p_ee");
    out.t_steady_gamma = run.t_steady * gamma;
    if (opts.keep_trajectory)
        out.traj = std::move(run.traj);
    return out;
}

double SweepAxis::value(int i) const {
    if (n == 1)
        return min;
    const double f = static_cast<double>(i) / (n - 1);
    if (log_scale)
        return min * std::pow(max / min, f);
    return min + f * (max - min);
}

SweepPoint SweepResult::argmax() const {
    const SweepPoint *best = nullptr;
    for (const auto &p : points)
        if (!p.masked && (!best || p.p_ee > best->p_ee))
            best = &p;
    if (!best)
        throw NoSteadyState("sweep has no unmasked points");
    return *best;
}

void SweepResult::write_csv(std::ostream &os) const {
    os << row.name << "," << col.name
       << ",p_ee,masked,mask_reason,j_used,t_steady\r\n";
    char buf[256];
    for (const auto &p : points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%s,%.17g,%.17g\r\n",
                      p.row_value, p.col_value, p.p_ee, p.masked ? 1 : 0,
                      p.mask_reason.c_str(), p.j_used, p.t_steady_gamma);
        os << buf;
    }
}

void SweepResult::write_csv_file(const std::string &path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open '" + path + "' for writing");
    write_csv(os);
}

SweepSpec default_vc_sigma_spec(const SystemParams &base) {
    SweepSpec spec;
    spec.base = base;
    spec.row = {"vc_over_va", 0.1, 0.9, 17, false};
    spec.col = {"sigma_gamma", 0.2, 5.0, 17, true};
    return spec;
}

SweepSpec default_k_sigma_spec(const SystemParams &base) {
    SweepSpec spec;
    spec.base = base;
    const double wb = bright_frequency(base);
    const double gamma = base.gamma_unit();
    spec.row = {"k", wb - 4.5 * gamma, wb + 1.5 * gamma, 17, false};
    spec.col = {"sigma_gamma", 0.2, 5.0, 17, true};
    return spec;
}

namespace {

SweepResult run_sweep(const SweepSpec &spec,
                      const std::function<void(int, int, SweepPoint &)> &point_fn) {
    SweepResult result;
    result.row = spec.row;
    result.col = spec.col;
    result.points.resize(static_cast<size_t>(spec.row.n) * spec.col.n);
    const int total = spec.row.n * spec.col.n;
    const int workers = spec.workers > 0 ? spec.workers : default_workers();
    parallel_for(total, workers, [&](int idx) {
        const int i = idx / spec.col.n;
        const int j = idx % spec.col.n;
        SweepPoint &p = result.points[idx];
        p.row_value = spec.row.value(i);
        p.col_value = spec.col.value(j);
        try {
            point_fn(i, j, p);
        } catch (const SimulationError &err) {
            p.masked = true;
            p.mask_reason = err.name();
            p.p_ee = 0.0;
        }
    });
    return result;
}

} // namespace

SweepResult sweep_vc_sigma(const SweepSpec &spec) {
    SweepResult result = run_sweep(spec, [&](int, int, SweepPoint &p) {
        SystemParams params = spec.base;
        params.v_c = p.row_value * params.v_a;
        params.j_coupling = solve_j_for_ee(params);
        p.j_used = params.j_coupling;
        const double j_limit =
            spec.j_mask_factor * 0.5 * (params.omega_c + params.omega_a);
        if (params.j_coupling > j_limit) {
            p.masked = true;
            p.mask_reason = "J exceeds 0.1*(omega_c+omega_a)/2";
            return;
        }
        TrapOptions topts;
        topts.dx_gamma = spec.dx_gamma;
        topts.t_max_gamma = spec.t_max_gamma;
        const GaussianTrapInput input = make_gaussian_trap_input(
            params, p.col_value, bright_frequency(params), topts);
        const TrapOutcome outcome = trap_efficiency(params, input.pulse, topts);
        p.p_ee = outcome.p_ee_inf;
        p.t_steady_gamma = outcome.t_steady_gamma;
    });
    return result;
}

SweepResult sweep_k_sigma(const SweepSpec &spec) {
    SweepResult result = run_sweep(spec, [&](int, int, SweepPoint &p) {
        const SystemParams &params = spec.base;
        p.j_used = params.j_coupling;
        TrapOptions topts;
        topts.dx_gamma = spec.dx_gamma;
        topts.t_max_gamma = spec.t_max_gamma;
        const GaussianTrapInput input =
            make_gaussian_trap_input(params, p.col_value, p.row_value, topts);
        const TrapOutcome outcome = trap_efficiency(params, input.pulse, topts);
        p.p_ee = outcome.p_ee_inf;
        p.t_steady_gamma = outcome.t_steady_gamma;
    });

    const Eigen::Matrix2cd h2 = two_excitation_heff(spec.base);
    const ComplexSpectrum s2 = spectrum_of(h2);
    const double wb1 = bright_frequency(spec.base);
    const double wd2 = s2.eigenvalues[0].real();
    const double wb2 = s2.eigenvalues[1].real();
    result.overlays = {
        {"w_b1", wb1},
        {"w_b2_half", 0.5 * wb2},
        {"w_b2_minus_wb1", wb2 - wb1},
        {"w_d2_half", 0.5 * wd2},
        {"w_d2_minus_wb1", wd2 - wb1},
    };
    return result;
}

namespace {

// log-linear least squares of y(t) ~ exp(-rate t) over t >= t_from
double fit_decay_rate(const Trajectory &traj, const std::string &column,
                      double t_from_gamma, double gamma) {
    const int ct = traj.col("t_gamma");
    const int cy = traj.col(column);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto &r : traj.rows) {
        if (r[ct] < t_from_gamma || r[cy] <= 1e-14)
            continue;
        const double x = r[ct] / gamma;
        const double y = std::log(r[cy]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3)
        throw NoSteadyState("not enough samples to fit a decay rate");
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double peak_rate_of(const Trajectory &traj, const std::string &column,
                    double gamma) {
    const int ct = traj.col("t_gamma");
    const int cy = traj.col(column);
    double best = 0.0;
    for (size_t i = 1; i < traj.rows.size(); ++i) {
        const double dt = (traj.rows[i][ct] - traj.rows[i - 1][ct]) / gamma;
        if (dt <= 0)
            continue;
        best = std::max(best,
                        (traj.rows[i][cy] - traj.rows[i - 1][cy]) / dt);
    }
    return best;
}

} // namespace

LossComparison loss_comparison(const SystemParams &params,
                               const std::vector<double> &gamma_prime_ratios,
                               double dx_gamma, double t_final_gamma) {
    const double gamma = params.gamma_unit();
    const double sigma = 1.0 / gamma;
    const double xc = -5.0 / gamma;
    const double left = -xc + 7.0 * sigma + 2.0 / gamma;
    const double right = t_final_gamma / gamma + 5.0 * sigma + 2.0 / gamma;
    const GridSpec grid = GridSpec::make(left, right, dx_gamma / gamma);

    PulseSpec spec;
    spec.center = xc;
    spec.width = sigma;
    const double omega_ref = ee_frequency(params);
    spec.carrier = bright_frequency(params) - omega_ref;
    const TwoPhotonPulse pulse = build_gaussian_two_photon(spec, spec, grid);

    LossComparison out;
    for (double ratio : gamma_prime_ratios) {
        LossBranch branch;
        branch.gamma_prime_ratio = ratio;

        SystemParams lossy = params;
        lossy.gamma_prime_c = ratio * params.gamma_c();

        TwoPhotonState st;
        st.chi = pulse.chi;
        st.phi_a = Eigen::VectorXcd::Zero(grid.n_cells);
        st.phi_c = Eigen::VectorXcd::Zero(grid.n_cells);
        TwoPhotonOptions evo;
        evo.omega_ref = omega_ref;
        branch.full = evolve_two_photon(lossy, grid, std::move(st),
                                        t_final_gamma / gamma, evo)
                          .traj;

        SystemParams ref = lossy;
        ref.v_a = 0.0;
        ref.j_coupling = 0.0;
        TwoPhotonState st2;
        st2.chi = pulse.chi;
        st2.phi_a = Eigen::VectorXcd::Zero(grid.n_cells);
        st2.phi_c = Eigen::VectorXcd::Zero(grid.n_cells);
        branch.reference = evolve_two_photon(ref, grid, std::move(st2),
                                             t_final_gamma / gamma, evo)
                               .traj;

        const double v2 = params.v_a * params.v_a + params.v_c * params.v_c;
        branch.predicted_decay_full =
            2.0 * lossy.gamma_prime_c * params.v_a * params.v_a / v2;
        branch.predicted_decay_ref =
            2.0 * (params.gamma_c() + lossy.gamma_prime_c);
        const double fit_from = (-xc) * gamma + 10.0;
        if (ratio > 0)
            branch.fitted_decay_full =
                fit_decay_rate(branch.full, "p_ee", fit_from, gamma);
        branch.fitted_decay_ref =
            fit_decay_rate(branch.reference, "p_cav", fit_from, gamma);
        branch.peak_pop_full = branch.full.max_of("p_cav");
        branch.peak_pop_ref = branch.reference.max_of("p_cav");
        branch.peak_rate_full = peak_rate_of(branch.full, "p_cav", gamma);
        branch.peak_rate_ref = peak_rate_of(branch.reference, "p_cav", gamma);
        out.branches.push_back(std::move(branch));
    }
    return out;
}

ReleaseRun release_run(const SystemParams &params, double sigma_gamma,
                       double dx_gamma) {
    const double gamma = params.gamma_unit();
    const double sigma = sigma_gamma / gamma;
    const double xc = pulse_center_for(sigma_gamma) / gamma;
    const double t_final = -xc + 3.0 * sigma + 10.0 / gamma;
    const double half = std::max(-xc + 7.0 * sigma, t_final + 2.0 / gamma);
    const GridSpec grid = GridSpec::symmetric(half, dx_gamma / gamma);

    PulseSpec spec;
    spec.center = xc;
    spec.width = sigma;
    spec.carrier = bright_frequency(params) - ee_frequency(params);
    const Eigen::VectorXcd f = input_pulse(spec, grid);

    TwoPhotonState st = make_release_state(params, f, grid);
    TwoPhotonRunResult run =
        evolve_two_photon(params, grid, std::move(st), t_final);

    ReleaseRun out;
    out.grid = grid;
    out.residual_stored = run.final_state.stored_population(grid.dx);
    out.p_ee_residual = p_ee(run.final_state, params, grid);
    out.final_state = std::move(run.final_state);
    out.pulse = f;
    out.traj = std::move(run.traj);
    return out;
}

ReleaseReport optimize_release_pulse(const SystemParams &params,
                                     const std::vector<double> &sigmas_gamma,
                                     double target_residual, double dx_gamma) {
    ReleaseReport report;
    double prev = 1e300;
    bool found = false;
    for (double sg : sigmas_gamma) {
        const ReleaseRun run = release_run(params, sg, dx_gamma);
        report.outcomes.push_back({sg, run.residual_stored, run.p_ee_residual});
        if (run.residual_stored > prev)
            report.monotone = false;
        prev = run.residual_stored;
        if (!found && run.residual_stored < target_residual) {
            report.best_sigma_gamma = sg;
            found = true;
        }
    }
    if (!found)
        throw TargetNotMet("no width reached the residual target "
                           + std::to_string(target_residual));
    return report;
}

PipelineResult optimal_trap_pipeline(const SystemParams &params,
                                     double sigma_release_gamma,
                                     double dx_gamma,
                                     const std::optional<std::string>
                                         &artifact_dir) {
    const double gamma = params.gamma_unit();
    PipelineResult result;

    ReleaseRun released = release_run(params, sigma_release_gamma, dx_gamma);
    result.release_residual = released.residual_stored;

    const TwoPhotonPulse outgoing =
        extract_outgoing(released.final_state, released.grid);
    const TwoPhotonPulse reversed = time_reverse(outgoing);

    if (artifact_dir) {
        std::filesystem::create_directories(*artifact_dir);
        const std::string p1 = *artifact_dir + "/stage1_outgoing.ee2p";
        const std::string p2 = *artifact_dir + "/stage2_reversed.ee2p";
        write_ee2p(p1, outgoing, 0.0);
        write_ee2p(p2, reversed, 0.0);
        result.artifacts = {p1, p2};
    }

    TrapOptions topts;
    topts.dx_gamma = dx_gamma;
    const TrapOutcome trapped = trap_efficiency(params, reversed, topts);
    result.final_p_ee = trapped.p_ee_inf;
    result.t_steady_gamma = trapped.t_steady_gamma;

    const double sigma = sigma_release_gamma / gamma;
    result.bunching_reversed = bunching_weight(reversed, sigma);
    PulseSpec gspec;
    gspec.center = pulse_center_for(sigma_release_gamma) / gamma;
    gspec.width = sigma;
    gspec.carrier = bright_frequency(params) - ee_frequency(params);
    const TwoPhotonPulse gauss =
        build_gaussian_two_photon(gspec, gspec, reversed.grid);
    result.bunching_gaussian = bunching_weight(gauss, sigma);
    result.reversed_input = std::move(reversed);
    return result;
}

} // namespace eesim
