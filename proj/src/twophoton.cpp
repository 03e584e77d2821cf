#include "eesim/twophoton.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <deque>
#include <fstream>

#include "eesim/errors.hpp"
#include "eesim/spectrum.hpp"
#include "engine_common.hpp"

namespace eesim {

using detail::cplx;
using detail::Matrix5cd;
using detail::Ring1D;
using detail::Ring2D;

namespace {

double resolve_omega_ref(const SystemParams &p, double requested) {
    if (std::isnan(requested))
        return (p.v_a != 0.0 || p.v_c != 0.0) ? ee_frequency(p) : p.omega_c;
    return requested;
}

double default_interval(const SystemParams &p, double dx, double fallback_steps,
                        double gamma_multiple) {
    const double g = p.gamma_unit();
    return (g > 0.0) ? gamma_multiple / g : fallback_steps * dx;
}

} // namespace

TwoPhotonPulse build_gaussian_two_photon(const PulseSpec &a, const PulseSpec &b,
                                         const GridSpec &grid) {
    const Eigen::VectorXcd fa = gaussian_pulse(a, grid);
    const Eigen::VectorXcd fb = gaussian_pulse(b, grid);
    const int m = grid.n_cells;
    const int j0 = grid.coupling_index;
    Eigen::MatrixXcd chi = fa * fb.transpose();
    chi += chi.transpose().eval();
    chi.bottomRows(m - j0).setZero();
    chi.rightCols(m - j0).setZero();
    const double norm = std::sqrt(chi.squaredNorm()) * grid.dx;
    if (norm == 0.0)
        throw SupportViolation("two-photon input has no support at x1,x2 < 0");
    TwoPhotonPulse out;
    out.chi = chi / norm;
    out.grid = grid;
    return out;
}

double p_ee(const TwoPhotonState &state, const SystemParams &params,
            const GridSpec &grid) {
    const double v2 = params.v_a * params.v_a + params.v_c * params.v_c;
    if (v2 == 0.0)
        return 0.0;
    return (params.v_c * state.phi_a - params.v_a * state.phi_c).squaredNorm()
           * grid.dx / v2;
}

TwoPhotonState make_release_state(const SystemParams &params,
                                  const Eigen::VectorXcd &f,
                                  const GridSpec &grid) {
    if (f.size() != grid.n_cells)
        throw InvalidParams("pulse size does not match the grid");
    double tail = 0.0;
    for (int i = grid.coupling_index; i < grid.n_cells; ++i)
        tail += std::norm(f[i]) * grid.dx;
    if (tail > 1e-9)
        throw SupportViolation("release pulse must be supported at x < 0");
    const EEAmplitudes ee = ee_state(params);
    TwoPhotonState st;
    st.chi = Eigen::MatrixXcd::Zero(grid.n_cells, grid.n_cells);
    st.phi_a = ee.atom * f;
    st.phi_c = ee.cavity * f;
    return st;
}

TwoPhotonPulse extract_outgoing(const TwoPhotonState &state,
                                const GridSpec &grid,
                                double residual_threshold) {
    const double stored = state.stored_population(grid.dx);
    if (stored >= residual_threshold)
        throw ResidualTooLarge("stored population "
                               + std::to_string(stored)
                               + " exceeds the extraction threshold");
    TwoPhotonPulse out;
    out.grid = grid;
    out.residual_discarded = stored;
    const double norm = std::sqrt(state.chi.squaredNorm()) * grid.dx;
    if (norm == 0.0)
        throw ResidualTooLarge("no outgoing two-photon amplitude to extract");
    out.chi = state.chi / norm;
    return out;
}

TwoPhotonPulse time_reverse(const TwoPhotonPulse &pulse) {
    const int m = pulse.grid.n_cells;
    const int j0 = pulse.grid.coupling_index;
    Eigen::MatrixXcd rev = Eigen::MatrixXcd::Zero(m, m);
    double dropped = 0.0;
    for (int j = 0; j < m; ++j) {
        const int mj = 2 * j0 - j;
        for (int k = 0; k < m; ++k) {
            const int mk = 2 * j0 - k;
            if (mj >= 0 && mj < m && mk >= 0 && mk < m)
                rev(j, k) = std::conj(pulse.chi(mj, mk));
        }
    }
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            const int mj = 2 * j0 - j;
            const int mk = 2 * j0 - k;
            if (mj < 0 || mj >= m || mk < 0 || mk >= m)
                dropped += std::norm(pulse.chi(j, k));
        }
    dropped *= pulse.grid.dx * pulse.grid.dx;
    if (dropped > 1e-9)
        throw SupportViolation("time reversal would drop weight "
                               + std::to_string(dropped)
                               + " outside the mirrored grid");
    TwoPhotonPulse out;
    out.chi = std::move(rev);
    out.grid = pulse.grid;
    out.residual_discarded = pulse.residual_discarded;
    return out;
}

double bunching_weight(const TwoPhotonPulse &pulse, double window) {
    const int m = pulse.grid.n_cells;
    const double dx = pulse.grid.dx;
    double inside = 0.0, total = 0.0;
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            const double w = std::norm(pulse.chi(j, k));
            total += w;
            if (std::abs(j - k) * dx < window)
                inside += w;
        }
    return total > 0 ? inside / total : 0.0;
}

TwoPhotonRunResult evolve_two_photon(const SystemParams &params,
                                     const GridSpec &grid, TwoPhotonState state,
                                     double t_final,
                                     const TwoPhotonOptions &opts) {
    params.validate();
    grid.validate();
    const int m = grid.n_cells;
    const int j0 = grid.coupling_index;
    if (state.chi.rows() != m || state.chi.cols() != m
        || state.phi_a.size() != m || state.phi_c.size() != m)
        throw InvalidParams("state size does not match the grid");
    const double sym0 = (state.chi - state.chi.transpose()).cwiseAbs().maxCoeff();
    if (sym0 > 1e-12)
        throw SymmetryDrift("initial chi is not bosonic-symmetric");

    const double dx = grid.dx;
    const double dt = dx;
    const double sdx = std::sqrt(dx);
    const double omega_ref = resolve_omega_ref(params, opts.omega_ref);
    const double gamma = params.gamma_unit();
    const double s2 = std::sqrt(2.0);

    // the spectator propagator acts on (sqrt(2) chi(j0,k), phi_a, phi_c);
    // fold the sqrt(2) into the matrix so chi is read and written directly
    Eigen::Matrix3cd p3 =
        detail::step_propagator(detail::local_block3(params, dx, omega_ref), dt);
    p3(0, 1) /= s2;
    p3(0, 2) /= s2;
    p3(1, 0) *= s2;
    p3(2, 0) *= s2;
    const Matrix5cd p5 =
        detail::step_propagator(detail::local_block5(params, dx, omega_ref), dt);

    // internal normalized amplitudes: X = chi*dx, alpha = phi*sqrt(dx)
    Ring2D X(m);
    Ring1D alpha(m), cav(m);
    for (int j = 0; j < m; ++j) {
        alpha.at(j) = state.phi_a[j] * sdx;
        cav.at(j) = state.phi_c[j] * sdx;
        for (int k = 0; k < m; ++k)
            X.at(j, k) = 0.5 * (state.chi(j, k) + state.chi(k, j)) * dx;
    }
    cplx e_ac = state.e_ac;
    cplx e_2c = state.e_2c;

    const int n_steps = static_cast<int>(std::lround(t_final / dt));
    const int stride = std::max(
        1, static_cast<int>(std::lround(
               (opts.sample_interval > 0 ? opts.sample_interval
                                         : default_interval(params, dx, 10, 0.25))
               / dt)));
    const int audit_stride = std::max(
        stride, static_cast<int>(std::lround(
                    (opts.symmetry_audit_interval > 0
                         ? opts.symmetry_audit_interval
                         : default_interval(params, dx, 80, 2.0))
                    / dt)));

    const double steady_window =
        opts.steady_window > 0 ? opts.steady_window
                               : default_interval(params, dx, 80, 2.0);
    std::deque<std::pair<double, double>> pee_history;

    const double v2 = params.v_a * params.v_a + params.v_c * params.v_c;

    Trajectory traj;
    traj.columns = {"t_gamma", "p_atom", "p_cav", "p_wg2",
                    "e_ac2",   "e_2c2",  "p_ee",  "norm"};

    TwoPhotonRunResult result;

    auto sample = [&](double t) {
        double sa = 0.0, sc = 0.0, pee = 0.0;
        for (int q = 0; q < m; ++q) {
            sa += std::norm(alpha.raw(q));
            sc += std::norm(cav.raw(q));
            if (v2 > 0)
                pee += std::norm(params.v_c * alpha.raw(q)
                                 - params.v_a * cav.raw(q));
        }
        if (v2 > 0)
            pee /= v2;
        const double eac2 = std::norm(e_ac);
        const double e2c2 = std::norm(e_2c);
        const double pwg = X.squared_norm();
        const double nrm = pwg + sa + sc + eac2 + e2c2;
        traj.rows.push_back({t * gamma, sa + eac2, sc + eac2 + 2.0 * e2c2, pwg,
                             eac2, e2c2, pee, nrm});
        return pee;
    };
    sample(0.0);

    auto audit_symmetry = [&]() {
        double worst = 0.0;
        for (int j = 0; j < m; ++j)
            for (int k = j + 1; k < m; ++k)
                worst = std::max(worst,
                                 std::abs(X.raw(static_cast<size_t>(j) * m + k)
                                          - X.raw(static_cast<size_t>(k) * m + j)));
        if (worst > 1e-9)
            throw SymmetryDrift("bosonic symmetry drift "
                                + std::to_string(worst));
    };

    auto check_boundary = [&](int guard) {
        for (int i = 0; i < guard; ++i) {
            const int hi = m - 1 - i;
            if (std::abs(alpha.at(hi)) > 1e-8 || std::abs(cav.at(hi)) > 1e-8
                || std::abs(alpha.at(i)) > 1e-8 || std::abs(cav.at(i)) > 1e-8)
                throw BoundaryReached("emitter-photon amplitude reached the grid edge");
            for (int k = 0; k < m; ++k) {
                if (std::abs(X.at(hi, k)) > 1e-8 || std::abs(X.at(i, k)) > 1e-8)
                    throw BoundaryReached("two-photon amplitude reached the grid edge");
            }
        }
    };

    int n_end = n_steps;
    for (int n = 1; n <= n_steps; ++n) {
        X.shift_and_zero();
        alpha.shift_and_zero();
        cav.shift_and_zero();

        // spectator triples {sqrt(2) chi(j0,k), phi_a(k), phi_c(k)}; the
        // shared ring offset makes logical indices align across arrays
        const int r0 = X.array_index(j0);
        cplx *xrow = X.row_raw(r0);
        for (int q = 0; q < m; ++q) {
            if (q == r0)
                continue;
            const cplx x = xrow[q];
            const cplx a = alpha.raw(q);
            const cplx c = cav.raw(q);
            const cplx xv = p3(0, 0) * x + p3(0, 1) * a + p3(0, 2) * c;
            alpha.raw(q) = p3(1, 0) * x + p3(1, 1) * a + p3(1, 2) * c;
            cav.raw(q) = p3(2, 0) * x + p3(2, 1) * a + p3(2, 2) * c;
            xrow[q] = xv;
            X.raw(static_cast<size_t>(q) * m + r0) = xv;
        }
        Eigen::Matrix<cplx, 5, 1> v5;
        v5 << xrow[r0], alpha.raw(r0), cav.raw(r0), e_ac, e_2c;
        v5 = (p5 * v5).eval();
        xrow[r0] = v5[0];
        alpha.raw(r0) = v5[1];
        cav.raw(r0) = v5[2];
        e_ac = v5[3];
        e_2c = v5[4];

        if (opts.check_boundary && n % 8 == 0 && n != n_steps)
            check_boundary(8);
        if (n % audit_stride == 0)
            audit_symmetry();
        if (n % stride == 0 || n == n_steps) {
            const double t = n * dt;
            const double pee = sample(t);
            if (opts.steady_stop) {
                pee_history.emplace_back(t, pee);
                while (pee_history.size() > 1
                       && pee_history.front().first < t - steady_window)
                    pee_history.pop_front();
                if (t >= opts.steady_t_min
                    && pee_history.front().first <= t - steady_window + dt) {
                    double lo = pee, hi = pee;
                    for (const auto &[ts, ps] : pee_history) {
                        lo = std::min(lo, ps);
                        hi = std::max(hi, ps);
                    }
                    if (hi - lo <= opts.steady_rel_tol * std::max(hi, 1e-12)) {
                        result.steady = true;
                        result.t_steady = t;
                        n_end = n;
                        break;
                    }
                }
            }
        }
    }
    audit_symmetry();

    result.t_end = n_end * dt;
    result.traj = std::move(traj);
    result.traj.meta["omega_ref"] = std::to_string(omega_ref);
    if (result.steady)
        result.traj.meta["t_steady_gamma"] = std::to_string(result.t_steady * gamma);

    TwoPhotonState fin;
    fin.chi.resize(m, m);
    fin.phi_a.resize(m);
    fin.phi_c.resize(m);
    for (int j = 0; j < m; ++j) {
        fin.phi_a[j] = alpha.at(j) / sdx;
        fin.phi_c[j] = cav.at(j) / sdx;
        for (int k = 0; k < m; ++k)
            fin.chi(j, k) = X.at(j, k) / dx;
    }
    fin.e_ac = e_ac;
    fin.e_2c = e_2c;
    result.final_state = std::move(fin);
    return result;
}

// --- EE2P binary format ---------------------------------------------------

namespace {

template <typename T>
void put_le(std::ofstream &os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char *>(buf), sizeof(T));
}

template <typename T>
T get_le(std::ifstream &is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char *>(buf), sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void write_ee2p(const std::string &path, const TwoPhotonPulse &pulse,
                double t) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open '" + path + "' for writing");
    os.write("EE2P", 4);
    put_le<std::uint16_t>(os, 1);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(pulse.grid.n_cells));
    put_le<double>(os, pulse.grid.dx);
    put_le<double>(os, pulse.grid.x0);
    put_le<double>(os, t);
    const int m = pulse.grid.n_cells;
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            put_le<double>(os, pulse.chi(j, k).real());
            put_le<double>(os, pulse.chi(j, k).imag());
        }
    if (!os)
        throw IoError("failed writing '" + path + "'");
}

Ee2pFile read_ee2p(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "EE2P")
        throw IoError("'" + path + "' is not an EE2P grid file");
    const auto version = get_le<std::uint16_t>(is);
    if (version != 1)
        throw IoError("unsupported EE2P version "
                      + std::to_string(version));
    Ee2pFile out;
    const auto m = get_le<std::uint32_t>(is);
    out.pulse.grid.n_cells = static_cast<int>(m);
    out.pulse.grid.dx = get_le<double>(is);
    out.pulse.grid.x0 = get_le<double>(is);
    out.t = get_le<double>(is);
    out.pulse.grid.coupling_index =
        static_cast<int>(std::lround(-out.pulse.grid.x0 / out.pulse.grid.dx));
    out.pulse.grid.validate();
    out.pulse.chi.resize(m, m);
    for (std::uint32_t j = 0; j < m; ++j)
        for (std::uint32_t k = 0; k < m; ++k) {
            const double re = get_le<double>(is);
            const double im = get_le<double>(is);
            out.pulse.chi(j, k) = {re, im};
        }
    if (!is)
        throw IoError("truncated EE2P file '" + path + "'");
    return out;
}

} // namespace eesim
