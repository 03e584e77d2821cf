#include "eesim/coherent.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "eesim/errors.hpp"
#include "eesim/spectrum.hpp"

namespace eesim {

namespace {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;
constexpr cplx kI{0.0, 1.0};

SpMat from_triplets(int dim, const std::vector<Triplet> &trips) {
    SpMat m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

} // namespace

int FockSpaceSpec::auto_cutoff(double mean_n) {
    return static_cast<int>(std::ceil(mean_n + 5.0 * std::sqrt(mean_n)));
}

cplx DriveEnvelope::beta(double t) const {
    const double amp = std::sqrt(mean_n)
                       * std::pow(M_PI * sigma_t * sigma_t, -0.25);
    const double arg = (t - t0) / sigma_t;
    return amp * std::exp(-0.5 * arg * arg) * std::exp(-kI * detuning * t);
}

double DriveEnvelope::integrated_photon_number(double t_end, double dt) const {
    double acc = 0.0;
    const int n = static_cast<int>(std::ceil(t_end / dt));
    for (int i = 0; i <= n; ++i) {
        const double t = std::min(i * dt, t_end);
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * std::norm(beta(t)) * dt;
    }
    return acc;
}

LindbladGenerator build_generator(const SystemParams &p, int n_max,
                                  double omega_ref) {
    p.validate();
    if (n_max < 1)
        throw InvalidParams("Fock cutoff must be at least 1");
    if (std::isnan(omega_ref))
        omega_ref = (p.v_a != 0.0 || p.v_c != 0.0) ? ee_frequency(p)
                                                   : p.omega_c;

    const int nf = n_max + 1;
    const int dim = 2 * nf;
    auto idx = [nf](int atom, int n) { return atom * nf + n; };

    std::vector<Triplet> a_t, sm_t, h_t, ncav_t, natom_t;
    const double dc = p.omega_c - omega_ref;
    const double da = p.omega_a - omega_ref;
    for (int atom = 0; atom < 2; ++atom)
        for (int n = 0; n < nf; ++n) {
            const int i = idx(atom, n);
            if (n > 0)
                a_t.emplace_back(idx(atom, n - 1), i, std::sqrt(double(n)));
            if (atom == 1)
                sm_t.emplace_back(idx(0, n), i, 1.0);
            const double diag = dc * n + da * atom;
            if (diag != 0.0)
                h_t.emplace_back(i, i, diag);
            if (n > 0)
                ncav_t.emplace_back(i, i, double(n));
            if (atom == 1)
                natom_t.emplace_back(i, i, 1.0);
            // J (a sigma+ + a^dag sigma-)
            if (atom == 0 && n > 0)
                h_t.emplace_back(idx(1, n - 1), i,
                                 p.j_coupling * std::sqrt(double(n)));
            if (atom == 1 && n < nf - 1)
                h_t.emplace_back(idx(0, n + 1), i,
                                 p.j_coupling * std::sqrt(double(n + 1)));
        }

    LindbladGenerator g;
    g.dim = dim;
    g.n_max = n_max;
    g.three_mode = false;
    g.hamiltonian = from_triplets(dim, h_t);
    const SpMat a_op = from_triplets(dim, a_t);
    const SpMat sm_op = from_triplets(dim, sm_t);
    g.port = std::sqrt(2.0 * p.gamma_c()) * a_op
             + std::sqrt(2.0 * p.gamma_a()) * sm_op;
    if (p.gamma_prime_c > 0)
        g.local_loss.push_back(std::sqrt(2.0 * p.gamma_prime_c) * a_op);
    if (p.gamma_prime_a > 0)
        g.local_loss.push_back(std::sqrt(2.0 * p.gamma_prime_a) * sm_op);
    g.n_cavity = from_triplets(dim, ncav_t);
    g.n_atom = from_triplets(dim, natom_t);

    g.ee_vector = Eigen::VectorXcd::Zero(dim);
    const double v2 = std::hypot(p.v_a, p.v_c);
    if (v2 > 0) {
        g.ee_vector[idx(1, 0)] = p.v_c / v2;
        g.ee_vector[idx(0, 1)] = -p.v_a / v2;
    }
    for (int atom = 0; atom < 2; ++atom)
        g.top_level_states.push_back(idx(atom, n_max));
    g.rate_scale = std::max({std::abs(dc), std::abs(da),
                             std::abs(p.j_coupling), 2.0 * p.gamma_c(),
                             2.0 * p.gamma_a(), 2.0 * p.gamma_prime_c,
                             2.0 * p.gamma_prime_a});
    g.port_unit = std::sqrt(2.0 * (p.gamma_c() + p.gamma_a()));
    return g;
}

LindbladGenerator build_generator(const ThreeModeParams &p, int n_max,
                                  double omega_ref) {
    p.validate();
    if (n_max < 1)
        throw InvalidParams("Fock cutoff must be at least 1");
    const ComplexSpectrum spec = spectrum_of(three_mode_heff(p));
    if (std::isnan(omega_ref))
        omega_ref = spec.eigenvalues[0].real();

    const int nf = n_max + 1;
    const int dim = 2 * nf * nf;
    auto idx = [nf](int atom, int n1, int n2) {
        return (atom * nf + n1) * nf + n2;
    };

    std::vector<Triplet> a1_t, a2_t, sm_t, h_t, n1_t, n2_t, natom_t;
    const double d1 = p.omega_1 - omega_ref;
    const double d2 = p.omega_2 - omega_ref;
    const double da = p.omega_a - omega_ref;
    for (int atom = 0; atom < 2; ++atom)
        for (int n1 = 0; n1 < nf; ++n1)
            for (int n2 = 0; n2 < nf; ++n2) {
                const int i = idx(atom, n1, n2);
                if (n1 > 0)
                    a1_t.emplace_back(idx(atom, n1 - 1, n2), i,
                                      std::sqrt(double(n1)));
                if (n2 > 0)
                    a2_t.emplace_back(idx(atom, n1, n2 - 1), i,
                                      std::sqrt(double(n2)));
                if (atom == 1)
                    sm_t.emplace_back(idx(0, n1, n2), i, 1.0);
                const double diag = d1 * n1 + d2 * n2 + da * atom;
                if (diag != 0.0)
                    h_t.emplace_back(i, i, diag);
                if (n1 > 0)
                    n1_t.emplace_back(i, i, double(n1));
                if (n2 > 0)
                    n2_t.emplace_back(i, i, double(n2));
                if (atom == 1)
                    natom_t.emplace_back(i, i, 1.0);
                // J (a1 a2^dag + a1^dag a2)
                if (n1 > 0 && n2 < nf - 1)
                    h_t.emplace_back(idx(atom, n1 - 1, n2 + 1), i,
                                     p.j_coupling * std::sqrt(double(n1))
                                         * std::sqrt(double(n2 + 1)));
                if (n2 > 0 && n1 < nf - 1)
                    h_t.emplace_back(idx(atom, n1 + 1, n2 - 1), i,
                                     p.j_coupling * std::sqrt(double(n2))
                                         * std::sqrt(double(n1 + 1)));
                // g (a1 sigma+ + a1^dag sigma-)
                if (atom == 0 && n1 > 0)
                    h_t.emplace_back(idx(1, n1 - 1, n2), i,
                                     p.g_coupling * std::sqrt(double(n1)));
                if (atom == 1 && n1 < nf - 1)
                    h_t.emplace_back(idx(0, n1 + 1, n2), i,
                                     p.g_coupling * std::sqrt(double(n1 + 1)));
            }

    LindbladGenerator g;
    g.dim = dim;
    g.n_max = n_max;
    g.three_mode = true;
    g.hamiltonian = from_triplets(dim, h_t);
    const SpMat a1_op = from_triplets(dim, a1_t);
    const SpMat a2_op = from_triplets(dim, a2_t);
    const SpMat sm_op = from_triplets(dim, sm_t);
    g.port = std::sqrt(2.0 * p.gamma_1()) * a1_op
             + std::sqrt(2.0 * p.gamma_2()) * a2_op;
    if (p.gamma_prime_1 > 0)
        g.local_loss.push_back(std::sqrt(2.0 * p.gamma_prime_1) * a1_op);
    if (p.gamma_prime_2 > 0)
        g.local_loss.push_back(std::sqrt(2.0 * p.gamma_prime_2) * a2_op);
    if (p.gamma_prime_a > 0)
        g.local_loss.push_back(std::sqrt(2.0 * p.gamma_prime_a) * sm_op);
    g.n_cavity = from_triplets(dim, n1_t);
    g.n_cavity2 = from_triplets(dim, n2_t);
    g.n_atom = from_triplets(dim, natom_t);

    // EE projections from the two least-lossy effective eigenvectors
    auto embed = [&](int col) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v[idx(1, 0, 0)] = spec.eigenvectors(0, col);
        v[idx(0, 1, 0)] = spec.eigenvectors(1, col);
        v[idx(0, 0, 1)] = spec.eigenvectors(2, col);
        return v;
    };
    g.ee_vector = embed(0);
    g.ee_vector2 = embed(1);
    for (int atom = 0; atom < 2; ++atom)
        for (int n1 = 0; n1 < nf; ++n1)
            for (int n2 = 0; n2 < nf; ++n2)
                if (n1 == n_max || n2 == n_max)
                    g.top_level_states.push_back(idx(atom, n1, n2));
    g.rate_scale = std::max({std::abs(d1), std::abs(d2), std::abs(da),
                             std::abs(p.j_coupling), std::abs(p.g_coupling),
                             2.0 * p.gamma_1(), 2.0 * p.gamma_2(),
                             2.0 * p.gamma_prime_1, 2.0 * p.gamma_prime_2,
                             2.0 * p.gamma_prime_a});
    g.port_unit = std::sqrt(2.0 * (p.gamma_1() + p.gamma_2()));
    return g;
}

namespace {

double max_rate(const LindbladGenerator &gen, const DriveEnvelope &drive) {
    const double beta_peak = std::abs(drive.beta(drive.t0));
    return std::max({gen.rate_scale, beta_peak * gen.port_unit, 1e-12});
}

} // namespace

MasterRunResult evolve_master(const LindbladGenerator &gen,
                              const DriveEnvelope &drive, double t_final,
                              const MasterOptions &opts) {
    const int dim = gen.dim;
    const double dt = opts.dt > 0 ? opts.dt : 0.01 / max_rate(gen, drive);
    const double gamma = opts.gamma_unit > 0 ? opts.gamma_unit : 1.0;
    const double sample_interval =
        opts.sample_interval > 0 ? opts.sample_interval : 0.25 / gamma;
    const int n_steps = static_cast<int>(std::lround(t_final / dt));
    const int stride =
        std::max(1, static_cast<int>(std::lround(sample_interval / dt)));

    // H_nh = H - (i/2) (L^dag L + sum L'^dag L'); drive added per stage
    SpMat hnh = gen.hamiltonian;
    {
        SpMat damp = gen.port.adjoint() * gen.port;
        for (const auto &l : gen.local_loss)
            damp = damp + SpMat(l.adjoint() * l);
        hnh = hnh - cplx(0.0, 0.5) * damp;
    }
    const SpMat port_dag = gen.port.adjoint();

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0; // ground state

    Eigen::MatrixXcd y(dim, dim), z(dim, dim);
    auto rhs = [&](double t, const Eigen::MatrixXcd &r) -> Eigen::MatrixXcd {
        const cplx b = drive.beta(t);
        y.noalias() = hnh * r;
        y.noalias() += (kI * b) * (port_dag * r);
        y.noalias() -= (kI * std::conj(b)) * (gen.port * r);
        Eigen::MatrixXcd out = -kI * (y - y.adjoint().eval());
        z.noalias() = gen.port * r;
        out.noalias() += z * port_dag;
        for (const auto &l : gen.local_loss) {
            z.noalias() = l * r;
            out.noalias() += z * l.adjoint();
        }
        return out;
    };

    Trajectory traj;
    if (gen.three_mode)
        traj.columns = {"t_gamma", "n_cavity", "n_cavity2", "p_atom",
                        "p_ee",    "p_ee2",    "trace_err", "tail_pop"};
    else
        traj.columns = {"t_gamma", "n_cavity", "p_atom",
                        "p_ee",    "trace_err", "tail_pop"};

    auto expect = [&](const SpMat &op) {
        cplx acc = 0.0;
        for (int k = 0; k < op.outerSize(); ++k)
            for (SpMat::InnerIterator it(op, k); it; ++it)
                acc += it.value() * rho(it.col(), it.row());
        return acc.real();
    };

    int samples = 0;
    auto sample = [&](double t) {
        const double trace_err = std::abs(rho.trace().real() - 1.0)
                                 + std::abs(rho.trace().imag());
        double tail = 0.0;
        for (int i : gen.top_level_states)
            tail += rho(i, i).real();
        if (tail > 1e-6)
            throw TruncationBreach("Fock ceiling population "
                                   + std::to_string(tail));
        if (trace_err > 1e-6)
            throw TraceDrift("trace error " + std::to_string(trace_err));
        const double pee =
            (gen.ee_vector.dot(rho * gen.ee_vector)).real();
        std::vector<double> row{t * gamma, expect(gen.n_cavity)};
        if (gen.three_mode)
            row.push_back(expect(gen.n_cavity2));
        row.push_back(expect(gen.n_atom));
        row.push_back(pee);
        if (gen.three_mode)
            row.push_back((gen.ee_vector2.dot(rho * gen.ee_vector2)).real());
        row.push_back(trace_err);
        row.push_back(tail);
        traj.rows.push_back(std::move(row));
        ++samples;
        if (opts.check_positivity && samples % (dim <= 64 ? 1 : 8) == 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
            if (es.eigenvalues().minCoeff() < -1e-7)
                throw SimulationError("PositivityBreach",
                                      "density matrix eigenvalue "
                                          + std::to_string(
                                              es.eigenvalues().minCoeff()));
        }
    };
    sample(0.0);

    Eigen::MatrixXcd k1, k2, k3, k4;
    for (int n = 1; n <= n_steps; ++n) {
        const double t = (n - 1) * dt;
        k1 = rhs(t, rho);
        k2 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k1);
        k3 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k2);
        k4 = rhs(t + dt, rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint().eval());
        if (n % stride == 0 || n == n_steps)
            sample(n * dt);
    }

    MasterRunResult out;
    out.traj = std::move(traj);
    out.traj.meta["dt"] = std::to_string(dt);
    out.rho_final = std::move(rho);
    return out;
}

MasterRunResult run_three_mode_coherent(const ThreeModeParams &params,
                                        double mean_n, double t_final_gamma,
                                        int n_max) {
    if (n_max <= 0)
        n_max = FockSpaceSpec::auto_cutoff(mean_n);
    const double gamma = params.gamma_unit();
    LindbladGenerator gen = build_generator(params, n_max);
    DriveEnvelope drive;
    drive.mean_n = mean_n;
    drive.sigma_t = 1.0 / gamma;
    drive.t0 = 5.0 / gamma;
    drive.detuning = 0.0;
    MasterOptions opts;
    opts.gamma_unit = gamma;
    return evolve_master(gen, drive, t_final_gamma / gamma, opts);
}

} // namespace eesim
