#include "eesim/spectrum.hpp"

#include <algorithm>
#include <numeric>

#include "eesim/errors.hpp"

namespace eesim {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

ComplexSpectrum spectrum_of(const Eigen::MatrixXcd &heff) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(heff);
    const auto &vals = solver.eigenvalues();
    const auto &vecs = solver.eigenvectors();

    const int n = static_cast<int>(vals.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const double scale = std::max(1.0, heff.cwiseAbs().maxCoeff());
    const double tie = 1e-12 * scale;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ia = std::abs(vals[a].imag());
        const double ib = std::abs(vals[b].imag());
        if (std::abs(ia - ib) > tie)
            return ia < ib;
        return vals[a].real() < vals[b].real();
    });

    ComplexSpectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
        out.eigenvalues[i] = vals[order[i]];
        out.eigenvectors.col(i) = vecs.col(order[i]).normalized();
    }
    return out;
}

double ee_condition_residual(const SystemParams &p) {
    return (p.omega_a - p.omega_c) * p.v_a * p.v_c
           - p.j_coupling * (p.v_a * p.v_a - p.v_c * p.v_c);
}

double solve_j_for_ee(const SystemParams &p) {
    const double vmax = std::max(p.v_a, p.v_c);
    const double detuning = p.omega_a - p.omega_c;
    if (vmax == 0.0 || std::abs(p.v_a - p.v_c) / vmax < 1e-12) {
        if (detuning == 0.0)
            return 0.0; // condition holds identically; any J works
        throw DegenerateCouplings(
            "V_A = V_C with omega_a != omega_c leaves no finite J");
    }
    return detuning * p.v_a * p.v_c / (p.v_a * p.v_a - p.v_c * p.v_c);
}

Eigen::Matrix2cd single_excitation_heff(const SystemParams &p) {
    const double ga = p.gamma_a();
    const double gc = p.gamma_c();
    const std::complex<double> off = p.j_coupling - kI * std::sqrt(ga * gc);
    Eigen::Matrix2cd h;
    h(0, 0) = p.omega_a - kI * (ga + p.gamma_prime_a);
    h(0, 1) = off;
    h(1, 0) = off;
    h(1, 1) = p.omega_c - kI * (gc + p.gamma_prime_c);
    return h;
}

Eigen::Matrix2cd two_excitation_heff(const SystemParams &p) {
    const double gtc = 2.0 * p.gamma_c();
    const double gta = 2.0 * p.gamma_a();
    const double gtca = 4.0 * M_PI * p.v_c * p.v_a;
    const double s2 = std::sqrt(2.0);
    Eigen::Matrix2cd h;
    h(0, 0) = 2.0 * p.omega_c - kI * (gtc + 2.0 * p.gamma_prime_c);
    h(1, 1) = p.omega_c + p.omega_a
              - kI * (0.5 * (gtc + gta) + p.gamma_prime_c + p.gamma_prime_a);
    h(0, 1) = s2 * p.j_coupling - kI * 0.5 * s2 * gtca;
    h(1, 0) = h(0, 1);
    return h;
}

EEAmplitudes ee_state(const SystemParams &p) {
    const double norm = std::hypot(p.v_a, p.v_c);
    if (norm == 0.0)
        throw ZeroCoupling("EE state undefined for V_A = V_C = 0");
    return {p.v_c / norm, -p.v_a / norm};
}

double ee_frequency(const SystemParams &p) {
    if (p.v_a != 0.0)
        return p.omega_c - p.j_coupling * p.v_c / p.v_a;
    return p.omega_a - p.j_coupling * p.v_a / p.v_c;
}

double bright_frequency(const SystemParams &p) {
    // trace identity of the single-excitation Hamiltonian
    return p.omega_a + p.omega_c - ee_frequency(p);
}

double three_mode_ee_residual(const ThreeModeParams &p) {
    const double den = p.v_2 * p.j_coupling + p.v_1 * (p.omega_a - p.omega_2);
    if (std::abs(den) < 1e-14)
        throw SingularDenominator(
            "V2*J + V1*(omega_a - omega_2) vanishes in the three-mode condition");
    const double lhs = (p.omega_1 - p.omega_2) * p.v_1 * p.v_2;
    const double rhs = p.j_coupling * (p.v_1 * p.v_1 - p.v_2 * p.v_2)
                       + p.v_1 * p.v_1 * p.v_2 * p.g_coupling * p.g_coupling / den;
    return lhs - rhs;
}

double solve_g_for_three_mode_ee(const ThreeModeParams &p) {
    const double den = p.v_2 * p.j_coupling + p.v_1 * (p.omega_a - p.omega_2);
    if (std::abs(den) < 1e-14)
        throw SingularDenominator(
            "V2*J + V1*(omega_a - omega_2) vanishes in the three-mode condition");
    const double lhs = (p.omega_1 - p.omega_2) * p.v_1 * p.v_2
                       - p.j_coupling * (p.v_1 * p.v_1 - p.v_2 * p.v_2);
    const double g2 = lhs * den / (p.v_1 * p.v_1 * p.v_2);
    if (g2 < 0.0)
        throw NoRealCoupling("required g^2 is negative for these parameters");
    return std::sqrt(g2);
}

Eigen::Matrix3cd three_mode_heff(const ThreeModeParams &p) {
    const double g11 = 2.0 * M_PI * p.v_1 * p.v_1;
    const double g22 = 2.0 * M_PI * p.v_2 * p.v_2;
    const double g12 = 2.0 * M_PI * p.v_1 * p.v_2;
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    h(0, 0) = p.omega_a - kI * p.gamma_prime_a;
    h(0, 1) = p.g_coupling;
    h(1, 0) = p.g_coupling;
    h(1, 1) = p.omega_1 - kI * (g11 + p.gamma_prime_1);
    h(1, 2) = p.j_coupling - kI * g12;
    h(2, 1) = h(1, 2);
    h(2, 2) = p.omega_2 - kI * (g22 + p.gamma_prime_2);
    return h;
}

} // namespace eesim
