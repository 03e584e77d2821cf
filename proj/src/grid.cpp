#include "eesim/grid.hpp"

#include <cmath>

#include "eesim/errors.hpp"

namespace eesim {

void GridSpec::validate() const {
    if (n_cells < 16)
        throw InvalidParams("grid needs at least 16 cells");
    if (dx <= 0)
        throw InvalidParams("dx must be positive");
    if (coupling_index < 0 || coupling_index >= n_cells)
        throw InvalidParams("coupling_index outside the grid");
    const double xc = x(coupling_index);
    if (std::abs(xc) > 0.5 * dx + 1e-9 * dx)
        throw InvalidParams("coupling cell does not contain x=0");
}

GridSpec GridSpec::make(double left_extent, double right_extent, double dx) {
    GridSpec g;
    g.dx = dx;
    g.coupling_index = static_cast<int>(std::ceil(left_extent / dx));
    g.n_cells = g.coupling_index + static_cast<int>(std::ceil(right_extent / dx)) + 1;
    g.x0 = -g.coupling_index * dx;
    g.validate();
    return g;
}

GridSpec GridSpec::symmetric(double half_extent, double dx) {
    GridSpec g;
    g.dx = dx;
    g.coupling_index = static_cast<int>(std::ceil(half_extent / dx));
    g.n_cells = 2 * g.coupling_index;
    g.x0 = -g.coupling_index * dx;
    g.validate();
    return g;
}

Eigen::VectorXcd gaussian_pulse(const PulseSpec &spec, const GridSpec &grid) {
    if (spec.width <= 0)
        throw InvalidParams("pulse width must be positive");
    if (spec.center - 5 * spec.width < grid.left_edge()
        || spec.center + 5 * spec.width > grid.right_edge())
        throw PulseOutOfDomain("pulse support (5 sigma) exceeds the grid");

    const std::complex<double> ik{0.0, spec.carrier};
    Eigen::VectorXcd f(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) {
        const double x = grid.x(i);
        const double arg = (x - spec.center) / spec.width;
        f[i] = std::exp(-0.5 * arg * arg) * std::exp(ik * x);
    }
    if (spec.normalize)
        f /= std::sqrt(f.squaredNorm() * grid.dx);
    return f;
}

Eigen::VectorXcd input_pulse(const PulseSpec &spec, const GridSpec &grid) {
    Eigen::VectorXcd f = gaussian_pulse(spec, grid);
    for (int i = grid.coupling_index; i < grid.n_cells; ++i)
        f[i] = 0.0;
    const double norm = std::sqrt(f.squaredNorm() * grid.dx);
    if (norm == 0.0)
        throw SupportViolation("input pulse has no support at x < 0");
    f /= norm;
    return f;
}

} // namespace eesim
