#ifndef EESIM_GRID_HPP
#define EESIM_GRID_HPP

#include <Eigen/Dense>

namespace eesim {

// Uniform 1D grid for the even-mode coordinate; the coupling point x=0
// sits at the center of cell coupling_index and dx doubles as the time
// step (v_g = 1).
struct GridSpec {
    int n_cells = 0;
    double dx = 0.0;
    double x0 = 0.0; // center of the leftmost cell
    int coupling_index = 0;

    double x(int i) const { return x0 + i * dx; }
    double left_edge() const { return x0; }
    double right_edge() const { return x0 + (n_cells - 1) * dx; }

    void validate() const;

    // Grid covering [-left_extent, +right_extent] around x=0.
    static GridSpec make(double left_extent, double right_extent, double dx);
    // Mirror-symmetric grid (coupling cell at n/2), required by the
    // time-reversal pipeline.
    static GridSpec symmetric(double half_extent, double dx);
};

// Gaussian input pulse in the rotating frame:
//   f(x) = exp(-(x - center)^2 / (2 width^2)) * exp(i carrier x)
// carrier is the detuning from the frame reference frequency.
struct PulseSpec {
    double center = 0.0;
    double width = 1.0;
    double carrier = 0.0;
    bool normalize = true;
};

// f sampled at cell centers; when spec.normalize, sum |f|^2 dx = 1.
// Throws PulseOutOfDomain unless the grid holds center +- 5 width.
Eigen::VectorXcd gaussian_pulse(const PulseSpec &spec, const GridSpec &grid);

// Same, then zeroed at x >= 0 and renormalized: the waveguide-input
// constraint for scattering initial states.
Eigen::VectorXcd input_pulse(const PulseSpec &spec, const GridSpec &grid);

} // namespace eesim

#endif
