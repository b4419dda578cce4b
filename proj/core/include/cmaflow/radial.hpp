#pragma once

#include <functional>
#include <vector>

namespace cmaflow {

/// Radial profile psi(r) on [0, R], linear interpolation between samples.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> psi;
    double value(double radius) const;
    double center() const { return psi.front(); }
};

/// Independent 1-D oracle for radial Dirichlet problems in C^1, density
/// units: psi_{z zbar} = e^{F(psi)} mu(|z|), i.e. (1/4)(psi'' + psi'/r) =
/// e^{F(psi)} mu, psi'(0) = 0, psi(R) = boundary_value. Integrates with RK4
/// and bisects on the center value; shares no code with the grid solvers.
RadialProfile solve_radial_dirichlet(double R, const std::function<double(double)>& F_of_psi,
                                     const std::function<double(double)>& mu_of_radius,
                                     double boundary_value, int grid_points = 8193);

}  // namespace cmaflow
