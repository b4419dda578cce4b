#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cmaflow/field.hpp"
#include "cmaflow/flow.hpp"
#include "cmaflow/frames.hpp"

namespace cmaflow {

struct EllipticOptions {
    double tol = 1e-11;        // sweep stop: sup-change <= tol
    int max_sweeps = 400000;
    double omega = 1.0;        // over-relaxation; 1 = plain Gauss-Seidel
    bool jacobi = false;       // parallel-sweep mode with the same fixed point
    double bisection_tol = 1e-13;
    double t_eval = 0.0;       // time at which F and mu are sampled
};

struct EllipticResult {
    ScalarField field;
    int sweeps = 0;
    double final_change = 0.0;
    double max_residual = 0.0;          // max |MA - e^F mu| over interior
    std::vector<int> degenerate_nodes;  // mu = 0 nodes solved by the maximal-psh update
    std::string residual_report() const;
};

/// Steady Dirichlet problem (dd^c psi)^n = e^{F(z,psi)} mu in density units
/// with band data g. Nonlinear Gauss-Seidel: each interior node solve finds
/// the unique crossing of the nonincreasing MA-density-in-center with the
/// nondecreasing e^{F} mu by bisection; mu = 0 nodes take the maximal-psh
/// update (the MA = 0 crossing). Throws NoConvergence after max_sweeps.
EllipticResult solve_dirichlet(const GridMesh& mesh, const FrameSet& frames, const Ffun& F,
                               const Mufun& mu, const std::function<double(const Point&)>& g,
                               const EllipticOptions& opts = {});

/// Same solve with the band data given directly (aligned with mesh.band_nodes).
EllipticResult solve_dirichlet(const GridMesh& mesh, const FrameSet& frames, const Ffun& F,
                               const Mufun& mu, const std::vector<double>& band_values,
                               const EllipticOptions& opts = {});

/// Theorem 5.2 perturbation bracket: F^eps = F + eps (r - M0) above and
/// F_eps = F + eps (r - m0) below, with M0 = sup phi0 and m0 the B*rho lower
/// bound constant.
struct PerturbedBracket {
    ProblemSpec upper;  // F^eps
    ProblemSpec lower;  // F_eps
    double M0 = 0.0;
    double m0 = 0.0;
    double B = 0.0;
};
PerturbedBracket perturbed_bracket(const ProblemSpec& problem, double eps);

struct ConvergenceRow {
    double t = 0.0;
    double sup_dist = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;      // every snapshot
    double fitted_rate = 0.0;              // least-squares slope in the window
    int window_points = 0;
    std::array<double, 2> window{0.0, 0.0};  // distance window actually used
    std::string to_text() const;
};

/// Distance table t -> sup|phi_t - reference| plus the fitted decay exponent
/// over the window where distance lies in [10*steady_tol, 0.5*initial].
/// Throws WindowEmpty when fewer than two snapshots land in the window.
ConvergenceReport convergence_report(const Trajectory& traj, const ScalarField& reference,
                                     double steady_tol = 1e-8);

}  // namespace cmaflow
