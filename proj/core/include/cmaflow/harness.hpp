#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cmaflow/barriers.hpp"
#include "cmaflow/elliptic.hpp"
#include "cmaflow/field.hpp"
#include "cmaflow/flow.hpp"
#include "cmaflow/pshtools.hpp"

namespace cmaflow {

/// A space-time sampled function on a shared mesh and snapshot grid.
struct SpaceTimeField {
    std::vector<double> times;
    std::vector<ScalarField> slices;

    static SpaceTimeField from_trajectory(const Trajectory& traj);
    static SpaceTimeField from_barrier(const BarrierSpec& bar, const std::vector<double>& times);
    static SpaceTimeField constant(const GridMesh& mesh, const std::vector<double>& times,
                                   double value);
};

struct ResidualReport {
    bool pass = false;
    double min_slack = 0.0;
    double worst_t = 0.0;
    int worst_node = -1;
};

/// Direct discrete residual checks on sampled space-time functions (forward
/// time differences; the last slice carries no certificate of its own).
ResidualReport certify_subsolution(const SpaceTimeField& u, const ProblemSpec& problem,
                                   double tol);
ResidualReport certify_supersolution(const SpaceTimeField& v, const ProblemSpec& problem,
                                     double tol);

struct ComparisonReport {
    double lhs = 0.0;  // max over snapshots and nodes of u - v
    double rhs = 0.0;  // max over the parabolic boundary of u - v
    bool pass = false;
    double worst_t = 0.0;
    int worst_node = -1;
    std::string to_text() const;
};

/// Theorem-B style check: max(u - v) <= max(0, max over the parabolic
/// boundary of (u - v)) + tol. The parabolic boundary is the t = 0 slice
/// (all nodes) plus the band at every snapshot. Throws MeshMismatch.
ComparisonReport comparison_check(const SpaceTimeField& u, const SpaceTimeField& v, double tol);

struct PerronReport {
    bool pass = false;
    double max_violation = 0.0;  // max over family, snapshots, nodes of (member - flow)
};

/// Verifies sup of a certified subsolution family <= flow + tol pointwise.
PerronReport perron_lower_envelope_check(const std::vector<SpaceTimeField>& family,
                                         const SpaceTimeField& flow, double tol);

struct TheoremAReport {
    bool pass = false;
    int first_bad_snapshot = -1;
    PshReport worst;
};

/// is_psh on every snapshot of a trajectory.
TheoremAReport theorem_a_check(const Trajectory& traj, const FrameSet& frames, double tol);

/// Seeded randomized certified sub/supersolution pair suite for the discrete
/// comparison inequality: eps-barriers perturbed by smooth compactly
/// supported bumps, rejection-sampled until certification passes.
struct PairSuiteReport {
    int pairs = 0;
    int passed = 0;
    double worst_margin = 0.0;  // max over pairs of lhs - max(0, rhs)
    int rejected_candidates = 0;
    std::string to_text() const;
};

PairSuiteReport comparison_pair_suite(const ProblemSpec& problem,
                                      const std::function<double(const Point&)>& phi0_ext,
                                      int pairs, std::uint64_t seed, double tol,
                                      const std::vector<double>& t_grid);

/// Writes snapshot_####.csv, diagnostics.csv, convergence.csv (when given),
/// summary.txt, and gnuplot-ready two-column .dat series into out_dir.
/// Deterministic names and content. Throws IoFailure.
void report_emit(const Trajectory& traj, const std::optional<ConvergenceReport>& conv,
                 const std::string& out_dir);

}  // namespace cmaflow
