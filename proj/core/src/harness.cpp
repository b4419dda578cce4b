#include "cmaflow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "cmaflow/errors.hpp"
#include "cmaflow/operators.hpp"

namespace cmaflow {

SpaceTimeField SpaceTimeField::from_trajectory(const Trajectory& traj) {
    SpaceTimeField out;
    out.times = traj.times;
    out.slices = traj.snapshots;
    return out;
}

SpaceTimeField SpaceTimeField::from_barrier(const BarrierSpec& bar,
                                            const std::vector<double>& times) {
    SpaceTimeField out;
    out.times = times;
    out.slices.reserve(times.size());
    for (const double t : times) out.slices.push_back(bar.slice(t));
    return out;
}

SpaceTimeField SpaceTimeField::constant(const GridMesh& mesh, const std::vector<double>& times,
                                        double value) {
    SpaceTimeField out;
    out.times = times;
    out.slices.assign(times.size(), ScalarField(mesh, value));
    return out;
}

namespace {

ResidualReport certify(const SpaceTimeField& w, const ProblemSpec& problem, double tol,
                       int sign) {
    if (w.times.size() < 2) throw ConfigError("certify: need at least two snapshots");
    const GridMesh& mesh = *problem.mesh;
    ResidualReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < w.times.size(); ++i) {
        const double t = w.times[i];
        const double dt = w.times[i + 1] - w.times[i];
        const ScalarField ma = ma_density(w.slices[i], problem.frames);
        for (const int node : mesh.interior_nodes) {
            const double here = w.slices[i][node];
            const double dtu = (w.slices[i + 1][node] - here) / dt;
            const double rhs =
                std::exp(dtu + problem.F(t, mesh.pos[static_cast<std::size_t>(node)], here)) *
                problem.mu(t, mesh.pos[static_cast<std::size_t>(node)]);
            const double slack = sign > 0 ? ma[node] - rhs : rhs - ma[node];
            if (slack < rep.min_slack) {
                rep.min_slack = slack;
                rep.worst_t = t;
                rep.worst_node = node;
            }
        }
    }
    rep.pass = rep.min_slack >= -tol;
    return rep;
}

}  // namespace

ResidualReport certify_subsolution(const SpaceTimeField& u, const ProblemSpec& problem,
                                   double tol) {
    return certify(u, problem, tol, +1);
}

ResidualReport certify_supersolution(const SpaceTimeField& v, const ProblemSpec& problem,
                                     double tol) {
    return certify(v, problem, tol, -1);
}

std::string ComparisonReport::to_text() const {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "lhs=%.12e\nrhs=%.12e\npass=%s\n", lhs, rhs,
                  pass ? "yes" : "no");
    os << buf;
    std::snprintf(buf, sizeof buf, "worst_t=%.10g worst_node=%d\n", worst_t, worst_node);
    os << buf;
    return os.str();
}

ComparisonReport comparison_check(const SpaceTimeField& u, const SpaceTimeField& v, double tol) {
    if (u.slices.empty() || v.slices.empty()) throw ConfigError("comparison_check: empty input");
    if (u.slices.size() != v.slices.size())
        throw MeshMismatch("comparison_check: snapshot grids differ");
    const GridMesh* mesh = u.slices.front().mesh;
    if (mesh != v.slices.front().mesh) throw MeshMismatch("comparison_check: meshes differ");
    for (std::size_t i = 0; i < u.times.size(); ++i)
        if (std::abs(u.times[i] - v.times[i]) > 1e-12)
            throw MeshMismatch("comparison_check: snapshot times differ");

    ComparisonReport rep;
    rep.lhs = -std::numeric_limits<double>::infinity();
    rep.rhs = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.slices.size(); ++i) {
        for (int k = 0; k < mesh->num_nodes(); ++k) {
            const double d = u.slices[i][k] - v.slices[i][k];
            if (d > rep.lhs) {
                rep.lhs = d;
                rep.worst_t = u.times[i];
                rep.worst_node = k;
            }
            const bool on_parabolic_boundary = (i == 0) || !mesh->is_interior(k);
            if (on_parabolic_boundary) rep.rhs = std::max(rep.rhs, d);
        }
    }
    rep.pass = rep.lhs <= std::max(0.0, rep.rhs) + tol;
    return rep;
}

PerronReport perron_lower_envelope_check(const std::vector<SpaceTimeField>& family,
                                         const SpaceTimeField& flow, double tol) {
    PerronReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    const GridMesh* mesh = flow.slices.front().mesh;
    for (const auto& member : family) {
        if (member.slices.size() != flow.slices.size())
            throw MeshMismatch("perron check: snapshot grids differ");
        for (std::size_t i = 0; i < flow.slices.size(); ++i)
            for (int k = 0; k < mesh->num_nodes(); ++k)
                rep.max_violation =
                    std::max(rep.max_violation, member.slices[i][k] - flow.slices[i][k]);
    }
    rep.pass = rep.max_violation <= tol;
    return rep;
}

TheoremAReport theorem_a_check(const Trajectory& traj, const FrameSet& frames, double tol) {
    TheoremAReport rep;
    rep.pass = true;
    rep.worst.min_line_laplacian = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const auto r = is_psh(traj.snapshots[i], frames, tol);
        if (r.min_line_laplacian < rep.worst.min_line_laplacian) rep.worst = r;
        if (!r.pass && rep.pass) {
            rep.pass = false;
            rep.first_bad_snapshot = static_cast<int>(i);
        }
    }
    return rep;
}

std::string PairSuiteReport::to_text() const {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "pairs=%d passed=%d worst_margin=%.3e rejected=%d\n", pairs,
                  passed, worst_margin, rejected_candidates);
    os << buf;
    return os.str();
}

PairSuiteReport comparison_pair_suite(const ProblemSpec& problem,
                                      const std::function<double(const Point&)>& phi0_ext,
                                      int pairs, std::uint64_t seed, double tol,
                                      const std::vector<double>& t_grid) {
    const GridMesh& mesh = *problem.mesh;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> eps_dist(0.25, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto adm =
        check_admissible(mesh, problem.frames,
                         extend_by_boundary_trace(mesh.domain, phi0_ext), problem.mu, 0.5, 1e-8);

    PairSuiteReport rep;
    rep.pairs = pairs;
    rep.worst_margin = -std::numeric_limits<double>::infinity();

    const auto smooth_bump = [&](const Point& center, double width, double amp) {
        return ScalarField::sample(mesh, [&](const Point& z) {
            const double d = dist(z, center);
            if (d >= width) return 0.0;
            const double q = 1.0 - (d / width) * (d / width);
            return amp * q * q;
        });
    };

    for (int p = 0; p < pairs; ++p) {
        const double e1 = eps_dist(rng);
        const double e2 = eps_dist(rng);
        const BarrierSpec U = eps_subbarrier(problem, e1, t_grid, tol);
        const BarrierSpec V = eps_superbarrier(problem, e2, t_grid, adm, tol);

        // Interior bump centers away from the band.
        const int ci = mesh.interior_nodes[static_cast<std::size_t>(
            static_cast<int>(unit(rng) * (mesh.num_interior() - 1)))];
        const int cj = mesh.interior_nodes[static_cast<std::size_t>(
            static_cast<int>(unit(rng) * (mesh.num_interior() - 1)))];
        const double w1 = 0.1 + 0.2 * unit(rng);
        const double w2 = 0.1 + 0.2 * unit(rng);
        double a1 = 0.05 * unit(rng);
        double a2 = 0.05 * unit(rng);

        SpaceTimeField u = SpaceTimeField::from_barrier(U, t_grid);
        SpaceTimeField v = SpaceTimeField::from_barrier(V, t_grid);

        // Rejection by amplitude halving: shrink until the certificate holds.
        for (int tries = 0;; ++tries) {
            SpaceTimeField cand = u;
            const ScalarField bump = smooth_bump(mesh.pos[static_cast<std::size_t>(ci)], w1, a1);
            for (auto& s : cand.slices)
                for (int k = 0; k < mesh.num_nodes(); ++k)
                    if (mesh.is_interior(k)) s[k] -= bump[k];
            if (certify_subsolution(cand, problem, tol).pass) {
                u = cand;
                break;
            }
            ++rep.rejected_candidates;
            a1 *= 0.5;
            if (tries > 50) break;  // amplitude is zero for every practical purpose
        }
        for (int tries = 0;; ++tries) {
            SpaceTimeField cand = v;
            const ScalarField bump = smooth_bump(mesh.pos[static_cast<std::size_t>(cj)], w2, a2);
            for (auto& s : cand.slices)
                for (int k = 0; k < mesh.num_nodes(); ++k)
                    if (mesh.is_interior(k)) s[k] += bump[k];
            if (certify_supersolution(cand, problem, tol).pass) {
                v = cand;
                break;
            }
            ++rep.rejected_candidates;
            a2 *= 0.5;
            if (tries > 50) break;
        }

        const auto cmp = comparison_check(u, v, tol);
        rep.worst_margin = std::max(rep.worst_margin, cmp.lhs - std::max(0.0, cmp.rhs));
        if (cmp.pass) ++rep.passed;
    }
    return rep;
}

void report_emit(const Trajectory& traj, const std::optional<ConvergenceReport>& conv,
                 const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoFailure("report_emit: cannot create " + out_dir);

    const auto open = [&](const std::string& name) {
        std::ofstream f(out_dir + "/" + name);
        if (!f) throw IoFailure("report_emit: cannot write " + name);
        return f;
    };

    char buf[256];
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        std::snprintf(buf, sizeof buf, "snapshot_%04zu.csv", i);
        auto f = open(buf);
        write_field_csv(traj.snapshots[i], f, static_cast<int>(i), traj.times[i]);
    }
    {
        auto f = open("diagnostics.csv");
        f << "t,sup_update,ma_floor_hits,mu_floor_hits,min_line_laplacian\n";
        for (const auto& d : traj.steps) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%.17g\n", d.t, d.sup_update,
                          d.ma_floor_hits, d.mu_floor_hits, d.min_line_laplacian);
            f << buf;
        }
    }
    {
        auto f = open("sup_update.dat");
        for (const auto& d : traj.steps) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", d.t, d.sup_update);
            f << buf;
        }
    }
    if (conv) {
        {
            auto f = open("convergence.csv");
            f << "t,sup_dist\n";
            for (const auto& r : conv->rows) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.t, r.sup_dist);
                f << buf;
            }
        }
        auto f = open("distance.dat");
        for (const auto& r : conv->rows) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", r.t, r.sup_dist);
            f << buf;
        }
    }
    {
        auto f = open("summary.txt");
        f << "snapshots=" << traj.snapshots.size() << '\n';
        f << "steps=" << traj.total_steps << '\n';
        f << "reached_steady=" << (traj.reached_steady ? "yes" : "no") << '\n';
        std::snprintf(buf, sizeof buf, "steady_time=%.17g\n", traj.steady_time);
        f << buf;
        if (!traj.times.empty()) {
            std::snprintf(buf, sizeof buf, "final_time=%.17g\n", traj.times.back());
            f << buf;
        }
        if (conv) {
            std::snprintf(buf, sizeof buf, "fitted_rate=%.10g\nwindow_points=%d\n",
                          conv->fitted_rate, conv->window_points);
            f << buf;
        }
    }
}

}  // namespace cmaflow
