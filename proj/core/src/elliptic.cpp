#include "cmaflow/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cmaflow/errors.hpp"
#include "cmaflow/operators.hpp"
#include "cmaflow/pshtools.hpp"

namespace cmaflow {

std::string EllipticResult::residual_report() const {
    std::ostringstream os;
    char buf[128];
    os << "sweeps=" << sweeps << '\n';
    std::snprintf(buf, sizeof buf, "final_change=%.6e\n", final_change);
    os << buf;
    std::snprintf(buf, sizeof buf, "max_residual=%.6e\n", max_residual);
    os << buf;
    os << "degenerate_nodes=" << degenerate_nodes.size() << '\n';
    return os.str();
}

namespace {

/// Crossing of the frame-minimum with zero as the center value varies:
/// the largest center c keeping every frame average >= 0, i.e. the smallest
/// over frames of the coefficient-weighted average of the line averages.
/// For n = 1 this is the plain four-point complex-line average.
double maximal_psh_center(const Stencil& st, const std::vector<double>& vals, int slot) {
    const FrameSet& fs = st.frames;
    double best = std::numeric_limits<double>::infinity();
    for (int f = 0; f < fs.num_frames(); ++f) {
        const auto& ids = fs.frame_dirs[static_cast<std::size_t>(f)];
        const auto& cf = fs.frame_coeff[static_cast<std::size_t>(f)];
        double num = 0.0, den = 0.0;
        for (int i = 0; i < fs.n; ++i) {
            const int d = ids[static_cast<std::size_t>(i)];
            const std::int32_t* p = &st.nbr[(static_cast<std::size_t>(slot) * st.ndir + d) * 4];
            const double avg = 0.25 * (vals[static_cast<std::size_t>(p[0])] +
                                       vals[static_cast<std::size_t>(p[1])] +
                                       vals[static_cast<std::size_t>(p[2])] +
                                       vals[static_cast<std::size_t>(p[3])]);
            const double w = cf[static_cast<std::size_t>(i)] * st.inv_scale[static_cast<std::size_t>(d)];
            num += w * avg;
            den += w;
        }
        best = std::min(best, num / den);
    }
    return best;
}

/// Frame-min of the scheme with the center value overridden by c.
double frame_min_with_center(const Stencil& st, const std::vector<double>& vals, int slot,
                             double c) {
    const FrameSet& fs = st.frames;
    double best = std::numeric_limits<double>::infinity();
    for (int f = 0; f < fs.num_frames(); ++f) {
        const auto& ids = fs.frame_dirs[static_cast<std::size_t>(f)];
        const auto& cf = fs.frame_coeff[static_cast<std::size_t>(f)];
        double s = 0.0;
        for (int i = 0; i < fs.n; ++i) {
            const int d = ids[static_cast<std::size_t>(i)];
            const std::int32_t* p = &st.nbr[(static_cast<std::size_t>(slot) * st.ndir + d) * 4];
            const double sum4 = vals[static_cast<std::size_t>(p[0])] +
                                vals[static_cast<std::size_t>(p[1])] +
                                vals[static_cast<std::size_t>(p[2])] +
                                vals[static_cast<std::size_t>(p[3])];
            s += cf[static_cast<std::size_t>(i)] * (sum4 - 4.0 * c) *
                 st.inv_scale[static_cast<std::size_t>(d)];
        }
        best = std::min(best, s / fs.n);
    }
    return best;
}

double ma_with_center(const Stencil& st, const std::vector<double>& vals, int slot, double c) {
    const double s = frame_min_with_center(st, vals, slot, c);
    if (s <= 0.0) return 0.0;
    return st.frames.n == 1 ? s : s * s;
}

}  // namespace

EllipticResult solve_dirichlet(const GridMesh& mesh, const FrameSet& frames, const Ffun& F,
                               const Mufun& mu, const std::function<double(const Point&)>& g,
                               const EllipticOptions& opts) {
    return solve_dirichlet(mesh, frames, F, mu, dirichlet_trace(mesh, g), opts);
}

EllipticResult solve_dirichlet(const GridMesh& mesh, const FrameSet& frames, const Ffun& F,
                               const Mufun& mu, const std::vector<double>& band_values,
                               const EllipticOptions& opts) {
    if (band_values.size() != mesh.band_nodes.size())
        throw MeshMismatch("solve_dirichlet: band data does not match the mesh");
    const Stencil st(mesh, frames);
    const int ni = mesh.num_interior();
    const double t = opts.t_eval;

    EllipticResult res;
    res.field = ScalarField(mesh, 0.0);
    ScalarField& u = res.field;

    // Dirichlet data on the band; interior starts at the band minimum.
    double bmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.band_nodes.size(); ++i) {
        u[mesh.band_nodes[i]] = band_values[i];
        bmin = std::min(bmin, band_values[i]);
    }
    for (const int node : mesh.interior_nodes) u[node] = bmin;

    std::vector<double> mu_val(static_cast<std::size_t>(ni));
    std::vector<char> degenerate(static_cast<std::size_t>(ni), 0);
    for (int s = 0; s < ni; ++s) {
        const Point& z =
            mesh.pos[static_cast<std::size_t>(mesh.interior_nodes[static_cast<std::size_t>(s)])];
        const double m = mu(t, z);
        if (m < 0) throw ConfigError("solve_dirichlet: mu must be nonnegative");
        mu_val[static_cast<std::size_t>(s)] = m;
        if (m == 0.0) degenerate[static_cast<std::size_t>(s)] = 1;
    }

    // One interior node solve: the unique c with MA(c) = e^{F(z,c)} mu.
    const auto node_solve = [&](const std::vector<double>& vals, int s) {
        const int node = mesh.interior_nodes[static_cast<std::size_t>(s)];
        const Point& z = mesh.pos[static_cast<std::size_t>(node)];
        const double m = mu_val[static_cast<std::size_t>(s)];
        if (m == 0.0) return maximal_psh_center(st, vals, s);

        // Bracket: MA - e^F mu is decreasing in c; positive for small c,
        // negative for large c.
        double nlo = std::numeric_limits<double>::infinity(), nhi = -nlo;
        const std::int32_t* p = &st.nbr[(static_cast<std::size_t>(s) * st.ndir + 0) * 4];
        for (int d = 0; d < st.ndir; ++d) {
            p = &st.nbr[(static_cast<std::size_t>(s) * st.ndir + d) * 4];
            for (int q = 0; q < 4; ++q) {
                nlo = std::min(nlo, vals[static_cast<std::size_t>(p[q])]);
                nhi = std::max(nhi, vals[static_cast<std::size_t>(p[q])]);
            }
        }
        double lo = nlo - 10.0, hi = nhi + 10.0;
        const auto resid = [&](double c) {
            return ma_with_center(st, vals, s, c) - std::exp(F(t, z, c)) * m;
        };
        for (int tries = 0; resid(lo) < 0.0; ++tries) {
            if (tries >= 60) throw RootBracketFailure("solve_dirichlet: lower bracket");
            lo -= (hi - lo);
        }
        for (int tries = 0; resid(hi) > 0.0; ++tries) {
            if (tries >= 60) throw RootBracketFailure("solve_dirichlet: upper bracket");
            hi += (hi - lo);
        }
        while (hi - lo > opts.bisection_tol) {
            const double mid = 0.5 * (lo + hi);
            if (resid(mid) >= 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    double change = std::numeric_limits<double>::infinity();
    int sweep = 0;
    std::vector<double> next;  // jacobi buffer
    for (; sweep < opts.max_sweeps && change > opts.tol; ++sweep) {
        change = 0.0;
        if (opts.jacobi) {
            next = u.v;
            for (int s = 0; s < ni; ++s) {
                const int node = mesh.interior_nodes[static_cast<std::size_t>(s)];
                const double c = node_solve(u.v, s);
                change = std::max(change, std::abs(c - u[node]));
                next[static_cast<std::size_t>(node)] = c;
            }
            u.v = next;
        } else {
            for (int s = 0; s < ni; ++s) {
                const int node = mesh.interior_nodes[static_cast<std::size_t>(s)];
                const double c = node_solve(u.v, s);
                double val = c;
                if (opts.omega != 1.0 && !degenerate[static_cast<std::size_t>(s)])
                    val = u[node] + opts.omega * (c - u[node]);
                change = std::max(change, std::abs(val - u[node]));
                u[node] = val;  // Gauss-Seidel: in place
            }
        }
    }
    res.sweeps = sweep;
    res.final_change = change;
    if (change > opts.tol)
        throw NoConvergence("solve_dirichlet: no convergence after " +
                            std::to_string(opts.max_sweeps) + " sweeps");

    for (int s = 0; s < ni; ++s) {
        const int node = mesh.interior_nodes[static_cast<std::size_t>(s)];
        const Point& z = mesh.pos[static_cast<std::size_t>(node)];
        const double lhs = st.ma_at(u.v, s);
        const double rhs = std::exp(F(t, z, u[node])) * mu_val[static_cast<std::size_t>(s)];
        res.max_residual = std::max(res.max_residual, std::abs(lhs - rhs));
        if (degenerate[static_cast<std::size_t>(s)]) res.degenerate_nodes.push_back(node);
    }
    return res;
}

PerturbedBracket perturbed_bracket(const ProblemSpec& problem, double eps) {
    if (eps < 0) throw ConfigError("perturbed_bracket: eps must be >= 0");
    const GridMesh& mesh = *problem.mesh;

    PerturbedBracket out;
    out.M0 = problem.phi0.max_everywhere();

    // Lower bound constant from the B*rho subsolution: B^n MA(rho) >= e^{F(z,0)} mu.
    const ScalarField rho_field =
        ScalarField::sample(mesh, [&](const Point& z) { return mesh.domain.rho(z); });
    const ScalarField ma_rho = ma_density(rho_field, problem.frames);
    double min_ma_rho = std::numeric_limits<double>::infinity();
    for (const int node : mesh.interior_nodes) min_ma_rho = std::min(min_ma_rho, ma_rho[node]);
    double rhs_max = 0.0;
    for (const int node : mesh.interior_nodes) {
        const Point& z = mesh.pos[static_cast<std::size_t>(node)];
        rhs_max = std::max(rhs_max, std::exp(problem.F(0.0, z, 0.0)) * problem.mu(0.0, z));
    }
    const int n = mesh.domain.n;
    out.B = std::max(1.0, std::pow(rhs_max / std::max(min_ma_rho, 1e-300), 1.0 / n));
    // m0 = min(B rho) - max(B rho - phi0)_+
    double max_gap = 0.0;
    double min_brho = std::numeric_limits<double>::infinity();
    for (int k = 0; k < mesh.num_nodes(); ++k) {
        const double brho = out.B * rho_field[k];
        min_brho = std::min(min_brho, brho);
        max_gap = std::max(max_gap, std::max(brho - problem.phi0[k], 0.0));
    }
    out.m0 = min_brho - max_gap;

    const Ffun baseF = problem.F;
    const double M0 = out.M0, m0 = out.m0;
    out.upper = problem;
    out.upper.F = Ffun::custom_fn(
        [baseF, eps, M0](double t, const Point& z, double r) {
            return baseF(t, z, r) + eps * (r - M0);
        },
        baseF.time_dependent);
    out.lower = problem;
    out.lower.F = Ffun::custom_fn(
        [baseF, eps, m0](double t, const Point& z, double r) {
            return baseF(t, z, r) + eps * (r - m0);
        },
        baseF.time_dependent);
    return out;
}

std::string ConvergenceReport::to_text() const {
    std::ostringstream os;
    char buf[128];
    os << "t\tsup_dist\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g\t%.10e\n", r.t, r.sup_dist);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "fitted_rate=%.6f over %d points\n", fitted_rate,
                  window_points);
    os << buf;
    return os.str();
}

ConvergenceReport convergence_report(const Trajectory& traj, const ScalarField& reference,
                                     double steady_tol) {
    if (traj.snapshots.empty()) throw WindowEmpty("convergence_report: empty trajectory");
    ConvergenceReport rep;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        if (traj.snapshots[i].mesh != reference.mesh)
            throw MeshMismatch("convergence_report: mesh mismatch");
        rep.rows.push_back({traj.times[i], sup_distance(traj.snapshots[i], reference)});
    }
    const double d0 = rep.rows.front().sup_dist;
    rep.window = {10.0 * steady_tol, 0.5 * d0};

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& r : rep.rows) {
        if (r.sup_dist < rep.window[0] || r.sup_dist > rep.window[1]) continue;
        const double x = r.t, y = std::log(r.sup_dist);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    rep.window_points = m;
    const double det = m * sxx - sx * sx;
    if (m < 2 || std::abs(det) < 1e-30)
        throw WindowEmpty("convergence_report: no usable fit window");
    rep.fitted_rate = (m * sxy - sx * sy) / det;
    return rep;
}

}  // namespace cmaflow
