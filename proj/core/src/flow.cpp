#include "cmaflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmaflow/errors.hpp"
#include "cmaflow/pshtools.hpp"

namespace cmaflow {

double Ffun::slope_bound(double rlo, double rhi, const Point& probe) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return std::abs(alpha);
        case Kind::ArcTan: {
            if (rlo <= 0.0 && rhi >= 0.0) return 1.0;
            const double m = std::min(std::abs(rlo), std::abs(rhi));
            return 1.0 / (1.0 + m * m);
        }
        case Kind::Custom: {
            double s = 0.0;
            const int K = 64;
            const double span = std::max(rhi - rlo, 1e-6);
            for (int i = 0; i < K; ++i) {
                const double r = rlo + span * i / (K - 1);
                const double d = 1e-4 * std::max(1.0, std::abs(r));
                s = std::max(s, std::abs(custom(0.0, probe, r + d) - custom(0.0, probe, r - d)) / (2 * d));
            }
            return s;
        }
    }
    return 0.0;
}

double Mufun::operator()(double t, const Point& z) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::Radial: return value * 0.5 * (1.0 + z.norm2());
        case Kind::VanishingDisc: {
            const double d = dist(z, center);
            if (d <= r0) return 0.0;
            const double s = (d - r0) / ramp;
            return s >= 1.0 ? value : value * s * s;
        }
        case Kind::Custom: return custom(t, z);
    }
    return 0.0;
}

void ProblemSpec::validate() const {
    if (!mesh) throw ConfigError("problem has no mesh");
    if (!(horizon > 0)) throw ConfigError("horizon must be positive");
    if (phi0.mesh != mesh) throw MeshMismatch("phi0 does not live on the problem mesh");
    if (!phi0.all_finite()) throw NonFinite("phi0 has non-finite values");

    // F nondecreasing in r on a probe grid.
    const double rlo = phi0.min_everywhere() - 5.0;
    const double rhi = phi0.max_everywhere() + 5.0;
    const int zstride = std::max(1, mesh->num_interior() / 32);
    std::vector<double> tprobe{0.0};
    if (F.time_dependent && std::isfinite(horizon)) {
        tprobe.push_back(0.5 * horizon);
        tprobe.push_back(0.99 * horizon);
    }
    for (const double t : tprobe)
        for (int s = 0; s < mesh->num_interior(); s += zstride) {
            const Point& z = mesh->pos[static_cast<std::size_t>(
                mesh->interior_nodes[static_cast<std::size_t>(s)])];
            double prev = -std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 16; ++i) {
                const double r = rlo + (rhi - rlo) * i / 16.0;
                const double f = F(t, z, r);
                if (!std::isfinite(f)) throw NonFinite("F produced a non-finite value");
                if (f < prev - 1e-12) throw ConfigError("F must be nondecreasing in r");
                prev = f;
            }
        }

    // mu >= 0, finite.
    for (const double t : tprobe)
        for (int k = 0; k < mesh->num_nodes(); ++k) {
            const double m = mu(t, mesh->pos[static_cast<std::size_t>(k)]);
            if (!std::isfinite(m)) throw NonFinite("mu produced a non-finite value");
            if (m < 0.0) throw ConfigError("mu must be nonnegative");
        }

    // phi0 discretely psh with h-proportional tolerance.
    const auto rep = is_psh(phi0, frames, psh_tol_c * mesh->h);
    if (!rep.pass) throw ConfigError("phi0 is not plurisubharmonic within tolerance");
}

namespace {

/// Shared machinery for both steps: one pass computing the log-density
/// residual (which does not depend on dt for the explicit step).
struct Engine {
    const ProblemSpec& prob;
    Stencil st;
    std::vector<double> mu_log;  // log(max(mu,kappa)) per interior slot (static mu)
    std::vector<int> mu_floored;
    bool mu_cached = false;
    double kappa;

    Engine(const ProblemSpec& p, double kappa_) : prob(p), st(*p.mesh, p.frames), kappa(kappa_) {
        if (!prob.mu.time_dependent) {
            cache_mu(0.0);
            mu_cached = true;
        }
    }

    void cache_mu(double t) {
        const GridMesh& m = *prob.mesh;
        const int ni = m.num_interior();
        mu_log.resize(static_cast<std::size_t>(ni));
        mu_floored.assign(static_cast<std::size_t>(ni), 0);
        for (int s = 0; s < ni; ++s) {
            const double mu =
                prob.mu(t, m.pos[static_cast<std::size_t>(m.interior_nodes[static_cast<std::size_t>(s)])]);
            if (mu < kappa) mu_floored[static_cast<std::size_t>(s)] = 1;
            mu_log[static_cast<std::size_t>(s)] = std::log(std::max(mu, kappa));
        }
    }

    struct Prepared {
        std::vector<double> update;  // d(phi)/dt per interior slot
        double min_ma = 0.0;
        double min_line_lap = 0.0;
        int ma_floor_hits = 0;
        int mu_floor_hits = 0;
    };

    /// Evaluates the explicit right-hand side at time t (F at time t_f;
    /// include_f = false leaves only the log-density part).
    Prepared prepare(const std::vector<double>& vals, double t, double t_f, bool include_f = true) {
        const GridMesh& m = *prob.mesh;
        const int ni = m.num_interior();
        if (!mu_cached) cache_mu(t);
        Prepared out;
        out.update.resize(static_cast<std::size_t>(ni));
        out.min_ma = std::numeric_limits<double>::infinity();
        out.min_line_lap = std::numeric_limits<double>::infinity();
        const int n = prob.frames.n;
        for (int s = 0; s < ni; ++s) {
            double min_line;
            const double fm = st.frame_min(vals, s, &min_line);
            out.min_line_lap = std::min(out.min_line_lap, min_line);
            const double ma = fm <= 0.0 ? 0.0 : (n == 1 ? fm : fm * fm);
            out.min_ma = std::min(out.min_ma, ma);
            double logma;
            if (ma < kappa) {
                ++out.ma_floor_hits;
                logma = std::log(kappa);
            } else {
                logma = std::log(ma);
            }
            out.mu_floor_hits += mu_floored[static_cast<std::size_t>(s)];
            const int node = m.interior_nodes[static_cast<std::size_t>(s)];
            double u = logma - mu_log[static_cast<std::size_t>(s)];
            if (include_f)
                u -= prob.F(t_f, m.pos[static_cast<std::size_t>(node)],
                            vals[static_cast<std::size_t>(node)]);
            out.update[static_cast<std::size_t>(s)] = u;
        }
        return out;
    }

    double cfl_bound(const Prepared& p, const std::vector<double>& vals, double c_cfl) const {
        double rlo = std::numeric_limits<double>::infinity(), rhi = -rlo;
        for (const double v : vals) {
            rlo = std::min(rlo, v);
            rhi = std::max(rhi, v);
        }
        const double h = prob.mesh->h;
        const double slope = prob.F.slope_bound(rlo, rhi);
        return c_cfl * h * h * std::max(p.min_ma, kappa) / (1.0 + slope);
    }
};

void stamp_band(ScalarField& f, const ProblemSpec& prob, double t) {
    if (!prob.time_dependent_boundary || !prob.boundary) return;
    for (const int node : f.mesh->band_nodes)
        f[node] = prob.boundary(t, f.mesh->pos[static_cast<std::size_t>(node)]);
}

void fill_diag(StepDiagnostics* diag, double t, double dt, double sup, const Engine::Prepared& p) {
    if (!diag) return;
    diag->t = t;
    diag->dt = dt;
    diag->sup_update = sup;
    diag->ma_floor_hits = p.ma_floor_hits;
    diag->mu_floor_hits = p.mu_floor_hits;
    diag->min_line_laplacian = p.min_line_lap;
}

}  // namespace

FlowState step_explicit(const FlowState& state, const ProblemSpec& problem, double dt,
                        double kappa, StepDiagnostics* diag, const DtPolicy* policy) {
    if (!(dt > 0)) throw ConfigError("dt must be positive");
    if (!(kappa > 0)) throw ConfigError("kappa must be positive");
    Engine eng(problem, kappa);
    const auto prep = eng.prepare(state.field.v, state.t, state.t);
    if (policy && policy->enforce_cfl) {
        const double bound = eng.cfl_bound(prep, state.field.v, policy->c_cfl);
        if (dt > bound * (1.0 + 1e-12))
            throw CflViolation("dt exceeds the CFL bound " + std::to_string(bound));
    }
    FlowState next{state.t + dt, state.field};
    double sup = 0.0;
    const GridMesh& m = *problem.mesh;
    for (int s = 0; s < m.num_interior(); ++s) {
        const double du = dt * prep.update[static_cast<std::size_t>(s)];
        next.field[m.interior_nodes[static_cast<std::size_t>(s)]] += du;
        sup = std::max(sup, std::abs(du));
    }
    if (!std::isfinite(sup)) throw NonFinite("step_explicit produced a non-finite update");
    stamp_band(next.field, problem, next.t);
    fill_diag(diag, next.t, dt, sup, prep);
    return next;
}

FlowState step_semi_implicit(const FlowState& state, const ProblemSpec& problem, double dt,
                             double kappa, StepDiagnostics* diag, const DtPolicy* policy) {
    if (!(dt > 0)) throw ConfigError("dt must be positive");
    Engine eng(problem, kappa);
    // Log-density part at the old state; F is treated implicitly at t+dt.
    const auto prep0 = eng.prepare(state.field.v, state.t, state.t, /*include_f=*/false);
    if (policy && policy->enforce_cfl) {
        const double bound = eng.cfl_bound(prep0, state.field.v, policy->c_cfl);
        if (dt > bound * (1.0 + 1e-12))
            throw CflViolation("dt exceeds the CFL bound " + std::to_string(bound));
    }
    const GridMesh& m = *problem.mesh;
    const double tn = state.t + dt;
    FlowState next{tn, state.field};
    double sup = 0.0;
    for (int s = 0; s < m.num_interior(); ++s) {
        const int node = m.interior_nodes[static_cast<std::size_t>(s)];
        const Point& z = m.pos[static_cast<std::size_t>(node)];
        const double old = state.field[node];
        const double rhs = old + dt * prep0.update[static_cast<std::size_t>(s)];
        // Solve c + dt F(tn,z,c) = rhs; the left side is strictly increasing.
        const auto g = [&](double c) { return c + dt * problem.F(tn, z, c) - rhs; };
        double w = std::max(1.0, 2.0 * dt * std::abs(problem.F(tn, z, old)) + std::abs(rhs - old));
        double lo = old - w, hi = old + w;
        bool ok = false;
        for (int tries = 0; tries < 60; ++tries) {
            if (g(lo) <= 0.0 && g(hi) >= 0.0) {
                ok = true;
                break;
            }
            w *= 2.0;
            lo = old - w;
            hi = old + w;
        }
        if (!ok) throw RootBracketFailure("step_semi_implicit: cannot bracket the node solve");
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) <= 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double c = 0.5 * (lo + hi);
        next.field[node] = c;
        sup = std::max(sup, std::abs(c - old));
    }
    if (!std::isfinite(sup)) throw NonFinite("step_semi_implicit produced a non-finite update");
    stamp_band(next.field, problem, tn);
    fill_diag(diag, tn, dt, sup, prep0);
    return next;
}

Trajectory run_flow(const ProblemSpec& problem, const DtPolicy& policy,
                    const std::vector<double>& snapshot_times, bool semi_implicit) {
    problem.validate();
    const GridMesh& m = *problem.mesh;

    std::vector<double> snaps = snapshot_times;
    std::sort(snaps.begin(), snaps.end());

    Trajectory traj;
    Engine eng(problem, policy.kappa);

    FlowState st{0.0, problem.phi0};
    if (problem.boundary)
        for (const int node : m.band_nodes)
            st.field[node] = problem.boundary(0.0, m.pos[static_cast<std::size_t>(node)]);

    std::size_t next_snap = 0;
    const auto record_if_due = [&](const FlowState& s) {
        while (next_snap < snaps.size() && snaps[next_snap] <= s.t + 1e-12) {
            traj.times.push_back(snaps[next_snap]);
            traj.snapshots.push_back(s.field);
            ++next_snap;
        }
    };
    record_if_due(st);

    const double T = problem.horizon;
    while (st.t < T) {
        const auto prep = eng.prepare(st.field.v, st.t, st.t);
        double dt;
        if (policy.kind == DtPolicy::Kind::Cfl) {
            dt = eng.cfl_bound(prep, st.field.v, policy.c_cfl);
        } else {
            dt = policy.fixed_dt;
            if (policy.enforce_cfl) {
                const double bound = eng.cfl_bound(prep, st.field.v, policy.c_cfl);
                if (dt > bound * (1.0 + 1e-12))
                    throw CflViolation("fixed dt exceeds the CFL bound");
            }
        }
        if (!(dt > 0) || !std::isfinite(dt)) throw NonFinite("run_flow: bad dt");
        // Land exactly on the next snapshot / horizon.
        double target = T;
        if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
        if (st.t + dt > target) dt = target - st.t;

        StepDiagnostics diag;
        if (semi_implicit) {
            st = step_semi_implicit(st, problem, dt, policy.kappa, &diag, nullptr);
        } else {
            // prep already computed; apply directly for speed.
            FlowState next{st.t + dt, std::move(st.field)};
            double sup = 0.0;
            for (int s = 0; s < m.num_interior(); ++s) {
                const double du = dt * prep.update[static_cast<std::size_t>(s)];
                next.field[m.interior_nodes[static_cast<std::size_t>(s)]] += du;
                sup = std::max(sup, std::abs(du));
            }
            if (!std::isfinite(sup)) throw NonFinite("run_flow: non-finite update");
            if (problem.time_dependent_boundary && problem.boundary)
                for (const int node : m.band_nodes)
                    next.field[node] = problem.boundary(next.t, m.pos[static_cast<std::size_t>(node)]);
            diag.t = next.t;
            diag.dt = dt;
            diag.sup_update = sup;
            diag.ma_floor_hits = prep.ma_floor_hits;
            diag.mu_floor_hits = prep.mu_floor_hits;
            diag.min_line_laplacian = prep.min_line_lap;
            st = std::move(next);
        }
        traj.steps.push_back(diag);
        ++traj.total_steps;
        record_if_due(st);

        if (diag.sup_update / diag.dt < policy.steady_tol) {
            traj.reached_steady = true;
            traj.steady_time = st.t;
            break;
        }
    }

    // Steady state reached (or horizon hit): remaining snapshots hold the
    // final field.
    while (next_snap < snaps.size()) {
        traj.times.push_back(snaps[next_snap]);
        traj.snapshots.push_back(st.field);
        ++next_snap;
    }
    return traj;
}

RescaledFlow alpha_rescale(const ProblemSpec& problem) {
    if (problem.F.kind != Ffun::Kind::Linear || problem.F.offset != 0.0 || !(problem.F.alpha > 0))
        throw FormMismatch("alpha_rescale requires F(t,z,r) = alpha*r with alpha > 0");
    if (problem.mu.time_dependent)
        throw FormMismatch("alpha_rescale requires time-independent mu");

    RescaledFlow out;
    out.alpha = problem.F.alpha;
    out.n = problem.mesh->domain.n;
    out.problem = problem;
    out.problem.F = Ffun::zero();

    const double alpha = out.alpha;
    const int n = out.n;
    const Mufun base_mu = problem.mu;
    out.problem.mu = Mufun::custom_fn(
        [alpha, n, base_mu](double s, const Point& z) {
            return std::pow(alpha * (s + 1.0), n) * base_mu(0.0, z);
        },
        true);

    // psi(0,.) = alpha * phi(0,.)
    out.problem.phi0 = problem.phi0;
    for (double& v : out.problem.phi0.v) v *= alpha;
    if (problem.boundary) {
        const auto g = problem.boundary;
        out.problem.boundary = [g, alpha](double s, const Point& z) {
            return alpha * (1.0 + s) * g(std::log1p(s) / alpha, z);
        };
        out.problem.time_dependent_boundary = true;
    }
    out.problem.horizon = std::isfinite(problem.horizon) ? std::expm1(alpha * problem.horizon)
                                                         : problem.horizon;
    return out;
}

FlowState RescaledFlow::forward(const FlowState& phi_state) const {
    FlowState out;
    out.t = s_of_t(phi_state.t);
    out.field = phi_state.field;
    const double c = alpha * (1.0 + out.t);
    for (double& v : out.field.v) v *= c;
    return out;
}

FlowState RescaledFlow::inverse(const FlowState& psi_state) const {
    FlowState out;
    out.t = t_of_s(psi_state.t);
    out.field = psi_state.field;
    const double c = alpha * (1.0 + psi_state.t);
    for (double& v : out.field.v) v /= c;
    return out;
}

double UntwistedFlow::g(double t) const {
    const auto& tg = *t_grid;
    const auto& gg = *g_grid;
    if (t <= tg.front()) return gg.front();
    if (t >= tg.back()) return gg.back();
    const auto it = std::upper_bound(tg.begin(), tg.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - tg.begin());
    const double w = (t - tg[i - 1]) / (tg[i] - tg[i - 1]);
    return gg[i - 1] + w * (gg[i] - gg[i - 1]);
}

double UntwistedFlow::gamma(double s) const {
    const auto& tg = *t_grid;
    const auto& gg = *g_grid;
    if (s <= gg.front()) return tg.front();
    if (s >= gg.back()) return tg.back();
    const auto it = std::upper_bound(gg.begin(), gg.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - gg.begin());
    const double w = (s - gg[i - 1]) / (gg[i] - gg[i - 1]);
    return tg[i - 1] + w * (tg[i] - tg[i - 1]);
}

UntwistedFlow twist_change_of_variables(const ProblemSpec& problem, int samples) {
    if (!problem.twist) throw FormMismatch("problem carries no twist");
    if (!std::isfinite(problem.horizon))
        throw ConfigError("twist removal needs a finite horizon");

    auto tg = std::make_shared<std::vector<double>>();
    auto gg = std::make_shared<std::vector<double>>();
    tg->reserve(static_cast<std::size_t>(samples) + 1);
    gg->reserve(static_cast<std::size_t>(samples) + 1);
    const double dt = problem.horizon / samples;
    double acc = 0.0;
    double prev = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = i * dt;
        const double h = problem.twist(t);
        if (!(h > 0)) throw NonPositiveTwist("twist h(t) must be positive");
        const double inv = 1.0 / h;
        if (i > 0) acc += 0.5 * dt * (prev + inv);
        prev = inv;
        tg->push_back(t);
        gg->push_back(acc);
    }

    UntwistedFlow out;
    out.t_grid = tg;
    out.g_grid = gg;
    out.problem = problem;
    out.problem.twist = nullptr;
    out.problem.horizon = gg->back();

    const auto gamma_of = [tg, gg](double s) {
        if (s <= gg->front()) return tg->front();
        if (s >= gg->back()) return tg->back();
        const auto it = std::upper_bound(gg->begin(), gg->end(), s);
        const std::size_t i = static_cast<std::size_t>(it - gg->begin());
        const double w = (s - (*gg)[i - 1]) / ((*gg)[i] - (*gg)[i - 1]);
        return (*tg)[i - 1] + w * ((*tg)[i] - (*tg)[i - 1]);
    };

    const Ffun baseF = problem.F;
    out.problem.F = Ffun::custom_fn(
        [baseF, gamma_of](double s, const Point& z, double r) { return baseF(gamma_of(s), z, r); },
        true);
    const Mufun baseMu = problem.mu;
    out.problem.mu = Mufun::custom_fn(
        [baseMu, gamma_of](double s, const Point& z) { return baseMu(gamma_of(s), z); },
        baseMu.time_dependent);
    if (problem.boundary && problem.time_dependent_boundary) {
        const auto g0 = problem.boundary;
        out.problem.boundary = [g0, gamma_of](double s, const Point& z) {
            return g0(gamma_of(s), z);
        };
    }
    return out;
}

}  // namespace cmaflow
