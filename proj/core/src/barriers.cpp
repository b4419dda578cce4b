#include "cmaflow/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cmaflow/errors.hpp"
#include "cmaflow/operators.hpp"
#include "cmaflow/pshtools.hpp"

namespace cmaflow {

double TimeProfile::at(double time) const {
    if (t.empty()) return 0.0;
    if (time <= t.front()) return value.front();
    if (time >= t.back()) return value.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (time - t[i - 1]) / (t[i] - t[i - 1]);
    return value[i - 1] + w * (value[i] - value[i - 1]);
}

std::string CertificationReport::to_text() const {
    std::ostringstream os;
    char buf[128];
    os << "pass=" << (pass ? "yes" : "no") << '\n';
    std::snprintf(buf, sizeof buf, "min_slack=%.6e\n", min_slack);
    os << buf;
    std::snprintf(buf, sizeof buf, "worst_t=%.10g\n", worst_t);
    os << buf;
    os << "worst_node=" << worst_node << '\n';
    return os.str();
}

ScalarField BarrierSpec::slice(double t) const {
    ScalarField out(*base.mesh);
    for (int k = 0; k < base.mesh->num_nodes(); ++k) out[k] = eval(t, k);
    return out;
}

BProfile b_profile(const Ffun& F, const ScalarField& phi0, const std::vector<double>& t_grid) {
    const GridMesh& mesh = *phi0.mesh;
    BProfile out;
    out.b.t = t_grid;
    out.B.t = t_grid;
    out.b.value.reserve(t_grid.size());
    out.B.value.reserve(t_grid.size());
    double acc = 0.0, prev_pos = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double b = -std::numeric_limits<double>::infinity();
        for (const int node : mesh.interior_nodes)
            b = std::max(b, F(t_grid[i], mesh.pos[static_cast<std::size_t>(node)], phi0[node]));
        const double bp = std::max(b, 0.0);
        if (i > 0) acc += 0.5 * (t_grid[i] - t_grid[i - 1]) * (prev_pos + bp);
        prev_pos = bp;
        out.b.value.push_back(b);
        out.B.value.push_back(acc);
    }
    return out;
}

namespace {

double min_ma_of_rho(const ProblemSpec& problem) {
    const GridMesh& mesh = *problem.mesh;
    const ScalarField rho =
        ScalarField::sample(mesh, [&](const Point& z) { return mesh.domain.rho(z); });
    const ScalarField ma = ma_density(rho, problem.frames);
    double m = std::numeric_limits<double>::infinity();
    for (const int node : mesh.interior_nodes) m = std::min(m, ma[node]);
    return m;
}

double max_mu(const ProblemSpec& problem, const std::vector<double>& t_grid) {
    const GridMesh& mesh = *problem.mesh;
    double m = 0.0;
    for (const double t : t_grid) {
        for (const int node : mesh.interior_nodes)
            m = std::max(m, problem.mu(t, mesh.pos[static_cast<std::size_t>(node)]));
        if (!problem.mu.time_dependent) break;
    }
    return m;
}

/// Discrete residual certificate on the sampled time grid with forward
/// time differences. sign = +1 checks the subsolution inequality
/// MA >= e^{dt u + F} mu, sign = -1 the supersolution one.
CertificationReport certify_profile_barrier(const ProblemSpec& problem, const BarrierSpec& bar,
                                            const std::vector<double>& t_grid, int sign) {
    const GridMesh& mesh = *problem.mesh;
    CertificationReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();

    // The spatial part is time independent: one density evaluation.
    const ScalarField ma = ma_density(bar.base, problem.frames);

    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
        const double t = t_grid[i];
        const double dt = t_grid[i + 1] - t_grid[i];
        for (const int node : mesh.interior_nodes) {
            const double here = bar.eval(t, node);
            const double dtu = (bar.eval(t_grid[i + 1], node) - here) / dt;
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
    return rep;
}

}  // namespace

BarrierSpec global_subsolution(const ProblemSpec& problem, const std::vector<double>& t_grid,
                               double cert_tol) {
    const GridMesh& mesh = *problem.mesh;
    const int n = mesh.domain.n;
    BarrierSpec bar;
    bar.kind = BarrierKind::GlobalSub;

    const double mmu = max_mu(problem, t_grid);
    const double marho = min_ma_of_rho(problem);
    bar.A = mmu == 0.0 ? 0.0 : std::ceil(std::pow(mmu / marho, 1.0 / n) - 1e-12);

    const auto prof = b_profile(problem.F, problem.phi0, t_grid);
    bar.B = prof.B;

    bar.base = ScalarField(mesh);
    for (int k = 0; k < mesh.num_nodes(); ++k)
        bar.base[k] = bar.A * mesh.domain.rho(mesh.pos[static_cast<std::size_t>(k)]) + problem.phi0[k];

    const ScalarField* base = &bar.base;
    const TimeProfile B = bar.B;
    const ScalarField base_copy = bar.base;
    bar.eval = [base_copy, B](double t, int node) { return base_copy[node] - B.at(t); };
    (void)base;

    bar.cert = certify_profile_barrier(problem, bar, t_grid, +1);
    bar.cert.pass = bar.cert.min_slack >= -cert_tol;
    if (!bar.cert.pass)
        throw CertificationFailure("global_subsolution: residual check failed, slack " +
                                   std::to_string(bar.cert.min_slack));
    return bar;
}

BarrierSpec eps_subbarrier(const ProblemSpec& problem, double eps,
                           const std::vector<double>& t_grid, double cert_tol) {
    if (!(eps > 0)) throw ConfigError("eps_subbarrier: eps must be positive");
    const GridMesh& mesh = *problem.mesh;
    const int n = mesh.domain.n;
    BarrierSpec bar;
    bar.kind = BarrierKind::EpsSub;
    bar.eps = eps;

    const double mmu = max_mu(problem, t_grid);
    const double marho = min_ma_of_rho(problem);
    bar.M = mmu == 0.0 ? 0.0 : std::max(0.0, std::log(mmu / (std::pow(eps, n) * marho)));

    const auto prof = b_profile(problem.F, problem.phi0, t_grid);
    bar.B = prof.B;

    bar.base = ScalarField(mesh);
    for (int k = 0; k < mesh.num_nodes(); ++k)
        bar.base[k] = problem.phi0[k] + eps * mesh.domain.rho(mesh.pos[static_cast<std::size_t>(k)]);

    const ScalarField base_copy = bar.base;
    const TimeProfile B = bar.B;
    const double M = bar.M;
    bar.eval = [base_copy, B, M](double t, int node) { return base_copy[node] - B.at(t) - M * t; };

    bar.cert = certify_profile_barrier(problem, bar, t_grid, +1);
    bar.cert.pass = bar.cert.min_slack >= -cert_tol;
    if (!bar.cert.pass)
        throw CertificationFailure("eps_subbarrier: residual check failed, slack " +
                                   std::to_string(bar.cert.min_slack));
    return bar;
}

std::function<double(const Point&)> extend_by_boundary_trace(
    const DomainSpec& domain, std::function<double(const Point&)> f) {
    return [domain, f = std::move(f)](const Point& z) {
        if (domain.rho(z) <= 0.0) return f(z);
        return f(domain.project_to_boundary(z));
    };
}

AdmissibilityResult check_admissible(const GridMesh& mesh, const FrameSet& frames,
                                     const std::function<double(const Point&)>& phi0_ext,
                                     const Mufun& mu, double eps, double tol) {
    if (!(eps > 0)) throw ConfigError("check_admissible: eps must be positive");
    AdmissibilityResult out;
    const ScalarField phi0 = ScalarField::sample(mesh, phi0_ext);

    double mu_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < mesh.num_nodes(); ++k)
        mu_min = std::min(mu_min, mu(0.0, mesh.pos[static_cast<std::size_t>(k)]));

    if (mu_min > 0.0) {
        // Mollify phi0 at a scale sigma with sup|psi0 - phi0| <= eps/2, then
        // shift up by eps/2: phi0 <= psi0 <= phi0 + eps.
        const auto mollify = [&](double sigma) {
            ScalarField m(mesh);
            const int reach = std::max(1, static_cast<int>(std::ceil(sigma / mesh.h)));
            for (int k = 0; k < mesh.num_nodes(); ++k) {
                const Point& z = mesh.pos[static_cast<std::size_t>(k)];
                double acc = 0.0, wsum = 0.0;
                std::array<int, 4> off{0, 0, 0, 0};
                const int dim = mesh.real_dim();
                for (off[0] = -reach; off[0] <= reach; ++off[0])
                    for (off[1] = -reach; off[1] <= reach; ++off[1])
                        for (off[2] = (dim > 2 ? -reach : 0); off[2] <= (dim > 2 ? reach : 0); ++off[2])
                            for (off[3] = (dim > 2 ? -reach : 0); off[3] <= (dim > 2 ? reach : 0);
                                 ++off[3]) {
                                double d2 = 0.0;
                                for (int i = 0; i < dim; ++i)
                                    d2 += off[static_cast<std::size_t>(i)] *
                                          off[static_cast<std::size_t>(i)];
                                const double d = mesh.h * std::sqrt(d2);
                                if (d > sigma) continue;
                                const double q = 1.0 - (d / sigma) * (d / sigma);
                                const double w = q * q;
                                Point p = z;
                                for (int i = 0; i < dim; ++i)
                                    p[i] += off[static_cast<std::size_t>(i)] * mesh.h;
                                acc += w * phi0_ext(p);
                                wsum += w;
                            }
                m[k] = acc / wsum;
            }
            return m;
        };

        double sigma = 8.0 * mesh.h;
        ScalarField psi = mollify(sigma);
        double diff = sup_distance(psi, phi0);
        while (diff > 0.5 * eps && sigma > 0.51 * mesh.h) {
            sigma *= 0.5;
            psi = mollify(sigma);
            diff = sup_distance(psi, phi0);
        }
        if (diff > 0.5 * eps) {  // kernel reduced to the point mass
            psi = phi0;
            sigma = 0.0;
        }
        for (double& v : psi.v) v += 0.5 * eps;

        out.status = AdmissibilityResult::Status::Certified;
        out.psi0 = psi;
        out.sigma = sigma;
        const double max_ma = maximality_defect(psi, frames);
        out.C = max_ma == 0.0 ? 0.0 : std::log(max_ma / mu_min);
        out.psi0_psh = is_psh(psi, frames, 4.0 * mesh.h).pass;
        return out;
    }

    // mu vanishes somewhere: decide via the maximality obstruction.
    std::vector<int> zero_nodes;
    for (const int node : mesh.interior_nodes)
        if (mu(0.0, mesh.pos[static_cast<std::size_t>(node)]) == 0.0) zero_nodes.push_back(node);
    const Stencil st(mesh, frames);
    std::vector<int> slot_of_node(static_cast<std::size_t>(mesh.num_nodes()), -1);
    for (int s = 0; s < st.interior_count(); ++s)
        slot_of_node[static_cast<std::size_t>(mesh.interior_nodes[static_cast<std::size_t>(s)])] = s;
    for (const int node : zero_nodes) {
        const int s = slot_of_node[static_cast<std::size_t>(node)];
        if (s < 0) continue;
        const double d = st.ma_at(phi0.v, s);
        if (d > tol) {
            out.witness.push_back(node);
            out.witness_defect = std::max(out.witness_defect, d);
        }
    }
    out.status = out.witness.empty() ? AdmissibilityResult::Status::Undecided
                                     : AdmissibilityResult::Status::Refused;
    return out;
}

BarrierSpec eps_superbarrier(const ProblemSpec& problem, double eps,
                             const std::vector<double>& t_grid, const AdmissibilityResult& adm,
                             double cert_tol) {
    if (adm.status != AdmissibilityResult::Status::Certified)
        throw NotAdmissible("eps_superbarrier requires a Certified admissibility result");
    const GridMesh& mesh = *problem.mesh;

    BarrierSpec bar;
    bar.kind = BarrierKind::EpsSuper;
    bar.eps = eps;
    bar.C = adm.C;
    bar.base = adm.psi0;

    // gamma(t) = -inf_z F(t,z,psi0(z)) over all valued nodes; Gamma = int gamma_+.
    bar.Gamma.t = t_grid;
    bar.Gamma.value.assign(t_grid.size(), 0.0);
    double acc = 0.0, prev_pos = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double inf = std::numeric_limits<double>::infinity();
        for (int k = 0; k < mesh.num_nodes(); ++k)
            inf = std::min(inf, problem.F(t_grid[i], mesh.pos[static_cast<std::size_t>(k)],
                                          adm.psi0[k]));
        const double gp = std::max(-inf, 0.0);
        if (i > 0) acc += 0.5 * (t_grid[i] - t_grid[i - 1]) * (prev_pos + gp);
        prev_pos = gp;
        bar.Gamma.value[i] = acc;
    }

    const ScalarField base_copy = bar.base;
    const TimeProfile G = bar.Gamma;
    const double C = bar.C;
    bar.eval = [base_copy, G, C](double t, int node) { return base_copy[node] + C * t + G.at(t); };

    bar.cert = certify_profile_barrier(problem, bar, t_grid, -1);
    bar.cert.pass = bar.cert.min_slack >= -cert_tol;
    if (!bar.cert.pass)
        throw CertificationFailure("eps_superbarrier: residual check failed, slack " +
                                   std::to_string(bar.cert.min_slack));
    return bar;
}

BarrierSpec boundary_superbarrier(const ProblemSpec& problem, const AdmissibilityResult& adm,
                                  const EllipticOptions& opts) {
    if (adm.status != AdmissibilityResult::Status::Certified)
        throw NotAdmissible("boundary_superbarrier requires a Certified admissibility result");
    const GridMesh& mesh = *problem.mesh;

    // Maximal psh function with boundary trace psi0: mu = 0 Dirichlet solve.
    std::vector<double> band_vals;
    band_vals.reserve(mesh.band_nodes.size());
    for (const int node : mesh.band_nodes) band_vals.push_back(adm.psi0[node]);

    const EllipticResult sol = solve_dirichlet(mesh, problem.frames, Ffun::zero(),
                                               Mufun::constant(0.0), band_vals, opts);
    BarrierSpec bar;
    bar.kind = BarrierKind::BoundarySuper;
    bar.base = sol.field;
    const ScalarField base_copy = bar.base;
    bar.eval = [base_copy](double, int node) { return base_copy[node]; };
    bar.cert.pass = true;
    bar.cert.min_slack = 0.0;
    return bar;
}

}  // namespace cmaflow
