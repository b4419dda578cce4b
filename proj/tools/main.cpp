#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmaflow/barriers.hpp"
#include "cmaflow/config.hpp"
#include "cmaflow/elliptic.hpp"
#include "cmaflow/errors.hpp"
#include "cmaflow/harness.hpp"
#include "cmaflow/pshtools.hpp"
#include "cmaflow/radial.hpp"

namespace {

using namespace cmaflow;

std::vector<double> uniform_times(double T, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(T * i / (count - 1));
    return out;
}

int cmd_flow_run(const std::string& config_path, const std::string& out_dir) {
    const auto built = build_problem(Config::load(config_path));
    const Trajectory traj = run_flow(built->problem, built->policy, built->snapshot_times);
    std::optional<ConvergenceReport> conv;
    report_emit(traj, conv, out_dir);
    std::printf("flow run: %ld steps, %zu snapshots%s\n", traj.total_steps,
                traj.snapshots.size(), traj.reached_steady ? " (steady state reached)" : "");
    return 0;
}

int cmd_elliptic_solve(const std::string& config_path, const std::string& out_path) {
    const auto built = build_problem(Config::load(config_path));
    const auto g = [&built](const Point& z) { return built->phi0_ext(z); };
    const EllipticResult res = solve_dirichlet(built->mesh, built->frames, built->problem.F,
                                               built->problem.mu, g, built->elliptic);
    std::cout << res.residual_report();
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw IoFailure("cannot write " + out_path);
        write_field_csv(res.field, f);
    }
    return 0;
}

int cmd_barriers_certify(const std::string& config_path) {
    const auto built = build_problem(Config::load(config_path));
    const auto times = uniform_times(std::min(built->problem.horizon, 5.0), 21);
    bool ok = true;

    const auto sub = global_subsolution(built->problem, times, built->tol.cert_tol);
    std::printf("global_subsolution: A=%g min_slack=%.3e %s\n", sub.A, sub.cert.min_slack,
                sub.cert.pass ? "PASS" : "FAIL");
    ok = ok && sub.cert.pass;

    const auto esub = eps_subbarrier(built->problem, 0.5, times, built->tol.cert_tol);
    std::printf("eps_subbarrier(0.5): M=%g min_slack=%.3e %s\n", esub.M, esub.cert.min_slack,
                esub.cert.pass ? "PASS" : "FAIL");
    ok = ok && esub.cert.pass;

    const auto adm = check_admissible(built->mesh, built->frames,
                                      extend_by_boundary_trace(built->mesh.domain, built->phi0_ext),
                                      built->problem.mu, 0.5, 1e-8);
    if (adm.status == AdmissibilityResult::Status::Certified) {
        std::printf("admissibility: certified (C=%g, sigma=%g)\n", adm.C, adm.sigma);
        const auto esup = eps_superbarrier(built->problem, 0.5, times, adm, built->tol.cert_tol);
        std::printf("eps_superbarrier(0.5): C=%g min_slack=%.3e %s\n", esup.C,
                    esup.cert.min_slack, esup.cert.pass ? "PASS" : "FAIL");
        ok = ok && esup.cert.pass;
        const auto bsup = boundary_superbarrier(built->problem, adm, built->elliptic);
        const double defect = maximality_defect(bsup.base, built->frames);
        std::printf("boundary_superbarrier: maximality_defect=%.3e %s\n", defect,
                    defect <= 1e-8 ? "PASS" : "FAIL");
        ok = ok && defect <= 1e-8;
    } else if (adm.status == AdmissibilityResult::Status::Refused) {
        std::printf("admissibility: refused (witness %zu nodes, defect %.3e)\n",
                    adm.witness.size(), adm.witness_defect);
    } else {
        std::printf("admissibility: undecided\n");
    }
    return ok ? 0 : 1;
}

int cmd_verify_comparison(const std::string& config_path, std::uint64_t seed, int pairs) {
    const auto built = build_problem(Config::load(config_path));
    const auto times = uniform_times(1.0, 11);
    const auto rep = comparison_pair_suite(built->problem, built->phi0_ext, pairs, seed,
                                           built->tol.cert_tol, times);
    std::cout << rep.to_text();
    return rep.passed == rep.pairs ? 0 : 1;
}

int cmd_verify_psh(const std::string& config_path) {
    const auto built = build_problem(Config::load(config_path));
    const Trajectory traj = run_flow(built->problem, built->policy, built->snapshot_times);
    const auto rep = theorem_a_check(traj, built->frames, built->tol.psh_c * built->mesh.h);
    std::printf("theorem A: %s (min line-laplacian %.3e over %zu snapshots)\n",
                rep.pass ? "PASS" : "FAIL", rep.worst.min_line_laplacian,
                traj.snapshots.size());
    return rep.pass ? 0 : 1;
}

int cmd_verify_convergence(const std::string& config_path) {
    const auto built = build_problem(Config::load(config_path));
    ProblemSpec& prob = built->problem;
    const auto g = [&built](const Point& z) { return built->phi0_ext(z); };
    const EllipticResult ell = solve_dirichlet(built->mesh, built->frames, prob.F, prob.mu, g,
                                               built->elliptic);
    const Trajectory traj = run_flow(prob, built->policy, built->snapshot_times);
    const auto conv = convergence_report(traj, ell.field, built->tol.steady_tol);
    std::cout << conv.to_text();
    const double final_dist = conv.rows.back().sup_dist;
    std::printf("final sup-distance to the elliptic solution: %.3e\n", final_dist);
    return final_dist <= 5e-3 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"degenerate parabolic complex Monge-Ampere flow toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", out_path;
    std::uint64_t seed = 1;
    int pairs = 100;

    auto* flow = app.add_subcommand("flow", "time-step a flow problem");
    auto* flow_run = flow->add_subcommand("run", "run a configured flow");
    flow_run->add_option("--config", config_path, "config file")->required();
    flow_run->add_option("--out", out_dir, "output directory");

    auto* elliptic = app.add_subcommand("elliptic", "steady Dirichlet problems");
    auto* ell_solve = elliptic->add_subcommand("solve", "solve the configured problem");
    ell_solve->add_option("--config", config_path, "config file")->required();
    ell_solve->add_option("--out", out_path, "field CSV output path");

    auto* barriers = app.add_subcommand("barriers", "explicit sub/supersolutions");
    auto* bar_cert = barriers->add_subcommand("certify", "build and certify the barrier set");
    bar_cert->add_option("--config", config_path, "config file")->required();

    auto* verify = app.add_subcommand("verify", "property checks");
    auto* v_cmp = verify->add_subcommand("comparison", "randomized certified pair suite");
    v_cmp->add_option("--config", config_path, "config file")->required();
    v_cmp->add_option("--seed", seed, "RNG seed");
    v_cmp->add_option("--pairs", pairs, "number of pairs");
    auto* v_psh = verify->add_subcommand("psh", "spatial psh preservation along the flow");
    v_psh->add_option("--config", config_path, "config file")->required();
    auto* v_conv = verify->add_subcommand("convergence", "long-run convergence to the elliptic solution");
    v_conv->add_option("--config", config_path, "config file")->required();
    auto* v_all = verify->add_subcommand("all", "all checks");
    v_all->add_option("--config", config_path, "config file")->required();
    v_all->add_option("--seed", seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (flow_run->parsed()) return cmd_flow_run(config_path, out_dir);
        if (ell_solve->parsed()) return cmd_elliptic_solve(config_path, out_path);
        if (bar_cert->parsed()) return cmd_barriers_certify(config_path);
        if (v_cmp->parsed()) return cmd_verify_comparison(config_path, seed, pairs);
        if (v_psh->parsed()) return cmd_verify_psh(config_path);
        if (v_conv->parsed()) return cmd_verify_convergence(config_path);
        if (v_all->parsed()) {
            int rc = 0;
            rc |= cmd_verify_comparison(config_path, seed, 25);
            rc |= cmd_verify_psh(config_path);
            rc |= cmd_verify_convergence(config_path);
            return rc;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
