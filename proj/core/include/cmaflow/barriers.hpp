#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmaflow/elliptic.hpp"
#include "cmaflow/field.hpp"
#include "cmaflow/flow.hpp"

namespace cmaflow {

enum class BarrierKind { GlobalSub, GlobalSuper, EpsSub, EpsSuper, BoundarySuper };

/// Sampled nondecreasing time profile (B(t) or Gamma(t)); linear interpolation.
struct TimeProfile {
    std::vector<double> t;
    std::vector<double> value;
    double at(double time) const;
};

struct CertificationReport {
    bool pass = false;
    double min_slack = 0.0;
    double worst_t = 0.0;
    int worst_node = -1;
    std::string to_text() const;
};

/// An explicit sub/supersolution: spatial base plus a time profile, with the
/// discrete residual certificate of its defining inequality.
struct BarrierSpec {
    BarrierKind kind{};
    double A = 0.0, M = 0.0, C = 0.0, eps = 0.0;
    TimeProfile B;      // subtracted profile (sub barriers)
    TimeProfile Gamma;  // added profile (super barriers)
    ScalarField base;
    std::function<double(double, int)> eval;  // (t, node) -> value
    CertificationReport cert;

    ScalarField slice(double t) const;
};

struct BProfile {
    TimeProfile b;  // sampled b(t) = sup_z F(t,z,phi0(z))
    TimeProfile B;  // B(t) = int_0^t b_+(s) ds (trapezoid)
};

/// b(t) as a grid max over interior nodes and its running positive-part
/// integral.
BProfile b_profile(const Ffun& F, const ScalarField& phi0, const std::vector<double>& t_grid);

/// u(t,z) = A rho(z) + phi0(z) - B(t) with A^n MA(rho) >= max mu; certified
/// as a discrete subsolution. Throws CertificationFailure.
BarrierSpec global_subsolution(const ProblemSpec& problem, const std::vector<double>& t_grid,
                               double cert_tol = 1e-9);

/// U(t,z) = phi0(z) + eps rho(z) - B(t) - M t with eps^n MA(rho) >= e^{-M} mu.
BarrierSpec eps_subbarrier(const ProblemSpec& problem, double eps,
                           const std::vector<double>& t_grid, double cert_tol = 1e-9);

/// Three-valued admissibility of (phi0, mu) per the viscosity criterion:
/// mu > 0 always certifies (mollified psi0 with C = log max MA / min mu);
/// mu = 0 on a region with positive MA defect refuses with that witness; a
/// vanishing mu over a defect-free region is Undecided.
struct AdmissibilityResult {
    enum class Status { Certified, Refused, Undecided };
    Status status = Status::Undecided;
    ScalarField psi0;
    double C = 0.0;
    double sigma = 0.0;          // mollification scale used
    bool psi0_psh = false;
    std::vector<int> witness;    // mu = 0 nodes with defect > tol
    double witness_defect = 0.0;
};

AdmissibilityResult check_admissible(const GridMesh& mesh, const FrameSet& frames,
                                     const std::function<double(const Point&)>& phi0_ext,
                                     const Mufun& mu, double eps, double tol);

/// V(t,z) = psi0(z) + C t + Gamma(t), Gamma = int gamma_+ with
/// gamma(t) = -inf_z F(t,z,psi0(z)); requires a Certified admissibility
/// result. Throws NotAdmissible / CertificationFailure.
BarrierSpec eps_superbarrier(const ProblemSpec& problem, double eps,
                             const std::vector<double>& t_grid, const AdmissibilityResult& adm,
                             double cert_tol = 1e-9);

/// The maximal psh function with boundary trace psi0|dOmega (solve_dirichlet
/// with mu = 0), wrapped as a static superbarrier.
BarrierSpec boundary_superbarrier(const ProblemSpec& problem, const AdmissibilityResult& adm,
                                  const EllipticOptions& opts = {});

/// Helper: extends an analytic function defined on the closed domain to band
/// nodes outside it by its boundary trace.
std::function<double(const Point&)> extend_by_boundary_trace(
    const DomainSpec& domain, std::function<double(const Point&)> f);

}  // namespace cmaflow
