#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmaflow/field.hpp"
#include "cmaflow/frames.hpp"
#include "cmaflow/geometry.hpp"
#include "cmaflow/operators.hpp"

namespace cmaflow {

/// Zeroth-order term F(t,z,r), nondecreasing in r. Presets keep the hot loop
/// free of std::function dispatch; Custom covers verification cases.
struct Ffun {
    enum class Kind { Zero, Linear, ArcTan, Custom };
    Kind kind = Kind::Zero;
    double alpha = 1.0;   // Linear: F = alpha*r + offset
    double offset = 0.0;
    bool time_dependent = false;
    std::function<double(double, const Point&, double)> custom;

    double operator()(double t, const Point& z, double r) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Linear: return alpha * r + offset;
            case Kind::ArcTan: return std::atan(r);
            case Kind::Custom: return custom(t, z, r);
        }
        return 0.0;
    }
    /// Upper bound on |dF/dr| over value range [rlo, rhi] (sampled for Custom).
    double slope_bound(double rlo, double rhi, const Point& probe = {}) const;

    static Ffun zero() { return {}; }
    static Ffun linear(double a, double c = 0.0) {
        Ffun f;
        f.kind = Kind::Linear;
        f.alpha = a;
        f.offset = c;
        return f;
    }
    static Ffun arctan() {
        Ffun f;
        f.kind = Kind::ArcTan;
        return f;
    }
    static Ffun custom_fn(std::function<double(double, const Point&, double)> fn,
                          bool time_dep = true) {
        Ffun f;
        f.kind = Kind::Custom;
        f.custom = std::move(fn);
        f.time_dependent = time_dep;
        return f;
    }
};

/// Volume density mu(t,z) >= 0 in Hessian-determinant units.
struct Mufun {
    enum class Kind { Constant, Radial, VanishingDisc, Custom };
    Kind kind = Kind::Constant;
    double value = 1.0;
    Point center{};
    double r0 = 0.0, ramp = 0.25;  // vanishing disc: 0 on |z-c|<=r0, quadratic ramp
    bool time_dependent = false;
    std::function<double(double, const Point&)> custom;

    double operator()(double t, const Point& z) const;

    static Mufun constant(double v) {
        Mufun m;
        m.value = v;
        return m;
    }
    static Mufun radial(double v) {
        Mufun m;
        m.kind = Kind::Radial;
        m.value = v;
        return m;
    }
    static Mufun vanishing_disc(double v, Point center, double r0, double ramp = 0.25) {
        Mufun m;
        m.kind = Kind::VanishingDisc;
        m.value = v;
        m.center = center;
        m.r0 = r0;
        m.ramp = ramp;
        return m;
    }
    static Mufun custom_fn(std::function<double(double, const Point&)> fn, bool time_dep = false) {
        Mufun m;
        m.kind = Kind::Custom;
        m.custom = std::move(fn);
        m.time_dependent = time_dep;
        return m;
    }
};

/// One Cauchy-Dirichlet flow instance on a mesh.
struct ProblemSpec {
    const GridMesh* mesh = nullptr;
    FrameSet frames;
    Ffun F;
    Mufun mu;
    ScalarField phi0;
    /// Extended boundary data; band nodes are stamped with boundary(t, z).
    /// Defaults to the phi0 band values (time-independent).
    std::function<double(double, const Point&)> boundary;
    bool time_dependent_boundary = false;  // verification-only flag
    double horizon = 1.0;
    std::function<double(double)> twist;  // h(t) > 0, empty = untwisted
    double psh_tol_c = 4.0;

    /// Checks F nondecreasing in r (probe grid), mu >= 0, phi0 discretely psh
    /// with tolerance psh_tol_c * h. Throws ConfigError on violation.
    void validate() const;
};

struct StepDiagnostics {
    double t = 0.0;        // time after the step
    double dt = 0.0;
    double sup_update = 0.0;
    int ma_floor_hits = 0;
    int mu_floor_hits = 0;
    double min_line_laplacian = 0.0;
};

struct FlowState {
    double t = 0.0;
    ScalarField field;
};

struct DtPolicy {
    enum class Kind { Cfl, Fixed };
    Kind kind = Kind::Cfl;
    double c_cfl = 0.2;
    double fixed_dt = 1e-3;
    bool enforce_cfl = true;
    double kappa = 1e-12;
    double steady_tol = 1e-8;  // sup-update per unit time

    static DtPolicy cfl(double c = 0.2) {
        DtPolicy p;
        p.c_cfl = c;
        return p;
    }
    static DtPolicy fixed(double dt, bool enforce = true) {
        DtPolicy p;
        p.kind = Kind::Fixed;
        p.fixed_dt = dt;
        p.enforce_cfl = enforce;
        return p;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ScalarField> snapshots;
    std::vector<StepDiagnostics> steps;
    bool reached_steady = false;
    double steady_time = -1.0;
    long total_steps = 0;
};

/// One explicit Euler step of
///   phi <- phi + dt [ log(max(MA(phi),kappa)) - log(max(mu,kappa)) - F(t,z,phi) ]
/// on interior nodes; band values stay Dirichlet (restamped when the problem
/// carries time-dependent boundary data). Throws CflViolation when `policy`
/// enforces the bound and dt exceeds it, NonFinite on NaN.
FlowState step_explicit(const FlowState& state, const ProblemSpec& problem, double dt,
                        double kappa, StepDiagnostics* diag = nullptr,
                        const DtPolicy* policy = nullptr);

/// Semi-implicit variant: the zeroth-order term is taken at t+dt and the
/// per-node scalar equation phi_new + dt F(t+dt,z,phi_new) = rhs is solved by
/// bisection to 1e-12 (unique root since F is nondecreasing).
FlowState step_semi_implicit(const FlowState& state, const ProblemSpec& problem, double dt,
                             double kappa, StepDiagnostics* diag = nullptr,
                             const DtPolicy* policy = nullptr);

/// Runs the flow until the horizon or steady state, recording snapshots at
/// the requested times (dt is clipped to land on them exactly).
Trajectory run_flow(const ProblemSpec& problem, const DtPolicy& policy,
                    const std::vector<double>& snapshot_times, bool semi_implicit = false);

/// Change of variables for F = alpha*r (alpha > 0): the flow in s-variables
/// has no zeroth-order term, psi(s,z) = alpha(1+s) phi(t,z), t = log(1+s)/alpha,
/// mu~(s,z) = alpha^n (s+1)^n mu(z). Throws FormMismatch unless F has exactly
/// that form.
struct RescaledFlow {
    ProblemSpec problem;  // the alpha = 0 problem in the s variable
    double alpha = 1.0;
    int n = 1;
    double s_of_t(double t) const { return std::expm1(alpha * t); }
    double t_of_s(double s) const { return std::log1p(s) / alpha; }
    FlowState forward(const FlowState& phi_state) const;
    FlowState inverse(const FlowState& psi_state) const;
};
RescaledFlow alpha_rescale(const ProblemSpec& problem);

/// Removes a twist h(t) by the time change gamma with gamma'(s) = h(t),
/// i.e. g(t) = int_0^t ds/h(s) (trapezoid rule), gamma = g^{-1} by monotone
/// interpolation; G(s,z,r) = F(gamma(s),z,r), nu(s,z) = mu(gamma(s),z).
struct UntwistedFlow {
    ProblemSpec problem;
    std::shared_ptr<const std::vector<double>> t_grid, g_grid;
    double g(double t) const;
    double gamma(double s) const;
};
UntwistedFlow twist_change_of_variables(const ProblemSpec& problem, int samples = 32768);

}  // namespace cmaflow
