#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cmaflow/elliptic.hpp"
#include "cmaflow/flow.hpp"
#include "cmaflow/geometry.hpp"

namespace cmaflow {

/// Sectioned key=value configuration ([section] headers, # comments).
struct Config {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& sec, const std::string& key) const;
    std::string get(const std::string& sec, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& sec, const std::string& key, double fallback) const;
    int get_int(const std::string& sec, const std::string& key, int fallback) const;
    bool get_bool(const std::string& sec, const std::string& key, bool fallback) const;
};

struct Tolerances {
    double cert_tol = 1e-9;
    double psh_c = 4.0;
    double steady_tol = 1e-8;
};

/// A configured run: owns the mesh the problem points into (not movable).
struct BuiltProblem {
    GridMesh mesh;
    FrameSet frames;
    ProblemSpec problem;
    DtPolicy policy;
    std::vector<double> snapshot_times;
    Tolerances tol;
    EllipticOptions elliptic;
    std::function<double(const Point&)> phi0_ext;  // analytic extension of phi0

    BuiltProblem() = default;
    BuiltProblem(const BuiltProblem&) = delete;
    BuiltProblem& operator=(const BuiltProblem&) = delete;
};

/// Builds domain/mesh/problem/policy from a config. Known presets:
/// phi0 in {abs2, abs2_minus1, two_abs2, re_z, kink}; F in {zero, linear,
/// arctan}; mu in {constant, radial, vanishing_disc}.
std::unique_ptr<BuiltProblem> build_problem(const Config& cfg);

}  // namespace cmaflow
