#include "cmaflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cmaflow/errors.hpp"

namespace cmaflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section = "global";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        cfg.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoFailure("cannot open config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

bool Config::has(const std::string& sec, const std::string& key) const {
    const auto it = sections.find(sec);
    return it != sections.end() && it->second.count(key) > 0;
}

std::string Config::get(const std::string& sec, const std::string& key,
                        const std::string& fallback) const {
    const auto it = sections.find(sec);
    if (it == sections.end()) return fallback;
    const auto jt = it->second.find(key);
    return jt == it->second.end() ? fallback : jt->second;
}

double Config::get_double(const std::string& sec, const std::string& key, double fallback) const {
    const auto s = get(sec, key, "");
    return s.empty() ? fallback : std::stod(s);
}

int Config::get_int(const std::string& sec, const std::string& key, int fallback) const {
    const auto s = get(sec, key, "");
    return s.empty() ? fallback : std::stoi(s);
}

bool Config::get_bool(const std::string& sec, const std::string& key, bool fallback) const {
    auto s = get(sec, key, "");
    if (s.empty()) return fallback;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("bad boolean value '" + s + "' for " + sec + "." + key);
}

namespace {

std::function<double(const Point&)> phi0_preset(const std::string& name) {
    if (name == "abs2") return [](const Point& z) { return z.norm2(); };
    if (name == "abs2_minus1") return [](const Point& z) { return z.norm2() - 1.0; };
    if (name == "two_abs2") return [](const Point& z) { return 2.0 * z.norm2(); };
    if (name == "re_z") return [](const Point& z) { return z[0]; };
    if (name == "kink") return [](const Point& z) { return std::max(z[0], 0.0); };
    throw ConfigError("unknown phi0 preset '" + name + "'");
}

}  // namespace

std::unique_ptr<BuiltProblem> build_problem(const Config& cfg) {
    auto out = std::make_unique<BuiltProblem>();

    const int n = cfg.get_int("domain", "n", 1);
    const std::string shape = cfg.get("domain", "shape", "ball");
    DomainSpec domain;
    if (shape == "ball") {
        domain = DomainSpec::ball(n, cfg.get_double("domain", "R", 1.0));
    } else if (shape == "ellipsoid") {
        domain = DomainSpec::ellipsoid(
            n, {cfg.get_double("domain", "a1", 1.0), cfg.get_double("domain", "a2", 1.0)});
    } else {
        throw ConfigError("unknown domain shape '" + shape + "'");
    }

    const double h = cfg.get_double("grid", "h", 1.0 / 16);
    const int W = cfg.get_int("grid", "W", 1);
    out->mesh = build_mesh(domain, h, W);
    out->frames = default_frame_set(n, cfg.get_int("frames", "width", W));

    ProblemSpec& prob = out->problem;
    prob.mesh = &out->mesh;
    prob.frames = out->frames;

    const std::string fkind = cfg.get("flow", "F", "zero");
    if (fkind == "zero")
        prob.F = Ffun::zero();
    else if (fkind == "linear")
        prob.F = Ffun::linear(cfg.get_double("flow", "alpha", 1.0),
                              cfg.get_double("flow", "offset", 0.0));
    else if (fkind == "arctan")
        prob.F = Ffun::arctan();
    else
        throw ConfigError("unknown F preset '" + fkind + "'");

    const std::string mkind = cfg.get("flow", "mu", "constant");
    const double mval = cfg.get_double("flow", "mu_value", 1.0);
    if (mkind == "constant") {
        prob.mu = Mufun::constant(mval);
    } else if (mkind == "radial") {
        prob.mu = Mufun::radial(mval);
    } else if (mkind == "vanishing_disc") {
        Point c{};
        const std::string cs = cfg.get("flow", "mu_center", "0,0");
        std::istringstream ss(cs);
        std::string tok;
        for (int i = 0; i < 4 && std::getline(ss, tok, ','); ++i) c[i] = std::stod(tok);
        prob.mu = Mufun::vanishing_disc(mval, c, cfg.get_double("flow", "mu_r0", 0.4),
                                        cfg.get_double("flow", "mu_ramp", 0.25));
    } else {
        throw ConfigError("unknown mu preset '" + mkind + "'");
    }

    const std::string p0 = cfg.get("flow", "phi0", "abs2_minus1");
    out->phi0_ext = phi0_preset(p0);
    prob.phi0 = ScalarField::sample(out->mesh, out->phi0_ext);
    const auto bdry = out->phi0_ext;
    prob.boundary = [bdry](double, const Point& z) { return bdry(z); };
    prob.time_dependent_boundary = false;

    prob.horizon = cfg.get_double("flow", "T", 1.0);
    prob.psh_tol_c = cfg.get_double("tolerances", "psh_c", 4.0);

    DtPolicy& pol = out->policy;
    const std::string pk = cfg.get("dt", "policy", "cfl");
    if (pk == "cfl") {
        pol = DtPolicy::cfl(cfg.get_double("dt", "c_cfl", 0.2));
    } else if (pk == "fixed") {
        pol = DtPolicy::fixed(cfg.get_double("dt", "fixed_dt", 1e-3),
                              cfg.get_bool("dt", "enforce", true));
        pol.c_cfl = cfg.get_double("dt", "c_cfl", 0.2);
    } else {
        throw ConfigError("unknown dt policy '" + pk + "'");
    }
    pol.kappa = cfg.get_double("flow", "kappa", 1e-12);
    pol.steady_tol = cfg.get_double("tolerances", "steady_tol", 1e-8);

    out->tol.cert_tol = cfg.get_double("tolerances", "cert_tol", 1e-9);
    out->tol.psh_c = prob.psh_tol_c;
    out->tol.steady_tol = pol.steady_tol;

    out->elliptic.tol = cfg.get_double("elliptic", "tol", 1e-11);
    out->elliptic.omega = cfg.get_double("elliptic", "omega", 1.0);
    out->elliptic.max_sweeps = cfg.get_int("elliptic", "max_sweeps", 400000);
    out->elliptic.jacobi = cfg.get_bool("elliptic", "jacobi", false);

    // Snapshot times: explicit list or a uniform count over [0, T].
    if (cfg.has("snapshots", "times")) {
        std::istringstream ss(cfg.get("snapshots", "times", ""));
        std::string tok;
        while (std::getline(ss, tok, ',')) out->snapshot_times.push_back(std::stod(tok));
    } else {
        const int count = cfg.get_int("snapshots", "count", 11);
        for (int i = 0; i < count; ++i)
            out->snapshot_times.push_back(prob.horizon * i / (count - 1));
    }
    return out;
}

}  // namespace cmaflow
