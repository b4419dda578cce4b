#include "cmaflow/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmaflow/errors.hpp"

namespace cmaflow {

double RadialProfile::value(double radius) const {
    if (radius <= r.front()) return psi.front();
    if (radius >= r.back()) return psi.back();
    const auto it = std::upper_bound(r.begin(), r.end(), radius);
    const std::size_t i = static_cast<std::size_t>(it - r.begin());
    const double w = (radius - r[i - 1]) / (r[i] - r[i - 1]);
    return psi[i - 1] + w * (psi[i] - psi[i - 1]);
}

namespace {

// Integrate psi'' = 4 e^{F(psi)} mu(r) - psi'/r from the center value a,
// returning the boundary value psi(R) and filling the profile.
double integrate(double a, double R, const std::function<double(double)>& F,
                 const std::function<double(double)>& mu, int m, RadialProfile* out) {
    const double dr = R / (m - 1);
    double psi = a, q = 0.0;  // q = psi'
    if (out) {
        out->r.assign(static_cast<std::size_t>(m), 0.0);
        out->psi.assign(static_cast<std::size_t>(m), 0.0);
        out->r[0] = 0.0;
        out->psi[0] = a;
    }
    const auto rhs = [&](double r, double p, double v, double* dp, double* dv) {
        *dp = v;
        // At r = 0 symmetry gives psi'' = 2 e^{F} mu (half of the generic
        // value, since psi'/r -> psi'' there).
        if (r < 1e-14)
            *dv = 2.0 * std::exp(F(p)) * mu(r);
        else
            *dv = 4.0 * std::exp(F(p)) * mu(r) - v / r;
    };
    for (int i = 1; i < m; ++i) {
        const double r0 = (i - 1) * dr;
        double k1p, k1v, k2p, k2v, k3p, k3v, k4p, k4v;
        rhs(r0, psi, q, &k1p, &k1v);
        rhs(r0 + 0.5 * dr, psi + 0.5 * dr * k1p, q + 0.5 * dr * k1v, &k2p, &k2v);
        rhs(r0 + 0.5 * dr, psi + 0.5 * dr * k2p, q + 0.5 * dr * k2v, &k3p, &k3v);
        rhs(r0 + dr, psi + dr * k3p, q + dr * k3v, &k4p, &k4v);
        psi += dr / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        q += dr / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        if (out) {
            out->r[static_cast<std::size_t>(i)] = i * dr;
            out->psi[static_cast<std::size_t>(i)] = psi;
        }
    }
    return psi;
}

}  // namespace

RadialProfile solve_radial_dirichlet(double R, const std::function<double(double)>& F_of_psi,
                                     const std::function<double(double)>& mu_of_radius,
                                     double boundary_value, int grid_points) {
    if (!(R > 0)) throw ConfigError("radial oracle: R must be positive");
    // psi(R;a) is increasing in the center value a; bracket and bisect.
    double lo = boundary_value - 1.0, hi = boundary_value;
    for (int tries = 0;; ++tries) {
        const double v = integrate(lo, R, F_of_psi, mu_of_radius, 257, nullptr);
        if (v <= boundary_value) break;
        lo = boundary_value - (boundary_value - lo) * 2.0 - 1.0;
        if (tries > 60) throw RootBracketFailure("radial oracle: cannot bracket from below");
    }
    for (int tries = 0;; ++tries) {
        const double v = integrate(hi, R, F_of_psi, mu_of_radius, 257, nullptr);
        if (v >= boundary_value) break;
        hi += (hi - lo) + 1.0;
        if (tries > 60) throw RootBracketFailure("radial oracle: cannot bracket from above");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = integrate(mid, R, F_of_psi, mu_of_radius, grid_points, nullptr);
        if (v <= boundary_value)
            lo = mid;
        else
            hi = mid;
    }
    RadialProfile prof;
    integrate(0.5 * (lo + hi), R, F_of_psi, mu_of_radius, grid_points, &prof);
    // Pin the boundary sample exactly.
    prof.psi.back() = boundary_value;
    return prof;
}

}  // namespace cmaflow
