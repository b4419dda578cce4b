#include "cmaflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cmaflow/errors.hpp"

namespace cmaflow {

double line_laplacian(const ScalarField& field, const CDir& v, int node) {
    const GridMesh& m = *field.mesh;
    const int n2 = v.norm2(m.domain.n);
    if (n2 == 0) throw ConfigError("line_laplacian: zero direction");
    const auto ro = v.real_offset();
    const auto io = v.imag_offset();
    const auto neg = [](std::array<int, 4> a) {
        for (int& c : a) c = -c;
        return a;
    };
    const int p0 = m.neighbor(node, ro);
    const int p1 = m.neighbor(node, neg(ro));
    const int p2 = m.neighbor(node, io);
    const int p3 = m.neighbor(node, neg(io));
    if (p0 < 0 || p1 < 0 || p2 < 0 || p3 < 0)
        throw StencilOutOfRange("line_laplacian: stencil read hits an exterior node");
    const double s = field[p0] + field[p1] + field[p2] + field[p3] - 4.0 * field[node];
    return s / (4.0 * m.h * m.h * n2);
}

Stencil::Stencil(const GridMesh& m, FrameSet fs) : mesh(&m), frames(std::move(fs)) {
    ndir = frames.num_directions();
    const int ni = m.num_interior();
    nbr.assign(static_cast<std::size_t>(ni) * ndir * 4, -1);
    inv_scale.resize(static_cast<std::size_t>(ndir));
    for (int d = 0; d < ndir; ++d)
        inv_scale[static_cast<std::size_t>(d)] =
            1.0 / (4.0 * m.h * m.h * frames.directions[static_cast<std::size_t>(d)].norm2(m.domain.n));

    const auto neg = [](std::array<int, 4> a) {
        for (int& c : a) c = -c;
        return a;
    };
    for (int s = 0; s < ni; ++s) {
        const int node = m.interior_nodes[static_cast<std::size_t>(s)];
        for (int d = 0; d < ndir; ++d) {
            const CDir& v = frames.directions[static_cast<std::size_t>(d)];
            const std::array<std::array<int, 4>, 4> offs{v.real_offset(), neg(v.real_offset()),
                                                         v.imag_offset(), neg(v.imag_offset())};
            for (int q = 0; q < 4; ++q) {
                const int nb = m.neighbor(node, offs[static_cast<std::size_t>(q)]);
                if (nb < 0)
                    throw StencilOutOfRange("stencil table: interior node reads an exterior node");
                nbr[(static_cast<std::size_t>(s) * ndir + d) * 4 + static_cast<std::size_t>(q)] =
                    nb;
            }
        }
    }
}

double Stencil::frame_min(const std::vector<double>& vals, int slot, double* min_line) const {
    const int n = frames.n;
    double best = std::numeric_limits<double>::infinity();
    if (min_line) *min_line = std::numeric_limits<double>::infinity();

    // Cache per-direction Laplacians; directions are shared across frames.
    double stack_buf[64];
    double* lap = stack_buf;
    thread_local std::vector<double> heap_buf;
    if (ndir > 64) {
        heap_buf.resize(static_cast<std::size_t>(ndir));
        lap = heap_buf.data();
    }
    for (int d = 0; d < ndir; ++d) {
        lap[d] = line_lap(vals, slot, d);
        if (min_line) *min_line = std::min(*min_line, lap[d]);
    }
    for (int f = 0; f < frames.num_frames(); ++f) {
        const auto& ids = frames.frame_dirs[static_cast<std::size_t>(f)];
        const auto& cf = frames.frame_coeff[static_cast<std::size_t>(f)];
        double s = cf[0] * lap[ids[0]];
        if (n == 2) s += cf[1] * lap[ids[1]];
        s /= n;
        best = std::min(best, s);
    }
    return best;
}

double Stencil::ma_at(const std::vector<double>& vals, int slot) const {
    const double s = frame_min(vals, slot);
    if (s <= 0.0) return 0.0;
    return frames.n == 1 ? s : s * s;
}

ScalarField ma_density(const ScalarField& field, const FrameSet& frames) {
    const Stencil st(*field.mesh, frames);
    ScalarField out(*field.mesh, 0.0);
    for (int s = 0; s < st.interior_count(); ++s)
        out[field.mesh->interior_nodes[static_cast<std::size_t>(s)]] = st.ma_at(field.v, s);
    return out;
}

namespace {

// Fourth-order central second derivative and mixed derivative.
double d2(const std::function<double(const Point&)>& f, Point z, int i, int j, double e) {
    if (i == j) {
        Point a = z, b = z, c = z, d = z;
        a[i] += 2 * e;
        b[i] += e;
        c[i] -= e;
        d[i] -= 2 * e;
        return (-f(a) + 16 * f(b) - 30 * f(z) + 16 * f(c) - f(d)) / (12 * e * e);
    }
    const auto at = [&](double si, double sj) {
        Point p = z;
        p[i] += si * e;
        p[j] += sj * e;
        return f(p);
    };
    // 4th-order cross from two grids.
    const double g1 = (at(1, 1) + at(-1, -1) - at(1, -1) - at(-1, 1)) / (4 * e * e);
    const double g2 = (at(2, 2) + at(-2, -2) - at(2, -2) - at(-2, 2)) / (16 * e * e);
    return (4.0 * g1 - g2) / 3.0;
}

}  // namespace

double hessian_density_exact(const TestFunction& f, int n, const Point& z, double fd_step) {
    if (f.density) return f.density(z);
    // Complex Hessian H_{jk} = (1/4)[u_{x_j x_k} + u_{y_j y_k}
    //                            + i (u_{x_j y_k} - u_{y_j x_k})].
    std::complex<double> H[2][2];
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const double a = d2(f.value, z, 2 * j, 2 * k, fd_step);
            const double b = d2(f.value, z, 2 * j + 1, 2 * k + 1, fd_step);
            const double c = d2(f.value, z, 2 * j, 2 * k + 1, fd_step);
            const double d = d2(f.value, z, 2 * j + 1, 2 * k, fd_step);
            H[j][k] = 0.25 * std::complex<double>(a + b, c - d);
        }
    if (n == 1) return H[0][0].real();
    return (H[0][0] * H[1][1] - H[0][1] * H[1][0]).real();
}

std::vector<ConsistencyRow> consistency_report(const DomainSpec& domain, const FrameSet& frames,
                                               const std::vector<TestFunction>& tests,
                                               const std::vector<double>& spacings) {
    std::vector<ConsistencyRow> rows;
    for (const double h : spacings) {
        const GridMesh mesh = build_mesh(domain, h, frames.width);
        for (const auto& t : tests) {
            const ScalarField u = ScalarField::sample(mesh, t.value);
            const ScalarField ma = ma_density(u, frames);
            double err = 0.0;
            for (const int k : mesh.interior_nodes) {
                const double ex = hessian_density_exact(t, domain.n, mesh.pos[static_cast<std::size_t>(k)]);
                err = std::max(err, std::abs(ma[k] - ex));
            }
            rows.push_back({t.name, h, err});
        }
    }
    return rows;
}

std::string to_text(const std::vector<ConsistencyRow>& rows) {
    std::ostringstream os;
    os << "function\th\tmax_err\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s\t%.10g\t%.3e\n", r.name.c_str(), r.h, r.max_err);
        os << buf;
    }
    return os.str();
}

}  // namespace cmaflow
