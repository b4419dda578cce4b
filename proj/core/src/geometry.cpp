#include "cmaflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cmaflow {

namespace {

void check_dims(int n) {
    if (n != 1 && n != 2) throw ConfigError("complex dimension must be 1 or 2");
}

// Semi-axis per REAL coordinate (axis j of C^n spans two real coordinates).
std::array<double, 4> real_axes(const DomainSpec& d) {
    return {d.axes[0], d.axes[0], d.axes[1], d.axes[1]};
}

}  // namespace

DomainSpec DomainSpec::ball(int n, double radius) {
    check_dims(n);
    if (!(radius > 0)) throw ConfigError("ball radius must be positive");
    DomainSpec d;
    d.n = n;
    d.shape = Shape::Ball;
    d.axes = {radius, radius};
    return d;
}

DomainSpec DomainSpec::ellipsoid(int n, std::array<double, 2> semi_axes) {
    check_dims(n);
    for (int j = 0; j < n; ++j)
        if (!(semi_axes[static_cast<std::size_t>(j)] > 0))
            throw ConfigError("ellipsoid semi-axes must be positive");
    DomainSpec d;
    d.n = n;
    d.shape = Shape::Ellipsoid;
    d.axes = semi_axes;
    if (n == 1) d.axes[1] = semi_axes[0];
    return d;
}

double DomainSpec::rho(const Point& z) const {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        const double a2 = axes[static_cast<std::size_t>(j)] * axes[static_cast<std::size_t>(j)];
        s += (z[2 * j] * z[2 * j] + z[2 * j + 1] * z[2 * j + 1]) / a2;
    }
    return s - 1.0;
}

double DomainSpec::normalization() const {
    // sup |rho_raw| over the domain for rho_raw = |z|^2 - R^2 style functions
    // equals axes[0]^2 for balls; the stored rho is already normalized.
    return axes[0] * axes[0];
}

double DomainSpec::hessian_min_eigenvalue() const {
    double m = 1.0 / (axes[0] * axes[0]);
    if (n == 2) m = std::min(m, 1.0 / (axes[1] * axes[1]));
    return m;
}

namespace {

// Distance from an interior point to the axis-aligned ellipsoid
// sum x_i^2/a_i^2 = 1 via the standard 1-D root problem
//   f(t) = sum a_i^2 x_i^2 / (a_i^2 + t)^2 - 1 = 0,  t in (-min a_i^2, 0].
// The nearest boundary point is q_i = a_i^2 x_i / (a_i^2 + t).
double ellipsoid_distance(const Point& z, const std::array<double, 4>& a, int dim, Point* proj) {
    double amin2 = a[0] * a[0];
    for (int i = 1; i < dim; ++i) amin2 = std::min(amin2, a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)]);

    const auto f = [&](double t) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double a2 = a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
            const double q = a2 + t;
            s += a2 * z[i] * z[i] / (q * q);
        }
        return s - 1.0;
    };

    // f is decreasing on (-amin2, inf); inside points have f(0) < 0.
    double hi = 0.0;
    double lo = -amin2 * (1.0 - 1e-14);
    if (f(lo) < 0.0) {
        // z is (numerically) the center along every tight axis; nearest axis wins.
        double dmin = std::sqrt(amin2);
        Point q = z;
        for (int i = 0; i < dim; ++i) {
            const double ai = a[static_cast<std::size_t>(i)];
            if (ai * ai <= amin2 * (1.0 + 1e-12)) {
                q = z;
                q[i] = (z[i] >= 0 ? ai : -ai);
                break;
            }
        }
        if (proj) *proj = q;
        return dmin;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double t = 0.5 * (lo + hi);
    Point q{};
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double a2 = a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
        q[i] = a2 * z[i] / (a2 + t);
        d2 += (q[i] - z[i]) * (q[i] - z[i]);
    }
    if (proj) *proj = q;
    return std::sqrt(d2);
}

}  // namespace

double DomainSpec::boundary_distance(const Point& z) const {
    if (axes[0] == axes[1]) {  // sphere (covers every ball and round ellipsoid)
        double r = 0.0;
        for (int i = 0; i < real_dim(); ++i) r += z[i] * z[i];
        return axes[0] - std::sqrt(r);
    }
    return ellipsoid_distance(z, real_axes(*this), real_dim(), nullptr);
}

Point DomainSpec::project_to_boundary(const Point& z) const {
    const auto a = real_axes(*this);
    if (shape == Shape::Ball || axes[0] == axes[1]) {
        double r = 0.0;
        for (int i = 0; i < real_dim(); ++i) r += z[i] * z[i];
        r = std::sqrt(r);
        if (r == 0.0) {
            Point q{};
            q[0] = axes[0];
            return q;
        }
        return (axes[0] / r) * z;
    }
    Point q{};
    ellipsoid_distance(z, a, real_dim(), &q);
    return q;
}

std::array<double, 8> DomainSpec::bounding_box(double margin) const {
    std::array<double, 8> bb{};
    const auto a = real_axes(*this);
    for (int i = 0; i < real_dim(); ++i) {
        bb[static_cast<std::size_t>(2 * i)] = -a[static_cast<std::size_t>(i)] - margin;
        bb[static_cast<std::size_t>(2 * i + 1)] = a[static_cast<std::size_t>(i)] + margin;
    }
    return bb;
}

std::int64_t GridMesh::lattice_flat(const std::array<int, 4>& c) const {
    std::int64_t f = 0;
    for (int i = real_dim() - 1; i >= 0; --i) {
        const auto ui = static_cast<std::size_t>(i);
        if (c[ui] < 0 || c[ui] >= dims[ui]) return -1;
        f = f * dims[ui] + c[ui];
    }
    return f;
}

std::array<int, 4> GridMesh::lattice_coords(std::int64_t flat) const {
    std::array<int, 4> c{0, 0, 0, 0};
    for (int i = 0; i < real_dim(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        c[ui] = static_cast<int>(flat % dims[ui]);
        flat /= dims[ui];
    }
    return c;
}

int GridMesh::neighbor(int node, const std::array<int, 4>& off) const {
    auto c = lattice_coords(lattice_of_node[static_cast<std::size_t>(node)]);
    for (int i = 0; i < real_dim(); ++i) c[static_cast<std::size_t>(i)] += off[static_cast<std::size_t>(i)];
    const std::int64_t f = lattice_flat(c);
    if (f < 0) return -1;
    return node_of_lattice[static_cast<std::size_t>(f)];
}

std::string GridMesh::summary_table() const {
    std::ostringstream os;
    os << "node";
    for (int i = 0; i < real_dim(); ++i) os << "\tx" << (i + 1);
    os << "\tclass\n";
    for (int k = 0; k < num_nodes(); ++k) {
        os << k;
        char buf[64];
        for (int i = 0; i < real_dim(); ++i) {
            std::snprintf(buf, sizeof buf, "\t%.10g", pos[static_cast<std::size_t>(k)][i]);
            os << buf;
        }
        os << '\t' << (is_interior(k) ? 'I' : 'B') << '\n';
    }
    return os.str();
}

GridMesh build_mesh(const DomainSpec& domain, double h, int stencil_width) {
    if (!(h > 0)) throw ConfigError("mesh spacing must be positive");
    if (stencil_width < 1) throw ConfigError("stencil width must be >= 1");

    GridMesh m;
    m.domain = domain;
    m.h = h;
    m.width = stencil_width;
    const int dim = domain.real_dim();
    m.band_width = stencil_width * h * std::sqrt(static_cast<double>(dim));

    if (domain.hessian_min_eigenvalue() <= 1e-12)
        throw NotStrictlyPsh("defining function is not strictly plurisubharmonic");

    const auto bb = domain.bounding_box(m.band_width + h);
    std::int64_t total = 1;
    for (int i = 0; i < dim; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        // Snap the lattice to multiples of h so that the origin is a node.
        const int lo = static_cast<int>(std::floor(bb[2 * ui] / h));
        const int hi = static_cast<int>(std::ceil(bb[2 * ui + 1] / h));
        m.origin[ui] = lo * h;
        m.dims[ui] = hi - lo + 1;
        total *= m.dims[ui];
    }

    m.cls.assign(static_cast<std::size_t>(total), NodeClass::Exterior);
    m.node_of_lattice.assign(static_cast<std::size_t>(total), -1);

    const auto point_at = [&](std::int64_t flat) {
        const auto c = m.lattice_coords(flat);
        Point p{};
        for (int i = 0; i < dim; ++i)
            p[i] = m.origin[static_cast<std::size_t>(i)] + c[static_cast<std::size_t>(i)] * h;
        return p;
    };

    // Pass 1: interior = strictly inside with a full band of clearance;
    // band = the remaining shell with rho <= 0.
    for (std::int64_t f = 0; f < total; ++f) {
        const Point p = point_at(f);
        const double r = domain.rho(p);
        if (r > 0.0) continue;
        if (r < 0.0 && domain.boundary_distance(p) > m.band_width)
            m.cls[static_cast<std::size_t>(f)] = NodeClass::Interior;
        else
            m.cls[static_cast<std::size_t>(f)] = NodeClass::Band;
    }

    // Pass 2: widen the band over any lattice point an interior wide stencil
    // can read (covers rho = 0 points and floating-point edge cases).
    {
        std::array<int, 4> c{};
        std::vector<std::int64_t> widen;
        for (std::int64_t f = 0; f < total; ++f) {
            if (m.cls[static_cast<std::size_t>(f)] != NodeClass::Interior) continue;
            const auto cc = m.lattice_coords(f);
            std::array<int, 4> off{0, 0, 0, 0};
            const int W = stencil_width;
            for (off[0] = -W; off[0] <= W; ++off[0])
                for (off[1] = -W; off[1] <= W; ++off[1])
                    for (off[2] = (dim > 2 ? -W : 0); off[2] <= (dim > 2 ? W : 0); ++off[2])
                        for (off[3] = (dim > 2 ? -W : 0); off[3] <= (dim > 2 ? W : 0); ++off[3]) {
                            for (int i = 0; i < 4; ++i) c[static_cast<std::size_t>(i)] = 0;
                            bool ok = true;
                            for (int i = 0; i < dim; ++i) {
                                c[static_cast<std::size_t>(i)] =
                                    cc[static_cast<std::size_t>(i)] + off[static_cast<std::size_t>(i)];
                                if (c[static_cast<std::size_t>(i)] < 0 ||
                                    c[static_cast<std::size_t>(i)] >= m.dims[static_cast<std::size_t>(i)])
                                    ok = false;
                            }
                            if (!ok) throw StencilOutOfRange("stencil read escapes the bounding box");
                            const std::int64_t g = m.lattice_flat(c);
                            if (m.cls[static_cast<std::size_t>(g)] == NodeClass::Exterior) widen.push_back(g);
                        }
        }
        for (const std::int64_t g : widen) m.cls[static_cast<std::size_t>(g)] = NodeClass::Band;
    }

    // Compact numbering: interior first, then band.
    for (std::int64_t f = 0; f < total; ++f) {
        if (m.cls[static_cast<std::size_t>(f)] == NodeClass::Exterior) continue;
        const int id = static_cast<int>(m.pos.size());
        m.node_of_lattice[static_cast<std::size_t>(f)] = id;
        m.lattice_of_node.push_back(f);
        m.pos.push_back(point_at(f));
        if (m.cls[static_cast<std::size_t>(f)] == NodeClass::Interior)
            m.interior_nodes.push_back(id);
        else
            m.band_nodes.push_back(id);
    }

    if (m.interior_nodes.empty())
        throw MeshTooCoarse("no interior node at spacing h=" + std::to_string(h));
    return m;
}

std::vector<double> dirichlet_trace(const GridMesh& mesh,
                                    const std::function<double(const Point&)>& g) {
    std::vector<double> out;
    out.reserve(mesh.band_nodes.size());
    for (const int node : mesh.band_nodes) out.push_back(g(mesh.pos[static_cast<std::size_t>(node)]));
    return out;
}

}  // namespace cmaflow
