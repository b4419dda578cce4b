#include "cmaflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "cmaflow/errors.hpp"

namespace cmaflow {

ScalarField ScalarField::sample(const GridMesh& m, const std::function<double(const Point&)>& f) {
    ScalarField out(m);
    for (int k = 0; k < m.num_nodes(); ++k) out[k] = f(m.pos[static_cast<std::size_t>(k)]);
    return out;
}

bool ScalarField::all_finite() const {
    for (const double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

double ScalarField::min_on_interior() const {
    double m = std::numeric_limits<double>::infinity();
    for (const int k : mesh->interior_nodes) m = std::min(m, v[static_cast<std::size_t>(k)]);
    return m;
}

double ScalarField::max_on_interior() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const int k : mesh->interior_nodes) m = std::max(m, v[static_cast<std::size_t>(k)]);
    return m;
}

double ScalarField::max_everywhere() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const double x : v) m = std::max(m, x);
    return m;
}

double ScalarField::min_everywhere() const {
    double m = std::numeric_limits<double>::infinity();
    for (const double x : v) m = std::min(m, x);
    return m;
}

double sup_distance(const ScalarField& u, const ScalarField& w) {
    if (u.mesh != w.mesh) throw MeshMismatch("sup_distance: fields live on different meshes");
    double m = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) m = std::max(m, std::abs(u.v[i] - w.v[i]));
    return m;
}

namespace {

void write_header(const GridMesh& m, std::ostream& os) {
    char buf[256];
    os << "n=" << m.domain.n << '\n';
    std::snprintf(buf, sizeof buf, "h=%.17g\n", m.h);
    os << buf;
    os << "bbox=";
    for (int i = 0; i < m.real_dim(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", i ? "," : "", m.origin[ui],
                      m.origin[ui] + (m.dims[ui] - 1) * m.h);
        os << buf;
    }
    os << '\n';
}

void write_rows(const ScalarField& f, std::ostream& os, const int* time_index, const double* time) {
    const GridMesh& m = *f.mesh;
    char buf[64];
    for (int k = 0; k < m.num_nodes(); ++k) {
        const auto c = m.lattice_coords(m.lattice_of_node[static_cast<std::size_t>(k)]);
        if (time_index) os << *time_index << ',';
        if (time) {
            std::snprintf(buf, sizeof buf, "%.17g,", *time);
            os << buf;
        }
        for (int i = 0; i < m.real_dim(); ++i) os << c[static_cast<std::size_t>(i)] << ',';
        for (int i = 0; i < m.real_dim(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,", m.pos[static_cast<std::size_t>(k)][i]);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%c,%.17g\n", m.is_interior(k) ? 'I' : 'B',
                      f[k]);
        os << buf;
    }
}

}  // namespace

void write_field_csv(const ScalarField& f, std::ostream& os) {
    write_header(*f.mesh, os);
    write_rows(f, os, nullptr, nullptr);
}

void write_field_csv(const ScalarField& f, std::ostream& os, int time_index, double time) {
    write_header(*f.mesh, os);
    write_rows(f, os, &time_index, &time);
}

ScalarField read_field_csv(const GridMesh& mesh, std::istream& is) {
    std::string line;
    for (int i = 0; i < 3; ++i)
        if (!std::getline(is, line)) throw IoFailure("field csv: truncated header");
    ScalarField out(mesh);
    int k = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto last = line.find_last_of(',');
        if (last == std::string::npos) throw IoFailure("field csv: malformed row");
        out[k++] = std::stod(line.substr(last + 1));
        if (k > mesh.num_nodes()) throw IoFailure("field csv: too many rows for mesh");
    }
    if (k != mesh.num_nodes()) throw IoFailure("field csv: row count does not match mesh");
    return out;
}

}  // namespace cmaflow
