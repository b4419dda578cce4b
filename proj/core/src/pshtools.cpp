#include "cmaflow/pshtools.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cmaflow/errors.hpp"

namespace cmaflow {

std::string PshReport::to_text() const {
    std::ostringstream os;
    char buf[160];
    os << "pass=" << (pass ? "yes" : "no") << '\n';
    std::snprintf(buf, sizeof buf, "min_line_laplacian=%.17g\n", min_line_laplacian);
    os << buf;
    os << "worst_node=" << worst_node << '\n';
    std::snprintf(buf, sizeof buf, "worst_point=%.10g,%.10g,%.10g,%.10g\n", worst_point[0],
                  worst_point[1], worst_point[2], worst_point[3]);
    os << buf;
    return os.str();
}

PshReport is_psh(const ScalarField& field, const FrameSet& frames, double tol) {
    const Stencil st(*field.mesh, frames);
    PshReport rep;
    rep.min_line_laplacian = std::numeric_limits<double>::infinity();
    for (int s = 0; s < st.interior_count(); ++s) {
        for (int d = 0; d < st.ndir; ++d) {
            const double L = st.line_lap(field.v, s, d);
            if (L < rep.min_line_laplacian) {
                rep.min_line_laplacian = L;
                rep.worst_node = field.mesh->interior_nodes[static_cast<std::size_t>(s)];
                rep.worst_direction = st.frames.directions[static_cast<std::size_t>(d)];
            }
        }
    }
    if (rep.worst_node >= 0) rep.worst_point = field.mesh->pos[static_cast<std::size_t>(rep.worst_node)];
    rep.pass = rep.min_line_laplacian >= -tol;
    return rep;
}

ScalarField psh_envelope(const ScalarField& obstacle, const FrameSet& frames, double tol,
                         int max_iters) {
    const GridMesh& mesh = *obstacle.mesh;
    const Stencil st(mesh, frames);
    if (!obstacle.all_finite()) throw NonFinite("psh_envelope: obstacle has non-finite values");

    ScalarField u = obstacle;
    const double stop = tol * mesh.h * mesh.h;
    for (int it = 0; it < max_iters; ++it) {
        double change = 0.0;
        for (int s = 0; s < st.interior_count(); ++s) {
            const int node = mesh.interior_nodes[static_cast<std::size_t>(s)];
            double cap = obstacle[node];
            for (int d = 0; d < st.ndir; ++d) {
                const std::int32_t* p = &st.nbr[(static_cast<std::size_t>(s) * st.ndir + d) * 4];
                const double avg = 0.25 * (u.v[static_cast<std::size_t>(p[0])] +
                                           u.v[static_cast<std::size_t>(p[1])] +
                                           u.v[static_cast<std::size_t>(p[2])] +
                                           u.v[static_cast<std::size_t>(p[3])]);
                cap = std::min(cap, avg);
            }
            change = std::max(change, std::abs(u[node] - cap));
            u[node] = cap;  // Gauss-Seidel: in place
        }
        if (change <= stop) return u;
    }
    throw NoConvergence("psh_envelope: no convergence within max_iters");
}

double maximality_defect(const ScalarField& field, const std::vector<int>& region,
                         const FrameSet& frames) {
    const Stencil st(*field.mesh, frames);
    const GridMesh& mesh = *field.mesh;
    double defect = 0.0;
    if (region.empty()) {
        for (int s = 0; s < st.interior_count(); ++s)
            defect = std::max(defect, st.ma_at(field.v, s));
        return defect;
    }
    // Map node indices to interior slots.
    std::vector<int> slot_of_node(static_cast<std::size_t>(mesh.num_nodes()), -1);
    for (int s = 0; s < st.interior_count(); ++s)
        slot_of_node[static_cast<std::size_t>(mesh.interior_nodes[static_cast<std::size_t>(s)])] = s;
    for (const int node : region) {
        const int s = slot_of_node[static_cast<std::size_t>(node)];
        if (s < 0) continue;  // mask may name band nodes; they carry no density
        defect = std::max(defect, st.ma_at(field.v, s));
    }
    return defect;
}

double maximality_defect(const ScalarField& field, const FrameSet& frames) {
    return maximality_defect(field, {}, frames);
}

}  // namespace cmaflow
