#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "cmaflow/geometry.hpp"

namespace cmaflow {

/// One time-slice of a grid function: a value per valued node of a mesh.
struct ScalarField {
    const GridMesh* mesh = nullptr;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const GridMesh& m, double fill = 0.0)
        : mesh(&m), v(static_cast<std::size_t>(m.num_nodes()), fill) {}

    double& operator[](int node) { return v[static_cast<std::size_t>(node)]; }
    double operator[](int node) const { return v[static_cast<std::size_t>(node)]; }

    static ScalarField sample(const GridMesh& m, const std::function<double(const Point&)>& f);

    bool all_finite() const;
    double max_abs() const;
    double min_on_interior() const;
    double max_on_interior() const;
    double max_everywhere() const;
    double min_everywhere() const;
};

/// Largest |u - w| over all valued nodes; fields must share a mesh.
double sup_distance(const ScalarField& u, const ScalarField& w);

/// CSV serialization: header lines `n=`, `h=`, `bbox=`, then one row per node
/// `i1,...,i2n,x1,...,x2n,class,value` with 17 significant digits.
void write_field_csv(const ScalarField& f, std::ostream& os);
void write_field_csv(const ScalarField& f, std::ostream& os, int time_index, double time);

/// Reads values written by write_field_csv back onto `mesh` (layout checked).
ScalarField read_field_csv(const GridMesh& mesh, std::istream& is);

}  // namespace cmaflow
