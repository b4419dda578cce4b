#include "cmaflow/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmaflow/errors.hpp"

namespace cmaflow {

double TimeSampledFunction::oscillation() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const double x : data) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return data.empty() ? 0.0 : hi - lo;
}

void TimeSampledFunction::validate() const {
    if (times.size() < 2) throw ConfigError("time grid needs at least two samples");
    const double step = times[1] - times[0];
    if (!(step > 0)) throw ConfigError("time grid must be strictly increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double d = times[i] - times[i - 1];
        if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw ConfigError("time grid must be uniform");
    }
    if (data.size() != times.size() * static_cast<std::size_t>(width))
        throw ConfigError("sample count does not match the time grid");
    if (!(osc_bound > 2.0 * oscillation() - 1e-15))
        throw ConfigError("oscillation constant must exceed 2*osc");
}

TimeSampledFunction TimeSampledFunction::scalar_signal(std::vector<double> times,
                                                       std::vector<double> values,
                                                       std::optional<double> A) {
    TimeSampledFunction f;
    f.times = std::move(times);
    f.width = 1;
    f.data = std::move(values);
    f.osc_bound = A ? *A : 2.0 * f.oscillation() + 1.0;
    f.validate();
    return f;
}

TimeSampledFunction TimeSampledFunction::from_fields(std::vector<double> times,
                                                     const std::vector<ScalarField>& slices,
                                                     std::optional<double> A) {
    TimeSampledFunction f;
    f.times = std::move(times);
    if (slices.empty()) throw ConfigError("from_fields: no slices");
    f.width = slices.front().mesh->num_nodes();
    f.data.reserve(f.times.size() * static_cast<std::size_t>(f.width));
    for (const auto& s : slices) {
        if (static_cast<int>(s.v.size()) != f.width) throw MeshMismatch("from_fields: slice size mismatch");
        f.data.insert(f.data.end(), s.v.begin(), s.v.end());
    }
    f.osc_bound = A ? *A : 2.0 * f.oscillation() + 1.0;
    f.validate();
    return f;
}

double TimeConvolution::value_checked(int sample, int j) const {
    if (!in_validity(fn.times[static_cast<std::size_t>(sample)])) ++flagged_queries;
    return fn.at(sample, j);
}

namespace {

TimeConvolution convolve(const TimeSampledFunction& u, double k, bool sup) {
    if (!(k > 0)) throw ConfigError("convolution penalty k must be positive");
    u.validate();
    TimeConvolution out;
    out.fn = u;
    out.k = k;
    out.validity = {u.osc_bound / k, u.horizon() - u.osc_bound / k};
    const int M = u.samples();
    out.arg_index.assign(static_cast<std::size_t>(M) * u.width, 0);
    for (int t = 0; t < M; ++t) {
        for (int j = 0; j < u.width; ++j) {
            double best = sup ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
            int bi = 0;
            for (int s = 0; s < M; ++s) {
                const double pen = k * std::abs(u.times[static_cast<std::size_t>(s)] -
                                                u.times[static_cast<std::size_t>(t)]);
                const double cand = sup ? u.at(s, j) - pen : u.at(s, j) + pen;
                if (sup ? cand > best : cand < best) {
                    best = cand;
                    bi = s;
                }
            }
            out.fn.at(t, j) = best;
            out.arg_index[static_cast<std::size_t>(t) * u.width + static_cast<std::size_t>(j)] =
                static_cast<std::int32_t>(bi);
        }
    }
    return out;
}

}  // namespace

TimeConvolution sup_convolution_time(const TimeSampledFunction& u, double k) {
    return convolve(u, k, true);
}

TimeConvolution inf_convolution_time(const TimeSampledFunction& v, double k) {
    return convolve(v, k, false);
}

namespace {

ScalarField relaxed_limit(const std::vector<ScalarField>& seq, RelaxedLimitOptions opts, bool sup) {
    if (seq.empty()) throw ConfigError("relaxed semi-limit of an empty sequence");
    const GridMesh* mesh = seq.front().mesh;
    for (const auto& f : seq)
        if (f.mesh != mesh) throw MeshMismatch("relaxed semi-limit: mixed meshes");
    const int J = static_cast<int>(seq.size());
    int jstar = opts.truncation_index > 0 ? opts.truncation_index : (J + 1) / 2;
    jstar = std::min(jstar, J);
    const double radius = opts.radius_scale / jstar;

    ScalarField out(*mesh);
    const int N = mesh->num_nodes();
    for (int z = 0; z < N; ++z) {
        double best = sup ? -std::numeric_limits<double>::infinity()
                          : std::numeric_limits<double>::infinity();
        for (int w = 0; w < N; ++w) {
            if (dist(mesh->pos[static_cast<std::size_t>(z)], mesh->pos[static_cast<std::size_t>(w)]) > radius)
                continue;
            for (int m = jstar - 1; m < J; ++m) {
                const double val = seq[static_cast<std::size_t>(m)][w];
                best = sup ? std::max(best, val) : std::min(best, val);
            }
        }
        out[z] = best;
    }
    return out;
}

}  // namespace

ScalarField limsup_star(const std::vector<ScalarField>& seq, RelaxedLimitOptions opts) {
    return relaxed_limit(seq, opts, true);
}

ScalarField liminf_star(const std::vector<ScalarField>& seq, RelaxedLimitOptions opts) {
    return relaxed_limit(seq, opts, false);
}

}  // namespace cmaflow
