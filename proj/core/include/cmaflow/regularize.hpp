#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cmaflow/field.hpp"

namespace cmaflow {

/// A function sampled on a uniform time grid; each sample carries `width`
/// spatial slots (width 1 for scalar signals, num_nodes for grid fields).
/// Carries the oscillation constant A > 2 osc used by the time convolutions.
struct TimeSampledFunction {
    std::vector<double> times;  // strictly increasing, uniform
    int width = 1;
    std::vector<double> data;  // times.size() * width, row-major in time
    double osc_bound = 0.0;    // the constant A

    int samples() const { return static_cast<int>(times.size()); }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    double horizon() const { return times.back(); }
    double at(int k, int j = 0) const { return data[static_cast<std::size_t>(k) * width + static_cast<std::size_t>(j)]; }
    double& at(int k, int j = 0) { return data[static_cast<std::size_t>(k) * width + static_cast<std::size_t>(j)]; }
    double oscillation() const;

    /// Builds from scalar samples; A defaults to 2*osc + 1.
    static TimeSampledFunction scalar_signal(std::vector<double> times, std::vector<double> values,
                                             std::optional<double> A = std::nullopt);
    static TimeSampledFunction from_fields(std::vector<double> times,
                                           const std::vector<ScalarField>& slices,
                                           std::optional<double> A = std::nullopt);
    void validate() const;
};

/// Result of a time sup/inf-convolution: the regularized samples, the
/// attaining sample index per entry, and the validity window ]A/k, T - A/k[.
/// Queries outside the window are flagged (counted), not fatal.
struct TimeConvolution {
    TimeSampledFunction fn;
    double k = 0.0;
    std::array<double, 2> validity{0.0, 0.0};
    std::vector<std::int32_t> arg_index;  // samples() * width
    mutable long flagged_queries = 0;

    bool in_validity(double t) const { return t >= validity[0] && t <= validity[1]; }
    /// Value lookup by sample index that counts out-of-window accesses.
    double value_checked(int sample, int j = 0) const;
};

/// u^k(t,x) = max over sampled s of (u(s,x) - k|s - t|). Exhaustive scan.
TimeConvolution sup_convolution_time(const TimeSampledFunction& u, double k);

/// v_k(t,x) = min over sampled s of (v(s,x) + k|s - t|).
TimeConvolution inf_convolution_time(const TimeSampledFunction& v, double k);

struct RelaxedLimitOptions {
    int truncation_index = 0;   // 1-based j*; 0 -> ceil(J/2)
    double radius_scale = 1.0;  // neighborhood radius r_j = scale / j
};

/// Sampled upper relaxed semi-limit of a field sequence, truncated at the
/// sequence length: value(z) = sup{ h_m(z') : m >= j*, |z'-z| <= scale/j* }.
ScalarField limsup_star(const std::vector<ScalarField>& seq, RelaxedLimitOptions opts = {});
/// Lower relaxed semi-limit (dual).
ScalarField liminf_star(const std::vector<ScalarField>& seq, RelaxedLimitOptions opts = {});

}  // namespace cmaflow
