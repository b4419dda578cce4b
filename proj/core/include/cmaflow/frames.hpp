#pragma once

#include <array>
#include <vector>

#include "cmaflow/errors.hpp"

namespace cmaflow {

/// Integer complex direction v in Z[i]^n: component j is re[j] + i*im[j].
struct CDir {
    std::array<int, 2> re{0, 0};
    std::array<int, 2> im{0, 0};

    int norm2(int n) const {
        int s = 0;
        for (int j = 0; j < n; ++j) s += re[static_cast<std::size_t>(j)] * re[static_cast<std::size_t>(j)] + im[static_cast<std::size_t>(j)] * im[static_cast<std::size_t>(j)];
        return s;
    }
    /// Lattice offset of v under C^n = R^2n, coordinates (x1,y1,x2,y2).
    std::array<int, 4> real_offset() const { return {re[0], im[0], re[1], im[1]}; }
    /// Lattice offset of i*v (the second real direction of the complex line).
    std::array<int, 4> imag_offset() const { return {-im[0], re[0], -im[1], re[1]}; }
    int max_coord() const;
    bool operator==(const CDir& o) const { return re == o.re && im == o.im; }
};

CDir unit_direction(int j);  // e_j

/// A frame: n integer complex directions spanning C^n with positive weights,
/// normalized so that prod_i lambda_i |v_i|^2 = 1 (the represented hermitian
/// matrix A = sum_i lambda_i v_i v_i^* has det A = 1 for orthogonal frames).
struct Frame {
    std::array<CDir, 2> dir{};
    std::array<double, 2> lambda{1.0, 1.0};
};

/// Finite monotone parameterization of {A >= 0 hermitian, det A = 1} used by
/// the wide-stencil Monge-Ampere discretization.
struct FrameSet {
    int n = 1;
    int width = 1;  // max coordinate magnitude across directions
    std::vector<Frame> frames;            // identity frame first
    std::vector<CDir> directions;         // distinct directions over all frames
    std::vector<std::array<int, 2>> frame_dirs;     // per frame: indices into directions
    std::vector<std::array<double, 2>> frame_coeff; // per frame: lambda_i * |v_i|^2

    int num_frames() const { return static_cast<int>(frames.size()); }
    int num_directions() const { return static_cast<int>(directions.size()); }

    /// Validates the invariants (identity present, weights > 0, coords <= W,
    /// det normalization) and rebuilds the direction/coefficient tables.
    void finalize();

    static FrameSet identity(int n);
    static FrameSet from_frames(int n, std::vector<Frame> frames);
};

/// Default frame set: for n = 1 the single identity direction; for n = 2 the
/// identity frame plus all unitary integer frames of width <= W, each with
/// weight ratios lambda1/lambda2 in {1/4, 1/2, 1, 2, 4}.
FrameSet default_frame_set(int n, int width = 1);

}  // namespace cmaflow
