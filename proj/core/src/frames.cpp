#include "cmaflow/frames.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>

namespace cmaflow {

int CDir::max_coord() const {
    int m = 0;
    for (int j = 0; j < 2; ++j) {
        m = std::max(m, std::abs(re[static_cast<std::size_t>(j)]));
        m = std::max(m, std::abs(im[static_cast<std::size_t>(j)]));
    }
    return m;
}

CDir unit_direction(int j) {
    CDir d;
    d.re[static_cast<std::size_t>(j)] = 1;
    return d;
}

void FrameSet::finalize() {
    if (frames.empty()) throw ConfigError("frame set is empty");
    directions.clear();
    frame_dirs.clear();
    frame_coeff.clear();

    const auto dir_index = [&](const CDir& d) {
        for (int i = 0; i < static_cast<int>(directions.size()); ++i)
            if (directions[static_cast<std::size_t>(i)] == d) return i;
        directions.push_back(d);
        return static_cast<int>(directions.size()) - 1;
    };

    width = 1;
    bool has_identity = false;
    for (auto& f : frames) {
        double prod = 1.0;
        std::array<int, 2> ids{0, 0};
        std::array<double, 2> coeff{1.0, 1.0};
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (!(f.lambda[ui] > 0)) throw ConfigError("frame weights must be positive");
            const int n2 = f.dir[ui].norm2(n);
            if (n2 == 0) throw ConfigError("frame direction is zero");
            prod *= f.lambda[ui] * n2;
            width = std::max(width, f.dir[ui].max_coord());
        }
        // Rescale weights so prod_i lambda_i |v_i|^2 = 1.
        const double s = std::pow(prod, -1.0 / n);
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            f.lambda[ui] *= s;
            ids[ui] = dir_index(f.dir[ui]);
            coeff[ui] = f.lambda[ui] * f.dir[ui].norm2(n);
        }
        frame_dirs.push_back(ids);
        frame_coeff.push_back(coeff);

        bool ident = true;
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (!(f.dir[ui] == unit_direction(i)) || std::abs(f.lambda[ui] - 1.0) > 1e-14) ident = false;
        }
        if (ident) has_identity = true;
    }
    if (!has_identity) throw ConfigError("frame set must contain the identity frame");
}

FrameSet FrameSet::identity(int n) {
    FrameSet fs;
    fs.n = n;
    Frame id;
    for (int i = 0; i < n; ++i) id.dir[static_cast<std::size_t>(i)] = unit_direction(i);
    fs.frames.push_back(id);
    fs.finalize();
    return fs;
}

FrameSet FrameSet::from_frames(int n, std::vector<Frame> frames) {
    FrameSet fs;
    fs.n = n;
    fs.frames = std::move(frames);
    fs.finalize();
    return fs;
}

namespace {

using C = std::complex<double>;

// Canonical key of the complex line through v: normalize to unit length, fix
// the phase so the first nonzero component is real positive, quantize.
std::array<std::int64_t, 4> line_key(const CDir& v, int n) {
    std::array<C, 2> u{C(v.re[0], v.im[0]), C(v.re[1], v.im[1])};
    double norm = 0.0;
    for (int j = 0; j < n; ++j) norm += std::norm(u[static_cast<std::size_t>(j)]);
    norm = std::sqrt(norm);
    C phase(1.0, 0.0);
    for (int j = 0; j < n; ++j) {
        const auto uj = u[static_cast<std::size_t>(j)];
        if (std::abs(uj) > 1e-12) {
            phase = std::conj(uj) / std::abs(uj);
            break;
        }
    }
    std::array<std::int64_t, 4> key{};
    for (int j = 0; j < n; ++j) {
        const C w = u[static_cast<std::size_t>(j)] * phase / norm;
        key[static_cast<std::size_t>(2 * j)] = std::llround(w.real() * (1 << 24));
        key[static_cast<std::size_t>(2 * j + 1)] = std::llround(w.imag() * (1 << 24));
    }
    return key;
}

bool hermitian_orthogonal(const CDir& a, const CDir& b) {
    // sum_j a_j conj(b_j) = 0, exact integer arithmetic.
    int re = 0, im = 0;
    for (int j = 0; j < 2; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        re += a.re[uj] * b.re[uj] + a.im[uj] * b.im[uj];
        im += a.im[uj] * b.re[uj] - a.re[uj] * b.im[uj];
    }
    return re == 0 && im == 0;
}

}  // namespace

FrameSet default_frame_set(int n, int width) {
    if (n == 1) return FrameSet::identity(1);

    // Distinct complex lines of Z[i]^2 vectors with coordinates bounded by W,
    // keeping a minimal-norm representative per line.
    std::map<std::array<std::int64_t, 4>, CDir> lines;
    for (int a = -width; a <= width; ++a)
        for (int b = -width; b <= width; ++b)
            for (int c = -width; c <= width; ++c)
                for (int d = -width; d <= width; ++d) {
                    CDir v;
                    v.re = {a, c};
                    v.im = {b, d};
                    if (v.norm2(2) == 0) continue;
                    const auto key = line_key(v, 2);
                    auto it = lines.find(key);
                    if (it == lines.end() || v.norm2(2) < it->second.norm2(2))
                        lines[key] = v;
                }

    std::vector<CDir> dirs;
    dirs.reserve(lines.size());
    for (const auto& [k, v] : lines) dirs.push_back(v);

    const std::array<double, 5> ratios{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<Frame> frames;
    Frame id;
    id.dir = {unit_direction(0), unit_direction(1)};
    frames.push_back(id);

    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
            if (!hermitian_orthogonal(dirs[i], dirs[j])) continue;
            const bool is_identity_pair =
                (dirs[i] == unit_direction(0) && dirs[j] == unit_direction(1)) ||
                (dirs[i] == unit_direction(1) && dirs[j] == unit_direction(0));
            for (const double r : ratios) {
                if (is_identity_pair && r == 1.0) continue;  // already present
                Frame f;
                f.dir = {dirs[i], dirs[j]};
                f.lambda = {r, 1.0};  // ratio lambda1/lambda2 = r; finalize() rescales
                frames.push_back(f);
            }
        }

    return FrameSet::from_frames(2, std::move(frames));
}

}  // namespace cmaflow
