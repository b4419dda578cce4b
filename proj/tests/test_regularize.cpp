#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cmaflow/regularize.hpp"

using namespace cmaflow;

namespace {

std::vector<double> tgrid(double T, int m) {
    std::vector<double> t;
    for (int i = 0; i < m; ++i) t.push_back(T * i / (m - 1));
    return t;
}

}  // namespace

TEST_CASE("sup convolution of a constant is the constant") {
    const auto t = tgrid(1.0, 21);
    const auto u = TimeSampledFunction::scalar_signal(t, std::vector<double>(21, 3.0));
    const auto uk = sup_convolution_time(u, 2.0);
    for (int k = 0; k < uk.fn.samples(); ++k) CHECK(uk.fn.at(k) == 3.0);
    const auto vk = inf_convolution_time(u, 2.0);
    for (int k = 0; k < vk.fn.samples(); ++k) CHECK(vk.fn.at(k) == 3.0);
}

TEST_CASE("sup convolution of -|s - 1/2| with k = 2") {
    // 101 samples on [0,1] so that s = 0.5 is on the grid.
    const auto t = tgrid(1.0, 101);
    std::vector<double> vals;
    for (const double s : t) vals.push_back(-std::abs(s - 0.5));
    const auto u = TimeSampledFunction::scalar_signal(t, vals);
    const auto uk = sup_convolution_time(u, 2.0);
    CHECK(uk.fn.at(50) == doctest::Approx(0.0));   // t = 0.5
    CHECK(uk.fn.at(0) == doctest::Approx(-0.5));   // t = 0: attained at s = 0
}

TEST_CASE("inf convolution of |s - 1/2| vanishes at the kink") {
    const auto t = tgrid(1.0, 101);
    std::vector<double> vals;
    for (const double s : t) vals.push_back(std::abs(s - 0.5));
    const auto v = TimeSampledFunction::scalar_signal(t, vals);
    const auto vk = inf_convolution_time(v, 2.0);
    CHECK(vk.fn.at(50) == doctest::Approx(0.0));
}

TEST_CASE("Lemma 2.4 bullet properties on random piecewise-linear signals") {
    std::mt19937_64 rng(20240608);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int signals = 50;
    for (int trial = 0; trial < signals; ++trial) {
        const int m = 40 + static_cast<int>(u01(rng) * 80);
        const double T = 0.5 + u01(rng);
        const auto t = tgrid(T, m);
        // piecewise-linear: random values at ~6 knots, linear in between
        const int knots = 6;
        std::vector<double> kv(knots);
        for (double& x : kv) x = 2.0 * u01(rng) - 1.0;
        std::vector<double> vals;
        for (int i = 0; i < m; ++i) {
            const double s = static_cast<double>(i) / (m - 1) * (knots - 1);
            const int j = std::min(static_cast<int>(s), knots - 2);
            const double w = s - j;
            vals.push_back(kv[static_cast<std::size_t>(j)] * (1 - w) +
                           kv[static_cast<std::size_t>(j + 1)] * w);
        }
        const auto u = TimeSampledFunction::scalar_signal(t, vals);
        const double k = 0.5 + 3.0 * u01(rng);
        const auto uk = sup_convolution_time(u, k);
        const auto vk = inf_convolution_time(u, k);

        const double A = u.osc_bound;
        for (int i = 0; i < m; ++i) {
            // sandwich: u <= u^k <= sup over the A/k window; v_k <= v
            CHECK(uk.fn.at(i) >= u.at(i));
            CHECK(vk.fn.at(i) <= u.at(i));
            double wsup = -1e300;
            for (int j = 0; j < m; ++j)
                if (std::abs(t[static_cast<std::size_t>(j)] - t[static_cast<std::size_t>(i)]) <=
                    A / k)
                    wsup = std::max(wsup, u.at(j));
            CHECK(uk.fn.at(i) <= wsup + 1e-12);

            // brute-force oracle equals the implementation bit for bit
            double brute = -1e300;
            for (int j = 0; j < m; ++j)
                brute = std::max(brute, u.at(j) - k * std::abs(t[static_cast<std::size_t>(j)] -
                                                               t[static_cast<std::size_t>(i)]));
            CHECK(uk.fn.at(i) == brute);
        }
        // k-Lipschitz on all sample pairs
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const double dtij = t[static_cast<std::size_t>(j)] - t[static_cast<std::size_t>(i)];
                CHECK(std::abs(uk.fn.at(i) - uk.fn.at(j)) <= k * dtij + 1e-12);
                CHECK(std::abs(vk.fn.at(i) - vk.fn.at(j)) <= k * dtij + 1e-12);
            }
        // attainment: for t0 <= T - A/k the attaining sample is within A/k
        // and reproduces the value exactly
        for (int i = 0; i < m; ++i) {
            if (t[static_cast<std::size_t>(i)] > T - A / k) continue;
            const int j = uk.arg_index[static_cast<std::size_t>(i)];
            const double gap = std::abs(t[static_cast<std::size_t>(j)] - t[static_cast<std::size_t>(i)]);
            CHECK(gap <= A / k + 1e-12);
            CHECK(uk.fn.at(i) == u.at(j) - k * gap);
        }
    }
}

TEST_CASE("sup convolution is nonincreasing in k") {
    const auto t = tgrid(1.0, 64);
    std::vector<double> vals;
    for (const double s : t) vals.push_back(std::sin(9.0 * s));
    const auto u = TimeSampledFunction::scalar_signal(t, vals);
    const auto u1 = sup_convolution_time(u, 1.0);
    const auto u2 = sup_convolution_time(u, 2.0);
    for (int i = 0; i < u.samples(); ++i) CHECK(u2.fn.at(i) <= u1.fn.at(i) + 1e-14);
}

TEST_CASE("validity window flags queries without failing") {
    const auto t = tgrid(1.0, 11);
    std::vector<double> vals;
    for (const double s : t) vals.push_back(s);
    const auto u = TimeSampledFunction::scalar_signal(t, vals, 2.2);  // A = 2.2 > 2*osc = 2
    const auto uk = sup_convolution_time(u, 10.0);
    CHECK(uk.validity[0] == doctest::Approx(0.22));
    CHECK(uk.validity[1] == doctest::Approx(0.78));
    CHECK(uk.flagged_queries == 0);
    (void)uk.value_checked(0);  // t = 0 is outside the window
    CHECK(uk.flagged_queries == 1);
    (void)uk.value_checked(5);  // t = 0.5 is inside
    CHECK(uk.flagged_queries == 1);
}

TEST_CASE("relaxed semi-limits of constant sequences") {
    const auto mesh = build_mesh(DomainSpec::ball(1, 1.0), 0.25, 1);
    const int J = 100;
    std::vector<ScalarField> seq;
    for (int j = 1; j <= J; ++j) seq.push_back(ScalarField(mesh, -1.0 / j));
    const auto up = limsup_star(seq);
    // truncated value is -1/J at every node; the limit is 0
    for (int k = 0; k < mesh.num_nodes(); ++k) CHECK(std::abs(up[k]) <= 2.0 / J);
}

TEST_CASE("relaxed semi-limits of an alternating sequence") {
    const auto mesh = build_mesh(DomainSpec::ball(1, 1.0), 0.25, 1);
    const double a = -0.5, b = 1.25;
    std::vector<ScalarField> seq;
    for (int j = 1; j <= 9; ++j) seq.push_back(ScalarField(mesh, j % 2 ? a : b));
    const auto up = limsup_star(seq);
    const auto lo = liminf_star(seq);
    for (int k = 0; k < mesh.num_nodes(); ++k) {
        CHECK(up[k] == b);
        CHECK(lo[k] == a);
        CHECK(lo[k] <= up[k]);
    }
}

TEST_CASE("relaxed semi-limit of min(1, j|z|) against the truncated definition") {
    const auto mesh = build_mesh(DomainSpec::ball(1, 1.0), 0.125, 1);
    const int J = 8;
    std::vector<ScalarField> seq;
    for (int j = 1; j <= J; ++j)
        seq.push_back(ScalarField::sample(
            mesh, [j](const Point& z) { return std::min(1.0, j * z.norm()); }));
    const auto up = limsup_star(seq);

    // independent brute-force evaluation of the truncated definition
    const int jstar = (J + 1) / 2;
    const double radius = 1.0 / jstar;
    for (int k = 0; k < mesh.num_nodes(); ++k) {
        double brute = -1e300;
        for (int w = 0; w < mesh.num_nodes(); ++w) {
            if (dist(mesh.pos[static_cast<std::size_t>(k)], mesh.pos[static_cast<std::size_t>(w)]) >
                radius)
                continue;
            for (int j = jstar; j <= J; ++j) brute = std::max(brute, seq[static_cast<std::size_t>(j - 1)][w]);
        }
        CHECK(up[k] == brute);
    }
    // away from the origin the limit value 1 is already reached
    for (int k = 0; k < mesh.num_nodes(); ++k)
        if (mesh.pos[static_cast<std::size_t>(k)].norm() > 0.5) CHECK(up[k] == 1.0);
}

TEST_CASE("monotone nondecreasing sequences: limsup* equals the local sup of the last term") {
    const auto mesh = build_mesh(DomainSpec::ball(1, 1.0), 0.25, 1);
    const int J = 6;
    std::vector<ScalarField> seq;
    for (int j = 1; j <= J; ++j)
        seq.push_back(
            ScalarField::sample(mesh, [j](const Point& z) { return -z.norm2() / j; }));
    const auto up = limsup_star(seq);
    const int jstar = (J + 1) / 2;
    const double radius = 1.0 / jstar;
    for (int k = 0; k < mesh.num_nodes(); ++k) {
        double local = -1e300;
        for (int w = 0; w < mesh.num_nodes(); ++w)
            if (dist(mesh.pos[static_cast<std::size_t>(k)],
                     mesh.pos[static_cast<std::size_t>(w)]) <= radius)
                local = std::max(local, seq.back()[w]);
        CHECK(up[k] == doctest::Approx(local));
    }
}
