#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cmaflow/errors.hpp"
#include "cmaflow/field.hpp"
#include "cmaflow/frames.hpp"
#include "cmaflow/geometry.hpp"
#include "cmaflow/operators.hpp"

using namespace cmaflow;

namespace {

CDir dir1(int re0, int im0, int re1 = 0, int im1 = 0) {
    CDir d;
    d.re = {re0, re1};
    d.im = {im0, im1};
    return d;
}

}  // namespace

TEST_CASE("default frame sets satisfy their invariants") {
    for (const int n : {1, 2}) {
        const auto fs = default_frame_set(n, 1);
        CHECK(fs.n == n);
        // identity frame present and first
        for (int i = 0; i < n; ++i) {
            CHECK(fs.frames[0].dir[static_cast<std::size_t>(i)] == unit_direction(i));
            CHECK(fs.frames[0].lambda[static_cast<std::size_t>(i)] == doctest::Approx(1.0));
        }
        for (const auto& f : fs.frames) {
            double prod = 1.0;
            for (int i = 0; i < n; ++i) {
                CHECK(f.lambda[static_cast<std::size_t>(i)] > 0.0);
                CHECK(f.dir[static_cast<std::size_t>(i)].max_coord() <= 1);
                prod *= f.lambda[static_cast<std::size_t>(i)] *
                        f.dir[static_cast<std::size_t>(i)].norm2(n);
            }
            CHECK(prod == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    // n = 1 default is the single identity direction.
    CHECK(default_frame_set(1, 2).num_frames() == 1);
    CHECK(default_frame_set(2, 2).num_frames() > default_frame_set(2, 1).num_frames());
}

TEST_CASE("line laplacian on quadratics and pluriharmonics") {
    const auto mesh = build_mesh(DomainSpec::ball(1, 1.0), 1.0 / 8, 2);
    const auto abs2 = ScalarField::sample(mesh, [](const Point& z) { return z.norm2(); });
    const auto re_z2 = ScalarField::sample(mesh, [](const Point& z) {
        return z[0] * z[0] - z[1] * z[1];  // Re(z^2)
    });
    const int node = mesh.interior_nodes[static_cast<std::size_t>(mesh.num_interior() / 2)];
    for (const CDir& v : {dir1(1, 0), dir1(1, 1), dir1(2, 1)}) {
        CHECK(line_laplacian(abs2, v, node) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(line_laplacian(re_z2, v, node) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("line laplacian separates the two axes in C^2") {
    const auto mesh = build_mesh(DomainSpec::ball(2, 1.0), 1.0 / 4, 1);
    const auto f = ScalarField::sample(mesh, [](const Point& z) {
        return z[0] * z[0] + z[1] * z[1] - z[2] * z[2] - z[3] * z[3];  // |z1|^2 - |z2|^2
    });
    const int node = mesh.interior_nodes.front();
    CHECK(line_laplacian(f, dir1(1, 0, 0, 0), node) == doctest::Approx(1.0));
    CHECK(line_laplacian(f, dir1(0, 0, 1, 0), node) == doctest::Approx(-1.0));
}

TEST_CASE("line laplacian rejects reads past the band") {
    const auto mesh = build_mesh(DomainSpec::ball(1, 1.0), 0.25, 1);
    const auto f = ScalarField::sample(mesh, [](const Point& z) { return z.norm2(); });
    // A width-3 direction escapes the W=1 band from nodes near the rim.
    bool threw = false;
    for (const int node : mesh.interior_nodes) {
        try {
            (void)line_laplacian(f, dir1(3, 0), node);
        } catch (const StencilOutOfRange&) {
            threw = true;
        }
    }
    CHECK(threw);
}

TEST_CASE("ma_density is exactly 1 on |z|^2") {
    for (const int n : {1, 2}) {
        const double h = n == 1 ? 1.0 / 32 : 1.0 / 8;
        const auto mesh = build_mesh(DomainSpec::ball(n, 1.0), h, 1);
        const auto f = ScalarField::sample(mesh, [](const Point& z) { return z.norm2(); });
        const auto ma = ma_density(f, default_frame_set(n, 1));
        for (const int node : mesh.interior_nodes) CHECK(std::abs(ma[node] - 1.0) <= 1e-12);
    }
}

TEST_CASE("ma_density clamps negative Hessians to zero") {
    const auto mesh = build_mesh(DomainSpec::ball(1, 1.0), 1.0 / 8, 1);
    const auto f = ScalarField::sample(mesh, [](const Point& z) { return -z.norm2(); });
    const auto ma = ma_density(f, default_frame_set(1, 1));
    for (const int node : mesh.interior_nodes) CHECK(ma[node] == 0.0);
}

TEST_CASE("a matched anisotropic frame attains the determinant") {
    const auto mesh = build_mesh(DomainSpec::ball(2, 1.0), 1.0 / 4, 1);
    const auto f = ScalarField::sample(mesh, [](const Point& z) {
        return 2.0 * (z[0] * z[0] + z[1] * z[1]) + 0.5 * (z[2] * z[2] + z[3] * z[3]);
    });
    // Identity frame alone overshoots det H = 1 ...
    const auto ma_id = ma_density(f, FrameSet::identity(2));
    CHECK(ma_id[mesh.interior_nodes.front()] == doctest::Approx(1.5625));  // (1.25)^2
    // ... adding the (e1,e2) frame with weights (1/2, 2) attains it.
    Frame anis;
    anis.dir = {unit_direction(0), unit_direction(1)};
    anis.lambda = {0.5, 2.0};
    Frame id;
    id.dir = {unit_direction(0), unit_direction(1)};
    const auto fs = FrameSet::from_frames(2, {id, anis});
    const auto ma = ma_density(f, fs);
    for (const int node : mesh.interior_nodes)
        CHECK(ma[node] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hessian density oracle") {
    TestFunction abs2{"abs2", [](const Point& z) { return z.norm2(); }, {}};
    CHECK(hessian_density_exact(abs2, 1, Point{}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hessian_density_exact(abs2, 2, Point{}) == doctest::Approx(1.0).epsilon(1e-9));

    // exp(|z|^2) in C^1: density (1 + |z|^2) exp(|z|^2)
    TestFunction expabs{"exp_abs2", [](const Point& z) { return std::exp(z.norm2()); }, {}};
    Point p;
    p[0] = 0.3;
    p[1] = -0.2;
    const double r2 = p.norm2();
    CHECK(hessian_density_exact(expabs, 1, p, 0.01) ==
          doctest::Approx((1.0 + r2) * std::exp(r2)).epsilon(1e-7));

    // The unclamped oracle reports the raw determinant: -1 for -|z|^2 in C^1,
    // det(-I) = +1 in C^2.
    TestFunction neg{"neg_abs2", [](const Point& z) { return -z.norm2(); }, {}};
    CHECK(hessian_density_exact(neg, 1, Point{}) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(hessian_density_exact(neg, 2, Point{}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("consistency report: exact on quadratics, second order on |z|^4") {
    const auto domain = DomainSpec::ball(1, 1.0);
    const auto frames = default_frame_set(1, 1);
    std::vector<TestFunction> tests;
    tests.push_back(
        {"abs2", [](const Point& z) { return z.norm2(); }, [](const Point&) { return 1.0; }});
    tests.push_back({"abs4", [](const Point& z) { return z.norm2() * z.norm2(); },
                     [](const Point& z) { return 4.0 * z.norm2(); }});
    const auto rows = consistency_report(domain, frames, tests, {1.0 / 8, 1.0 / 16});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].max_err <= 1e-12);
    CHECK(rows[2].max_err <= 1e-12);
    // abs4: halving h cuts the error by at least 3.5
    CHECK(rows[1].max_err / rows[3].max_err >= 3.5);
    CHECK(!to_text(rows).empty());
}

TEST_CASE("rotated quadratic: wider frame sets reduce the directional error") {
    const double th = 0.7;
    const double c = std::cos(th), s = std::sin(th);
    // H = U diag(2, 1/2) U^T with U mixing z1 and z2; det H = 1.
    const auto rot = [c, s](const Point& z) {
        const double u1r = c * z[0] + s * z[2], u1i = c * z[1] + s * z[3];
        const double u2r = -s * z[0] + c * z[2], u2i = -s * z[1] + c * z[3];
        return 2.0 * (u1r * u1r + u1i * u1i) + 0.5 * (u2r * u2r + u2i * u2i);
    };
    const auto mesh = build_mesh(DomainSpec::ball(2, 1.0), 1.0 / 8, 2);
    const auto f = ScalarField::sample(mesh, rot);
    const int node = mesh.interior_nodes.front();

    double err[2] = {0, 0};
    int wi = 0;
    for (const int W : {1, 2}) {
        const auto ma = ma_density(f, default_frame_set(2, W));
        err[wi++] = ma[node] - 1.0;
    }
    CHECK(err[0] > 0.0);      // min over frames overshoots det H
    CHECK(err[1] <= err[0]);  // refinement never increases the density
    CHECK(err[1] < 0.2);
}

TEST_CASE("monotone scheme properties on random fields") {
    const auto mesh = build_mesh(DomainSpec::ball(2, 1.0), 1.0 / 4, 1);
    const auto frames = default_frame_set(2, 1);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    for (int trial = 0; trial < 20; ++trial) {
        ScalarField a(mesh);
        for (double& v : a.v) v = 2.0 * u01(rng) - 1.0;
        ScalarField b = a;
        // w >= u with equality at one chosen interior node
        const int pinned = mesh.interior_nodes[static_cast<std::size_t>(
            static_cast<int>(u01(rng) * (mesh.num_interior() - 1)))];
        for (int k = 0; k < mesh.num_nodes(); ++k)
            if (k != pinned) b[k] += u01(rng);

        const auto ma_a = ma_density(a, frames);
        const auto ma_b = ma_density(b, frames);
        CHECK(ma_a[pinned] <= ma_b[pinned] + 1e-13);

        // center monotonicity: raising the center never raises the density
        ScalarField c2 = a;
        c2[pinned] += 0.5;
        const auto ma_c = ma_density(c2, frames);
        CHECK(ma_c[pinned] <= ma_a[pinned] + 1e-13);

        // constant invariance
        ScalarField d = a;
        for (double& v : d.v) v += 3.25;
        const auto ma_d = ma_density(d, frames);
        double worst = 0.0;
        for (const int node : mesh.interior_nodes)
            worst = std::max(worst, std::abs(ma_d[node] - ma_a[node]));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("frame refinement never increases the density") {
    const auto mesh = build_mesh(DomainSpec::ball(2, 1.0), 1.0 / 8, 2);
    std::mt19937_64 rng(999);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    ScalarField a(mesh);
    for (double& v : a.v) v = u01(rng);
    const auto ma1 = ma_density(a, default_frame_set(2, 1));
    const auto ma2 = ma_density(a, default_frame_set(2, 2));
    for (const int node : mesh.interior_nodes) CHECK(ma2[node] <= ma1[node] + 1e-13);
}

TEST_CASE("field CSV round trip is exact") {
    const auto mesh = build_mesh(DomainSpec::ball(1, 1.0), 0.25, 1);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(-1.0, 1.0);
    ScalarField f(mesh);
    for (double& v : f.v) v = u01(rng) * 1e3;

    std::stringstream ss;
    write_field_csv(f, ss);
    const auto g = read_field_csv(mesh, ss);
    for (int k = 0; k < mesh.num_nodes(); ++k) CHECK(f[k] == g[k]);

    std::stringstream ss2;
    write_field_csv(f, ss2);
    std::string l1, l2, l3;
    std::getline(ss2, l1);
    std::getline(ss2, l2);
    std::getline(ss2, l3);
    CHECK(l1.substr(0, 2) == "n=");
    CHECK(l2.substr(0, 2) == "h=");
    CHECK(l3.substr(0, 5) == "bbox=");
}
