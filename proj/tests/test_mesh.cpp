#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "shapeflow/errors.hpp"
#include "shapeflow/mesh.hpp"
#include "test_support.hpp"

using namespace shapeflow;
using namespace testsupport;

TEST_CASE("disk mesh counts and orientation") {
    const RadialDomain d = makeDisk(1.0);
    for (int n : {4, 8, 16}) {
        const TriMesh m = triangulateFixed(d, n);
        CHECK(m.vertexCount() == 1 + 4 * n * (n + 1));
        CHECK(m.triangleCount() == 8 * n * n);
        CHECK(m.boundaryCount() == 8 * n);
        for (int t = 0; t < m.triangleCount(); ++t) CHECK(triangleArea(m, t) > 0.0);
    }
}

TEST_CASE("mesh area converges to the domain area") {
    const RadialDomain d = makeFlower(1.0, 0.15, 3);
    const double ref = area(d);
    const TriMesh coarse = triangulateFixed(d, 8);
    const TriMesh fine = triangulateFixed(d, 16);
    const double e1 = std::abs(meshArea(coarse) - ref);
    const double e2 = std::abs(meshArea(fine) - ref);
    CHECK(e1 < 0.02 * ref);
    CHECK(e2 < 0.3 * e1);  // roughly O(h^2)
}

TEST_CASE("element quality stays bounded on representative shapes") {
    const double deg = 180.0 / oracles::kPi;
    for (const RadialDomain& d : {makeDisk(1.0), makeFlower(1.0, 0.2, 3), makeEllipseRadial(1.6, 0.8)}) {
        const TriMesh m = triangulateFixed(d, 16);
        CHECK(minAngle(m) * deg > 20.0);
    }
}

TEST_CASE("boundary loop is aligned, ordered, and on the curve") {
    const RadialDomain d = makeFlower(1.0, 0.1, 4);
    const TriMesh m = triangulate(d, 0.12);
    const int B = m.boundaryCount();
    CHECK((d.sampleCount() % B == 0 || B % d.sampleCount() == 0));
    for (int i = 0; i < B; ++i) {
        const double th = m.boundary_theta[i];
        CHECK(th == doctest::Approx(kTwoPi * i / B).epsilon(1e-14));
        const Eigen::Vector2d v = m.vertices[m.boundary_loop[i]];
        CHECK(v.norm() == doctest::Approx(d.eta(th)).epsilon(1e-12));
    }
}

TEST_CASE("target size controls h_max") {
    const RadialDomain d = makeDisk(1.0);
    for (double target : {0.3, 0.15, 0.08}) {
        const TriMesh m = triangulate(d, target);
        CHECK(m.h_max <= 1.05 * target);
    }
    CHECK_THROWS_AS(triangulateFixed(d, 2), TargetTooCoarse);
    CHECK_THROWS_AS(triangulate(d, 1e-5), InvalidInput);
}

TEST_CASE("refinement quadruples triangles and projects boundary midpoints") {
    const RadialDomain d = makeFlower(1.0, 0.12, 5);
    const TriMesh m = triangulateFixed(d, 8);
    const TriMesh r = refine(m, d);
    CHECK(r.triangleCount() == 4 * m.triangleCount());
    CHECK(r.boundaryCount() == 2 * m.boundaryCount());
    for (int t = 0; t < r.triangleCount(); ++t) CHECK(triangleArea(r, t) > 0.0);
    for (int i = 0; i < r.boundaryCount(); ++i) {
        const Eigen::Vector2d v = r.vertices[r.boundary_loop[i]];
        CHECK(v.norm() == doctest::Approx(d.eta(r.boundary_theta[i])).epsilon(1e-12));
    }
    CHECK(std::abs(meshArea(r) - area(d)) < 0.3 * std::abs(meshArea(m) - area(d)));
    CHECK(r.h_max < 0.62 * m.h_max);
}
