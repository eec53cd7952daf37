#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "shapeflow/errors.hpp"
#include "shapeflow/fem.hpp"
#include "test_support.hpp"

using namespace shapeflow;
using namespace testsupport;

TEST_CASE("radial shooting reference matches frozen constants") {
    CHECK(diskOracle(1.0, BoundaryCondition::dirichlet()) == doctest::Approx(oracles::kJ01Sq).epsilon(1e-10));
    CHECK(diskOracle(2.0, BoundaryCondition::dirichlet()) == doctest::Approx(oracles::kJ01Sq / 4).epsilon(1e-10));
    CHECK(diskOracle(1.0, BoundaryCondition::robin(0.5)) == doctest::Approx(oracles::kRobinDiskBetaHalf).epsilon(1e-10));
    CHECK(diskOracle(1.0, BoundaryCondition::robin(1.0)) == doctest::Approx(oracles::kRobinDiskBetaOne).epsilon(1e-10));
    CHECK(diskOracle(1.0, BoundaryCondition::robin(10.0)) == doctest::Approx(oracles::kRobinDiskBetaTen).epsilon(1e-10));
    CHECK(diskOracle(1.0, BoundaryCondition::robin(0.0)) == 0.0);
    CHECK(diskOracle(1.0, BoundaryCondition::robin(-0.5)) == doctest::Approx(oracles::kRobinDiskBetaMinusHalf).epsilon(1e-9));
    CHECK(diskOracle(1.0, BoundaryCondition::robin(-1.0)) == doctest::Approx(oracles::kRobinDiskBetaMinusOne).epsilon(1e-9));
    CHECK(diskOracle(1.0, BoundaryCondition::robin(-2.0)) == doctest::Approx(oracles::kRobinDiskBetaMinusTwo).epsilon(1e-9));
    // large beta approaches the Dirichlet value from below
    CHECK(diskOracle(1.0, BoundaryCondition::robin(1e4)) == doctest::Approx(oracles::kRobinDiskBetaHuge).epsilon(1e-9));
    CHECK_THROWS_AS(diskOracle(-1.0, BoundaryCondition::dirichlet()), InvalidInput);
}

TEST_CASE("dirichlet disk eigenpair") {
    const RadialDomain d = makeDisk(1.0);
    const TriMesh coarse = triangulateFixed(d, 8);
    SolveOptions opts;
    opts.want_lambda2 = true;
    const EigenResult r = solveEigen(coarse, BoundaryCondition::dirichlet(), opts);
    CHECK(r.lambda1 == doctest::Approx(oracles::kJ01Sq).epsilon(8e-3));
    CHECK(r.lambda2.value() == doctest::Approx(oracles::kJ11Sq).epsilon(2e-2));
    CHECK(r.residual < 1e-9);
    CHECK(r.u.minCoeff() > -1e-9);  // ground state does not change sign

    // refinement shrinks the error roughly like h^2
    const EigenResult rf = solveEigen(refine(coarse, d), BoundaryCondition::dirichlet());
    const double e1 = std::abs(r.lambda1 - oracles::kJ01Sq);
    const double e2 = std::abs(rf.lambda1 - oracles::kJ01Sq);
    CHECK(e2 < 0.35 * e1);
}

TEST_CASE("robin disk eigenpair, positive beta") {
    const RadialDomain d = makeDisk(1.0);
    const TriMesh m = triangulateFixed(d, 16);
    SolveOptions opts;
    opts.want_lambda2 = true;
    const EigenResult r = solveEigen(m, BoundaryCondition::robin(1.0), opts);
    CHECK(r.lambda1 == doctest::Approx(oracles::kRobinDiskBetaOne).epsilon(5e-3));
    CHECK(r.lambda2.value() == doctest::Approx(oracles::kRobinDiskBetaOneLambda2).epsilon(2e-2));
    CHECK(r.u.minCoeff() > 0.0);  // Robin ground state is strictly positive up to the boundary
    CHECK(r.trace_ratio > 0.0);
}

TEST_CASE("robin disk, zero and negative beta") {
    const RadialDomain d = makeDisk(1.0);
    const TriMesh m = triangulateFixed(d, 16);

    const EigenResult r0 = solveEigen(m, BoundaryCondition::robin(0.0));
    CHECK(std::abs(r0.lambda1) < 1e-10);  // constants are exact discrete eigenfunctions

    const EigenResult rm = solveEigen(m, BoundaryCondition::robin(-1.0));
    CHECK(rm.lambda1 == doctest::Approx(oracles::kRobinDiskBetaMinusOne).epsilon(8e-3));

    const EigenResult rm2 = solveEigen(m, BoundaryCondition::robin(-2.0));
    CHECK(rm2.lambda1 == doctest::Approx(oracles::kRobinDiskBetaMinusTwo).epsilon(2e-2));
}

TEST_CASE("square dirichlet eigenvalue via support conversion") {
    const RadialDomain sq = supportToRadial(makeSquare(1.0), 127);
    const TriMesh m = triangulateFixed(sq, 32);
    const EigenResult r = solveEigen(m, BoundaryCondition::dirichlet());
    CHECK(r.lambda1 == doctest::Approx(oracles::kSquareSide2Dirichlet).epsilon(2e-2));
}

TEST_CASE("scaling laws") {
    // lambda_D(r Omega) = lambda_D(Omega) / r^2 holds exactly for scaled meshes
    const RadialDomain d1 = makeFlower(1.0, 0.2, 3);
    const RadialDomain d2 = RadialDomain::fromFourier(2.0 * d1.fourier, d1.sampleCount());
    const EigenResult r1 = solveEigen(triangulateFixed(d1, 8), BoundaryCondition::dirichlet());
    const EigenResult r2 = solveEigen(triangulateFixed(d2, 8), BoundaryCondition::dirichlet());
    CHECK(r2.lambda1 == doctest::Approx(r1.lambda1 / 4.0).epsilon(1e-10));

    // Robin: lambda_R(r Omega) <= lambda_R(Omega)/r for r >= 1
    const BoundaryCondition rb = BoundaryCondition::robin(1.0);
    const EigenResult q1 = solveEigen(triangulateFixed(d1, 8), rb);
    const EigenResult q2 = solveEigen(triangulateFixed(d2, 8), rb);
    CHECK(q2.lambda1 <= q1.lambda1 / 2.0 + 1e-12);
}

TEST_CASE("rayleigh quotient and inertia counts") {
    const RadialDomain d = makeDisk(1.0);
    const TriMesh m = triangulateFixed(d, 8);
    const AssembledSystem sys = assemble(m);

    // constant test vector under Robin: R(1) = beta |dOmega| / |Omega|
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.vertexCount());
    const double per = [&] {
        double acc = 0.0;
        for (int i = 0; i < m.boundaryCount(); ++i) {
            acc += (m.vertices[m.boundary_loop[i]] - m.vertices[m.boundary_loop[(i + 1) % m.boundaryCount()]]).norm();
        }
        return acc;
    }();
    CHECK(rayleigh(ones, BoundaryCondition::robin(2.0), sys) == doctest::Approx(2.0 * per / meshArea(m)).epsilon(1e-12));
    CHECK_THROWS_AS(rayleigh(Eigen::VectorXd::Zero(m.vertexCount()), BoundaryCondition::dirichlet(), sys), ZeroVector);

    // Rayleigh bound: quotient of any vector dominates lambda1
    SolveOptions opts;
    opts.want_lambda2 = true;
    const EigenResult r = solveEigen(m, BoundaryCondition::robin(2.0), opts);
    Eigen::VectorXd probe(m.vertexCount());
    for (int i = 0; i < m.vertexCount(); ++i) probe[i] = std::sin(3.0 * i) + 0.5;
    CHECK(rayleigh(probe, BoundaryCondition::robin(2.0), sys) >= r.lambda1 - 1e-10);

    // inertia: exactly one pencil eigenvalue below a shift between lambda1 and lambda2
    const SpMat A = sys.stiffness + 2.0 * sys.boundary_mass;
    const double mid = 0.5 * (r.lambda1 + r.lambda2.value());
    CHECK(eigenvalueCountBelow(A, sys.mass, mid) == 1);
    CHECK(eigenvalueCountBelow(A, sys.mass, r.lambda1 - 0.1) == 0);
}

TEST_CASE("warm-started shift reduces iteration count") {
    const RadialDomain d = makeFlower(1.0, 0.15, 4);
    const TriMesh m = triangulateFixed(d, 16);
    const EigenResult cold = solveEigen(m, BoundaryCondition::dirichlet());
    SolveOptions warm;
    warm.shift_hint = cold.lambda1;
    const EigenResult hot = solveEigen(m, BoundaryCondition::dirichlet(), warm);
    CHECK(hot.lambda1 == doctest::Approx(cold.lambda1).epsilon(1e-10));
    CHECK(hot.iterations < cold.iterations);
}

TEST_CASE("degenerate triangles are rejected") {
    TriMesh m;
    m.vertices = {{0, 0}, {1, 0}, {2, 0}};
    m.triangles = {{0, 1, 2}};
    m.boundary_loop = {0, 1, 2};
    m.boundary_theta = {0, 1, 2};
    m.h_max = 2.0;
    CHECK_THROWS_AS(assemble(m), DegenerateTriangle);
}
