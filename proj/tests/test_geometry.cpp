#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shapeflow/errors.hpp"
#include "shapeflow/geometry.hpp"
#include "test_support.hpp"

using namespace shapeflow;
using namespace testsupport;

namespace {
constexpr double kPi = oracles::kPi;
}

TEST_CASE("radial domain construction invariants") {
    const RadialDomain d = makeDisk(1.5);
    CHECK(d.sampleCount() == kDefaultSamples);
    CHECK(d.modes() == kDefaultModes);
    CHECK(d.minRadius() == doctest::Approx(1.5));
    CHECK(d.maxRadius() == doctest::Approx(1.5));

    // samples must be the exact synthesis of the coefficients
    const RadialDomain f = makeFlower(1.0, 0.3, 3);
    for (int i = 0; i < f.sampleCount(); ++i) {
        CHECK(std::abs(f.samples[i] - f.eta(thetaAt(i, f.sampleCount()))) < 1e-14);
    }

    // a graph dipping below zero is rejected
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(2 * 4 + 1);
    bad[0] = 0.5;
    bad[1] = 0.8;
    CHECK_THROWS_AS(RadialDomain::fromFourier(bad, 64), InvalidInput);
}

TEST_CASE("fromSamples projects then resynthesizes") {
    std::mt19937_64 rng(11);
    const RadialDomain d = randomDomain(rng);
    const RadialDomain back = RadialDomain::fromSamples(d.samples, d.modes());
    CHECK((back.fourier - d.fourier).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.samples - d.samples).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("areas and perimeters: closed forms") {
    CHECK(area(makeDisk(1.0)) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(perimeter(makeDisk(2.0)) == doctest::Approx(4 * kPi).epsilon(1e-12));

    // eta = 1 + 0.1 cos(3 theta): area = pi (1 + 0.01/2)
    const RadialDomain f = makeFlower(1.0, 0.1, 3);
    CHECK(area(f) == doctest::Approx(kPi * 1.005).epsilon(1e-13));

    // polytope support functions have an O(1/N) spectral tail in the area formula;
    // smooth bodies are exact to round-off
    const ConvexBody sq = makeSquare(1.0);
    CHECK(area(sq) == doctest::Approx(4.0).epsilon(1e-2));
    CHECK(perimeter(sq) == doctest::Approx(8.0).epsilon(1e-4));
    const ConvexBody sq4 = polygonToSupport({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, 1024);
    CHECK(std::abs(area(sq4) - 4.0) < 0.5 * std::abs(area(sq) - 4.0));

    const ConvexBody el = makeEllipseBody(2.0, 1.0);
    CHECK(area(el) == doctest::Approx(2 * kPi).epsilon(1e-10));
    CHECK(perimeter(el) == doctest::Approx(oracles::kEllipse21Perimeter).epsilon(1e-10));

    // degenerate bodies: a point and a segment
    const ConvexBody pt = polygonToSupport({{1.0, 0.0}});
    CHECK(pt.support[0] == doctest::Approx(1.0));
    CHECK(std::abs(area(pt)) < 1e-10);  // support of a point is band-limited
    const ConvexBody seg = polygonToSupport({{-1.0, 0.0}, {1.0, 0.0}});
    CHECK(std::abs(area(seg)) < 2e-2);
    CHECK(perimeter(seg) == doctest::Approx(4.0).epsilon(1e-4));  // twice the length
}

TEST_CASE("boundary curvature") {
    const Eigen::VectorXd kd = boundaryCurvature(makeDisk(2.0));
    CHECK(kd.minCoeff() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(kd.maxCoeff() == doctest::Approx(0.5).epsilon(1e-12));

    const RadialDomain f = makeFlower(1.0, 0.05, 4);
    const Eigen::VectorXd kf = boundaryCurvature(f);
    CHECK(kf[0] == doctest::Approx(oracles::kFlowerCurvatureAt0).epsilon(1e-12));
}

TEST_CASE("support construction and discrete convexity certificate") {
    const ConvexBody sq = makeSquare(1.0);
    CHECK(sq.convexityMargin() >= -1e-12);

    // support of a single point has exact equality in the certificate
    const ConvexBody pt = polygonToSupport({{0.7, -0.2}});
    CHECK(std::abs(pt.convexityMargin()) < 1e-12);

    Eigen::VectorXd bad = makeSquare(1.0).support;
    bad[10] += 0.3;  // a bump violates sublinearity
    CHECK_THROWS_AS(ConvexBody::fromSupportSamples(bad), InvalidInput);

    CHECK_THROWS_AS(polygonToSupport({}), InvalidInput);
}

TEST_CASE("minkowski combination") {
    const ConvexBody b1 = makeEllipseBody(1.0, 1.0);
    const ConvexBody b2 = makeEllipseBody(2.0, 2.0);
    const ConvexBody mid = minkowskiCombine(b1, b2, 0.5);
    CHECK(area(mid) == doctest::Approx(kPi * 1.5 * 1.5).epsilon(1e-10));
    CHECK_THROWS_AS(minkowskiCombine(b1, b2, 1.5), InvalidInput);
    CHECK_THROWS_AS(minkowskiCombine(b1, makeEllipseBody(1, 1, 128), 0.5), InvalidInput);

    // Brunn-Minkowski for areas along the path square -> ellipse
    const ConvexBody k0 = makeSquare(1.0);
    const ConvexBody k1 = makeEllipseBody(2.0, 1.0);
    for (double t : {0.25, 0.5, 0.75}) {
        const double lhs = std::sqrt(area(minkowskiCombine(k0, k1, t)));
        const double rhs = (1 - t) * std::sqrt(area(k0)) + t * std::sqrt(area(k1));
        CHECK(lhs >= rhs - 1e-9);
    }
}

TEST_CASE("radial interpolation and rescaling") {
    std::mt19937_64 rng(12);
    const RadialDomain d0 = randomDomain(rng);
    const RadialDomain d1 = randomDomain(rng);
    const RadialDomain left = radialInterpolate(d0, d1, 0.0);
    CHECK((left.samples - d0.samples).cwiseAbs().maxCoeff() < 1e-14);
    const RadialDomain mid = radialInterpolate(d0, d1, 0.5);
    CHECK(mid.samples[7] == doctest::Approx(0.5 * (d0.samples[7] + d1.samples[7])).epsilon(1e-13));

    const RadialDomain scaled = rescaleToArea(d0, kPi);
    CHECK(area(scaled) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK_THROWS_AS(rescaleToArea(d0, -1.0), InvalidInput);
}

TEST_CASE("support to radial graph conversion") {
    // ellipse: eta(phi) = ab / sqrt(b^2 cos^2 + a^2 sin^2)
    const double a = 2.0, b = 1.0;
    const RadialDomain r = supportToRadial(makeEllipseBody(a, b), 127);
    for (int i = 0; i < r.sampleCount(); i += 7) {
        const double phi = thetaAt(i, r.sampleCount());
        const double want = a * b / std::sqrt(b * b * std::cos(phi) * std::cos(phi) + a * a * std::sin(phi) * std::sin(phi));
        CHECK(r.samples[i] == doctest::Approx(want).epsilon(5e-4));
    }

    // square: radial graph 1/max(|cos|,|sin|) away from corners; corners to O(1/N)
    const RadialDomain sq = supportToRadial(makeSquare(1.0), 127);
    CHECK(sq.eta(0.0) == doctest::Approx(1.0).epsilon(2e-2));
    const int n = sq.sampleCount();
    double worst_edge = 0.0;
    for (int i = 0; i < n; ++i) {
        const double phi = thetaAt(i, n);
        const double want = 1.0 / std::max(std::abs(std::cos(phi)), std::abs(std::sin(phi)));
        const double err = std::abs(sq.samples[i] - want);
        // skip the 4 corner neighborhoods where the Fourier projection smooths the kink
        const double corner_gap = std::abs(std::remainder(phi - kPi / 4, kPi / 2));
        if (corner_gap > 0.15) worst_edge = std::max(worst_edge, err);
    }
    CHECK(worst_edge < 2e-2);

    // area of the reconstruction matches the body
    CHECK(area(sq) == doctest::Approx(4.0).epsilon(2e-2));

    // origin outside -> rejected
    const ConvexBody off = polygonToSupport({{2.0, 0.0}, {3.0, 0.0}, {2.5, 1.0}});
    CHECK_THROWS_AS(supportToRadial(off, 64), OriginNotInterior);
}

TEST_CASE("steiner point and recentering") {
    std::vector<Eigen::Vector2d> tri = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<Eigen::Vector2d> shifted;
    const Eigen::Vector2d t(0.3, -0.2);
    for (const auto& p : tri) shifted.push_back(p + t);
    const Eigen::Vector2d s0 = steinerPoint(polygonToSupport(tri));
    const Eigen::Vector2d s1 = steinerPoint(polygonToSupport(shifted));
    CHECK((s1 - s0 - t).norm() < 1e-12);

    const ConvexBody rec = recentered(polygonToSupport(shifted));
    CHECK(steinerPoint(rec).norm() < 1e-12);
}

TEST_CASE("diameter") {
    CHECK(diameter(makeDisk(1.3)) == doctest::Approx(2.6));
    CHECK(diameter(makeSquare(1.0)) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("admissibility reports the binding constraint") {
    const AdmissibilityConfig cfg;
    CHECK(isAdmissible(makeDisk(1.0), cfg).admissible);

    // needle: min radius below the floor
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * kDefaultModes + 1);
    c[0] = 0.6;
    c[2] = 0.45;  // eta(pi/2) = 0.15
    const auto needle = isAdmissible(RadialDomain::fromFourier(c, kDefaultSamples), cfg);
    CHECK_FALSE(needle.admissible);
    CHECK(needle.binding == "inradius");

    const auto big = isAdmissible(makeDisk(3.9), cfg);
    CHECK_FALSE(big.admissible);
    CHECK(big.binding == "volume");

    AdmissibilityConfig loose = cfg;
    loose.volume_cap = 1e9;
    const auto out = isAdmissible(makeDisk(4.2), loose);
    CHECK_FALSE(out.admissible);
    CHECK(out.binding == "containment");

    Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * kDefaultModes + 1);
    w[0] = 1.0;
    w[30] = 0.1;  // second difference ~ 0.1 * 900
    const auto wiggly = isAdmissible(RadialDomain::fromFourier(w, kDefaultSamples), cfg);
    CHECK_FALSE(wiggly.admissible);
    CHECK(wiggly.binding == "smoothness");
}

TEST_CASE("metric: sobolev radial closed form") {
    // difference eps*cos(k theta) has norm eps*sqrt(pi(1+k^2))
    const RadialDomain d0 = makeDisk(1.0);
    const RadialDomain d1 = makeFlower(1.0, 0.01, 5);
    const double want = 0.01 * std::sqrt(kPi * 26.0);
    CHECK(distance(d0, d1, MetricKind::sobolevRadial()) == doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS(distance(Shape(d0), Shape(makeSquare(1.0)), MetricKind::sobolevRadial()), MetricMismatch);
}

TEST_CASE("metric: lp support closed forms") {
    const ConvexBody b1 = makeEllipseBody(1.0, 1.0);
    const ConvexBody b2 = makeEllipseBody(1.5, 1.5);
    auto inf = MetricKind::lpSupport(std::numeric_limits<double>::infinity());
    CHECK(distance(b1, b2, inf) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(distance(b1, b2, MetricKind::lpSupport(2.0)) == doctest::Approx(0.5 * std::sqrt(kTwoPi)).epsilon(1e-12));
    CHECK_THROWS_AS(distance(Shape(b1), Shape(makeDisk(1.0)), MetricKind::lpSupport(2.0)), MetricMismatch);
}

TEST_CASE("metric: characteristic-function distance") {
    // nested disks: area difference
    CHECK(distance(makeDisk(1.0), makeDisk(1.3), MetricKind::charFn()) ==
          doctest::Approx(kPi * 0.69).epsilon(1e-10));

    // crossing graphs: eta_b = 1 + 0.3 cos(theta) vs 1; closed form via |eta^2 - 1|/2
    const RadialDomain d1 = makeFlower(1.0, 0.3, 1);
    double want = 0.0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
        const double th = kTwoPi * (i + 0.5) / m;
        const double e = 1.0 + 0.3 * std::cos(th);
        want += 0.5 * std::abs(e * e - 1.0) * (kTwoPi / m);
    }
    CHECK(distance(makeDisk(1.0), d1, MetricKind::charFn()) == doctest::Approx(want).epsilon(1e-5));

    // mixed representations share the radial evaluation
    const Shape da = makeDisk(1.0);
    const Shape kb = makeEllipseBody(1.3, 1.3);
    CHECK(distance(da, kb, MetricKind::charFn()) == doctest::Approx(kPi * 0.69).epsilon(5e-3));
}

TEST_CASE("metric: hausdorff between compact sets") {
    // convex fast path: sup-norm of support difference
    CHECK(distance(makeEllipseBody(1, 1), makeEllipseBody(2, 1), MetricKind::hausdorff()) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // radial pair: sampled
    CHECK(distance(makeDisk(1.0), makeDisk(1.25), MetricKind::hausdorff()) ==
          doctest::Approx(0.25).epsilon(1e-3));

    // interior maximizer: big disk vs thin ellipse needs inner samples
    const double d = distance(makeDisk(1.0), Shape(makeEllipseBody(1.0, 0.05)), MetricKind::hausdorff());
    CHECK(d == doctest::Approx(0.95).epsilon(2e-2));
}

TEST_CASE("metric: hausdorff between complements in a container") {
    const auto m = MetricKind::hausdorffOpen(3.0);
    CHECK(distance(makeDisk(1.0), makeDisk(1.0), m) == doctest::Approx(0.0));
    // nested disks: deepest uncovered point sits on the inner boundary
    CHECK(distance(makeDisk(1.0), makeDisk(2.0), m) == doctest::Approx(1.0).epsilon(2e-2));
    CHECK_THROWS_AS(distance(Shape(makeDisk(1.0)), Shape(makeDisk(2.0)), MetricKind::hausdorffOpen(1.5)), InvalidInput);
    CHECK_THROWS_AS(distance(Shape(makeDisk(1.0)), Shape(makeDisk(1.2)), MetricKind::hausdorffOpen(0.0)), MetricMismatch);
}

TEST_CASE("metric axioms on random triples") {
    std::mt19937_64 rng(2026);
    for (int rep = 0; rep < 5; ++rep) {
        const Shape a = randomDomain(rng);
        const Shape b = randomDomain(rng);
        const Shape c = randomDomain(rng);
        for (const auto& mk : {MetricKind::charFn(), MetricKind::sobolevRadial()}) {
            const double ab = distance(a, b, mk), ba = distance(b, a, mk);
            const double bc = distance(b, c, mk), ac = distance(a, c, mk);
            CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
            CHECK(ac <= ab + bc + 1e-9 * (1.0 + ac));
            CHECK(distance(a, a, mk) == doctest::Approx(0.0));
        }
        // sampled hausdorff: axioms hold up to the sampling resolution
        const auto mh = MetricKind::hausdorff();
        const double ab = distance(a, b, mh), ba = distance(b, a, mh);
        const double bc = distance(b, c, mh), ac = distance(a, c, mh);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ac <= ab + bc + 2e-2 * (1.0 + ac));
    }
    for (int rep = 0; rep < 5; ++rep) {
        const Shape a = randomBody(rng);
        const Shape b = randomBody(rng);
        const Shape c = randomBody(rng);
        const auto mk = MetricKind::lpSupport(2.0);
        const double ab = distance(a, b, mk), ba = distance(b, a, mk);
        const double bc = distance(b, c, mk), ac = distance(a, c, mk);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ac <= ab + bc + 1e-9 * (1.0 + ac));
    }
}
