#include "shapeflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double pointSegmentDistance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) return (p - a).norm();
    const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + s * ab)).norm();
}

double distanceToPolyline(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly) {
    double best = std::numeric_limits<double>::infinity();
    const size_t m = poly.size();
    for (size_t i = 0; i < m; ++i) {
        best = std::min(best, pointSegmentDistance(p, poly[i], poly[(i + 1) % m]));
    }
    return best;
}

}  // namespace

// --- RadialDomain ---------------------------------------------------------------

RadialDomain RadialDomain::fromFourier(const Eigen::VectorXd& coeffs, int n_samples) {
    const int K = fourierModes(coeffs);
    if (n_samples < 8) throw InvalidInput("radial domain needs at least 8 samples");
    if (2 * K >= n_samples) throw InvalidInput("sample count must exceed twice the mode count");
    RadialDomain d;
    d.fourier = coeffs;
    d.samples = fourierSynthesize(coeffs, n_samples);
    if (d.samples.minCoeff() <= 0.0) throw InvalidInput("radial graph must be strictly positive");
    return d;
}

RadialDomain RadialDomain::fromSamples(const Eigen::VectorXd& samples, int modes) {
    Eigen::VectorXd c = fourierAnalyze(samples, modes);
    return fromFourier(c, static_cast<int>(samples.size()));
}

double RadialDomain::maxSecondDifference() const {
    const int n = sampleCount();
    const double dth = kTwoPi / n;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dd = samples[(i + 1) % n] - 2.0 * samples[i] + samples[(i + n - 1) % n];
        worst = std::max(worst, std::abs(dd) / (dth * dth));
    }
    return worst;
}

// --- ConvexBody -----------------------------------------------------------------

ConvexBody ConvexBody::fromSupportSamples(const Eigen::VectorXd& rho) {
    const int n = static_cast<int>(rho.size());
    if (n < 8 || n % 2 != 0) throw InvalidInput("support function needs an even sample count >= 8");
    ConvexBody k;
    k.support = rho;
    const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
    if (k.convexityMargin() < -1e-9 * scale) throw InvalidInput("support samples violate discrete convexity");
    return k;
}

double ConvexBody::convexityMargin() const {
    const int n = sampleCount();
    const double c = std::cos(kTwoPi / n);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        worst = std::min(worst, support[(i + n - 1) % n] + support[(i + 1) % n] - 2.0 * c * support[i]);
    }
    return worst;
}

// --- constructors / combinators ---------------------------------------------------

ConvexBody polygonToSupport(const std::vector<Eigen::Vector2d>& vertices, int n_samples) {
    if (vertices.empty()) throw InvalidInput("polygonToSupport: empty vertex list");
    Eigen::VectorXd rho(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double th = thetaAt(i, n_samples);
        const Eigen::Vector2d u(std::cos(th), std::sin(th));
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& v : vertices) best = std::max(best, v.dot(u));
        rho[i] = best;
    }
    return ConvexBody::fromSupportSamples(rho);
}

ConvexBody minkowskiCombine(const ConvexBody& k0, const ConvexBody& k1, double t) {
    if (k0.sampleCount() != k1.sampleCount()) throw InvalidInput("minkowskiCombine: sample counts differ");
    if (t < 0.0 || t > 1.0) throw InvalidInput("minkowskiCombine: t must lie in [0,1]");
    return ConvexBody::fromSupportSamples((1.0 - t) * k0.support + t * k1.support);
}

RadialDomain radialInterpolate(const RadialDomain& d0, const RadialDomain& d1, double t) {
    if (d0.sampleCount() != d1.sampleCount()) throw InvalidInput("radialInterpolate: sample counts differ");
    if (t < 0.0 || t > 1.0) throw InvalidInput("radialInterpolate: t must lie in [0,1]");
    const int K = std::max(d0.modes(), d1.modes());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * K + 1);
    auto accumulate = [&](const Eigen::VectorXd& src, double w) {
        const int Ks = static_cast<int>((src.size() - 1) / 2);
        c[0] += w * src[0];
        for (int k = 1; k <= Ks; ++k) {
            c[k] += w * src[k];
            c[K + k] += w * src[Ks + k];
        }
    };
    accumulate(d0.fourier, 1.0 - t);
    accumulate(d1.fourier, t);
    return RadialDomain::fromFourier(c, d0.sampleCount());
}

RadialDomain rescaleToArea(const RadialDomain& d, double target_area) {
    if (target_area <= 0.0) throw InvalidInput("rescaleToArea: target area must be positive");
    const double s = std::sqrt(target_area / area(d));
    return RadialDomain::fromFourier(s * d.fourier, d.sampleCount());
}

RadialDomain supportToRadial(const ConvexBody& body, int modes, int n_samples) {
    const int n = body.sampleCount();
    if (body.support.minCoeff() <= 0.0) throw OriginNotInterior("supportToRadial: support function must be strictly positive");

    // Boundary polyline x(theta) = rho u + rho' u_perp with central-difference rho'
    // (stays on the correct facet at polytope corners, unlike the spectral derivative).
    std::vector<Eigen::Vector2d> poly(n);
    const double dth = kTwoPi / n;
    for (int i = 0; i < n; ++i) {
        const double th = thetaAt(i, n);
        const double dp = (body.support[(i + 1) % n] - body.support[(i + n - 1) % n]) / (2.0 * dth);
        poly[i] = body.support[i] * Eigen::Vector2d(std::cos(th), std::sin(th)) +
                  dp * Eigen::Vector2d(-std::sin(th), std::cos(th));
    }

    Eigen::VectorXd eta(n_samples);
    for (int j = 0; j < n_samples; ++j) {
        const double phi = thetaAt(j, n_samples);
        const Eigen::Vector2d dir(std::cos(phi), std::sin(phi));
        double best = 0.0;
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector2d& p1 = poly[i];
            const Eigen::Vector2d seg = poly[(i + 1) % n] - p1;
            const double denom = cross2(dir, seg);
            if (std::abs(denom) < 1e-300) continue;
            const double s = -cross2(dir, p1) / denom;  // solves p1 + s*seg = r*dir
            if (s < -1e-12 || s > 1.0 + 1e-12) continue;
            const double r = (p1 + s * seg).dot(dir);
            if (r > best) best = r;
        }
        if (best <= 0.0) throw OriginNotInterior("supportToRadial: ray missed boundary polyline");
        eta[j] = best;
    }
    return RadialDomain::fromSamples(eta, modes);
}

// --- measurements ----------------------------------------------------------------

double area(const RadialDomain& d) {
    const double dth = kTwoPi / d.sampleCount();
    return 0.5 * dth * d.samples.squaredNorm();
}

double area(const ConvexBody& k) {
    const Eigen::VectorXd dp = spectralDerivative(k.support);
    const double dth = kTwoPi / k.sampleCount();
    return 0.5 * dth * (k.support.squaredNorm() - dp.squaredNorm());
}

double area(const Shape& s) {
    return std::visit([](const auto& v) { return area(v); }, s);
}

double perimeter(const RadialDomain& d) {
    const int n = d.sampleCount();
    const Eigen::VectorXd dp = fourierSynthesize(fourierDerivCoeffs(d.fourier), n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::sqrt(d.samples[i] * d.samples[i] + dp[i] * dp[i]);
    return acc * kTwoPi / n;
}

double perimeter(const ConvexBody& k) {
    // Cauchy formula: L = integral of the support function over S^1.
    return k.support.sum() * kTwoPi / k.sampleCount();
}

double perimeter(const Shape& s) {
    return std::visit([](const auto& v) { return perimeter(v); }, s);
}

Eigen::VectorXd boundaryCurvature(const RadialDomain& d) {
    const int n = d.sampleCount();
    const Eigen::VectorXd d1c = fourierDerivCoeffs(d.fourier);
    const Eigen::VectorXd dp = fourierSynthesize(d1c, n);
    const Eigen::VectorXd dpp = fourierSynthesize(fourierDerivCoeffs(d1c), n);
    Eigen::VectorXd kappa(n);
    for (int i = 0; i < n; ++i) {
        const double e = d.samples[i], ep = dp[i], epp = dpp[i];
        const double g = e * e + ep * ep;
        kappa[i] = (e * e + 2.0 * ep * ep - e * epp) / (g * std::sqrt(g));
    }
    return kappa;
}

Eigen::Vector2d steinerPoint(const ConvexBody& k) {
    const int n = k.sampleCount();
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = thetaAt(i, n);
        sx += k.support[i] * std::cos(th);
        sy += k.support[i] * std::sin(th);
    }
    return {2.0 * sx / n, 2.0 * sy / n};
}

ConvexBody recentered(const ConvexBody& k) {
    const Eigen::Vector2d s = steinerPoint(k);
    const int n = k.sampleCount();
    Eigen::VectorXd rho = k.support;
    for (int i = 0; i < n; ++i) {
        const double th = thetaAt(i, n);
        rho[i] -= s.x() * std::cos(th) + s.y() * std::sin(th);
    }
    return ConvexBody::fromSupportSamples(rho);
}

double diameter(const RadialDomain& d) { return 2.0 * d.maxRadius(); }

double diameter(const ConvexBody& k) {
    const int n = k.sampleCount();
    double w = 0.0;
    for (int i = 0; i < n / 2; ++i) w = std::max(w, k.support[i] + k.support[i + n / 2]);
    return w;
}

double diameter(const Shape& s) {
    return std::visit([](const auto& v) { return diameter(v); }, s);
}

AdmissibilityReport isAdmissible(const Shape& s, const AdmissibilityConfig& cfg) {
    AdmissibilityReport rep;
    rep.area = area(s);
    if (const auto* d = std::get_if<RadialDomain>(&s)) {
        rep.min_radius = d->minRadius();
        rep.max_radius = d->maxRadius();
        rep.second_diff = d->maxSecondDifference();
        if (rep.min_radius < cfg.inradius_min) rep.binding = "inradius";
        else if (rep.second_diff > cfg.second_diff_max) rep.binding = "smoothness";
        else if (rep.area > cfg.volume_cap) rep.binding = "volume";
        else if (rep.max_radius > cfg.container_radius) rep.binding = "containment";
    } else {
        const auto& k = std::get<ConvexBody>(s);
        rep.min_radius = k.support.minCoeff();
        rep.max_radius = k.support.maxCoeff();
        rep.second_diff = 0.0;
        const double scale = std::max(1.0, k.support.cwiseAbs().maxCoeff());
        if (k.convexityMargin() < -1e-9 * scale) rep.binding = "convexity";
        else if (rep.min_radius < cfg.inradius_min) rep.binding = "inradius";
        else if (rep.area > cfg.volume_cap) rep.binding = "volume";
        else if (rep.max_radius > cfg.container_radius) rep.binding = "containment";
    }
    rep.admissible = rep.binding.empty();
    return rep;
}

// --- metric ------------------------------------------------------------------------

std::vector<Eigen::Vector2d> boundaryPoints(const Shape& s, int m) {
    std::vector<Eigen::Vector2d> pts(m);
    if (const auto* d = std::get_if<RadialDomain>(&s)) {
        for (int j = 0; j < m; ++j) {
            const double phi = thetaAt(j, m);
            pts[j] = d->eta(phi) * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        }
    } else {
        const auto& k = std::get<ConvexBody>(s);
        const int n = k.sampleCount();
        const Eigen::VectorXd c = fourierAnalyze(k.support, (n - 1) / 2);
        for (int j = 0; j < m; ++j) {
            const double th = thetaAt(j, m);
            const double rho = fourierEval(c, th);
            const double dp = fourierDeriv(c, th, 1);
            pts[j] = rho * Eigen::Vector2d(std::cos(th), std::sin(th)) +
                     dp * Eigen::Vector2d(-std::sin(th), std::cos(th));
        }
    }
    return pts;
}

bool insideShape(const Shape& s, const Eigen::Vector2d& p, double tol) {
    if (const auto* d = std::get_if<RadialDomain>(&s)) {
        const double r = p.norm();
        if (r == 0.0) return true;
        return r <= d->eta(std::atan2(p.y(), p.x())) + tol;
    }
    const auto& k = std::get<ConvexBody>(s);
    const int n = k.sampleCount();
    for (int i = 0; i < n; ++i) {
        const double th = thetaAt(i, n);
        if (p.x() * std::cos(th) + p.y() * std::sin(th) > k.support[i] + tol) return false;
    }
    return true;
}

namespace {

// Interior sample cloud: polar grid for radial domains, scaled-boundary grid for convex
// bodies (origin need not be interior for convex; use the Steiner point as the hub).
std::vector<Eigen::Vector2d> interiorPoints(const Shape& s, int n_rings, int n_angles) {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(static_cast<size_t>(n_rings) * n_angles);
    Eigen::Vector2d hub = Eigen::Vector2d::Zero();
    std::vector<Eigen::Vector2d> rim;
    if (const auto* d = std::get_if<RadialDomain>(&s)) {
        rim.resize(n_angles);
        for (int i = 0; i < n_angles; ++i) {
            const double phi = thetaAt(i, n_angles);
            rim[i] = d->eta(phi) * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        }
    } else {
        const auto& k = std::get<ConvexBody>(s);
        hub = steinerPoint(k);
        rim = boundaryPoints(s, n_angles);
    }
    for (int r = 0; r < n_rings; ++r) {
        const double f = (r + 0.5) / n_rings;
        for (int i = 0; i < n_angles; ++i) pts.push_back(hub + f * (rim[i] - hub));
    }
    return pts;
}

double directedHausdorff(const std::vector<Eigen::Vector2d>& from, const Shape& target,
                         const std::vector<Eigen::Vector2d>& target_boundary) {
    double worst = 0.0;
    for (const auto& p : from) {
        if (insideShape(target, p)) continue;
        worst = std::max(worst, distanceToPolyline(p, target_boundary));
    }
    return worst;
}

double hausdorffCompact(const Shape& a, const Shape& b) {
    // Convex pair: d^H equals the sup-norm gap of the support functions.
    const auto* ka = std::get_if<ConvexBody>(&a);
    const auto* kb = std::get_if<ConvexBody>(&b);
    if (ka && kb && ka->sampleCount() == kb->sampleCount()) {
        return (ka->support - kb->support).cwiseAbs().maxCoeff();
    }
    const int m = 1024, rings = 24, ring_angles = 192;
    const auto ba = boundaryPoints(a, m);
    const auto bb = boundaryPoints(b, m);
    auto cloudA = interiorPoints(a, rings, ring_angles);
    cloudA.insert(cloudA.end(), ba.begin(), ba.end());
    auto cloudB = interiorPoints(b, rings, ring_angles);
    cloudB.insert(cloudB.end(), bb.begin(), bb.end());
    return std::max(directedHausdorff(cloudA, b, bb), directedHausdorff(cloudB, a, ba));
}

// d^H of the complements within the container disk D. Only points of the symmetric
// difference contribute; for x in B \ A the nearest point of D \ closure(B) sits just
// across the boundary of B, so the distance reduces to dist(x, boundary of B).
double hausdorffOpen(const Shape& a, const Shape& b, double container) {
    if (container <= 0.0) throw MetricMismatch("hausdorff-open metric needs a container radius");
    auto checkContained = [&](const Shape& s) {
        const double r = std::visit([](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, RadialDomain>) return v.maxRadius();
            else return v.support.maxCoeff();
        }, s);
        if (r >= container) throw InvalidInput("hausdorff-open: shape not strictly inside the container");
    };
    checkContained(a);
    checkContained(b);
    const int m = 1024, rings = 24, ring_angles = 192;
    const auto ba = boundaryPoints(a, m);
    const auto bb = boundaryPoints(b, m);

    auto directed = [&](const Shape& inner_of, const std::vector<Eigen::Vector2d>& inner_boundary,
                        const Shape& excluded, const std::vector<Eigen::Vector2d>& excluded_boundary) {
        // sup over x in D \ closure(excluded) of dist(x, D \ closure(inner_of)):
        // nonzero only on inner_of \ excluded.
        double worst = 0.0;
        auto cloud = interiorPoints(inner_of, rings, ring_angles);
        cloud.insert(cloud.end(), excluded_boundary.begin(), excluded_boundary.end());
        for (const auto& p : cloud) {
            if (insideShape(excluded, p, -1e-12)) continue;
            if (!insideShape(inner_of, p, 1e-12)) continue;
            worst = std::max(worst, distanceToPolyline(p, inner_boundary));
        }
        return worst;
    };
    return std::max(directed(b, bb, a, ba), directed(a, ba, b, bb));
}

// Radial function of a shape on the uniform m-grid. Both kinds are star-shaped
// about the origin (support samples are positive), so for a support-sampled body
// the exact radial function of the halfplane intersection applies.
Eigen::VectorXd radialFunctionOn(const Shape& s, int m) {
    Eigen::VectorXd r(m);
    if (const auto* d = std::get_if<RadialDomain>(&s)) {
        for (int i = 0; i < m; ++i) r[i] = d->eta(thetaAt(i, m));
        return r;
    }
    const auto& k = std::get<ConvexBody>(s);
    const int n = k.sampleCount();
    Eigen::VectorXd cn(n), sn(n);
    for (int j = 0; j < n; ++j) {
        const double th = thetaAt(j, n);
        cn[j] = std::cos(th);
        sn[j] = std::sin(th);
    }
    for (int i = 0; i < m; ++i) {
        const double phi = thetaAt(i, m);
        const double cp = std::cos(phi), sp = std::sin(phi);
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            const double proj = cp * cn[j] + sp * sn[j];
            if (proj > 1e-12) best = std::min(best, k.support[j] / proj);
        }
        r[i] = best;
    }
    return r;
}

double charDistance(const Shape& a, const Shape& b) {
    // Symmetric difference of star-shaped sets: (1/2) int |r_a^2 - r_b^2| dtheta.
    const int m = 2048;
    const Eigen::VectorXd ra = radialFunctionOn(a, m);
    const Eigen::VectorXd rb = radialFunctionOn(b, m);
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += std::abs(ra[i] * ra[i] - rb[i] * rb[i]);
    return 0.5 * acc * kTwoPi / m;
}

double lpSupport(const ConvexBody& a, const ConvexBody& b, double p) {
    if (a.sampleCount() != b.sampleCount()) throw InvalidInput("lp-support: sample counts differ");
    if (p < 1.0) throw InvalidInput("lp-support: p must be >= 1");
    const Eigen::VectorXd d = (a.support - b.support).cwiseAbs();
    if (std::isinf(p)) return d.maxCoeff();
    const double dth = kTwoPi / a.sampleCount();
    double acc = 0.0;
    for (int i = 0; i < d.size(); ++i) acc += std::pow(d[i], p);
    return std::pow(acc * dth, 1.0 / p);
}

double sobolevRadial(const RadialDomain& a, const RadialDomain& b) {
    const int K = std::max(a.modes(), b.modes());
    auto coeff = [&](const RadialDomain& d, int idx) -> double {
        const int Kd = d.modes();
        if (idx == 0) return d.fourier[0];
        const int k = (idx <= K) ? idx : idx - K;
        if (k > Kd) return 0.0;
        return (idx <= K) ? d.fourier[k] : d.fourier[Kd + k];
    };
    double acc = 2.0 * kPi * std::pow(coeff(a, 0) - coeff(b, 0), 2);
    for (int k = 1; k <= K; ++k) {
        const double dak = coeff(a, k) - coeff(b, k);
        const double dbk = coeff(a, K + k) - coeff(b, K + k);
        acc += kPi * (1.0 + k * k) * (dak * dak + dbk * dbk);
    }
    return std::sqrt(acc);
}

}  // namespace

double distance(const Shape& a, const Shape& b, const MetricKind& metric) {
    switch (metric.tag) {
        case MetricTag::HausdorffCompact:
            return hausdorffCompact(a, b);
        case MetricTag::HausdorffOpen:
            return hausdorffOpen(a, b, metric.container_radius);
        case MetricTag::Char:
            return charDistance(a, b);
        case MetricTag::LpSupport: {
            const auto* ka = std::get_if<ConvexBody>(&a);
            const auto* kb = std::get_if<ConvexBody>(&b);
            if (!ka || !kb) throw MetricMismatch("lp-support metric applies to convex bodies only");
            return lpSupport(*ka, *kb, metric.p);
        }
        case MetricTag::SobolevRadial: {
            const auto* da = std::get_if<RadialDomain>(&a);
            const auto* db = std::get_if<RadialDomain>(&b);
            if (!da || !db) throw MetricMismatch("sobolev-radial metric applies to radial domains only");
            return sobolevRadial(*da, *db);
        }
    }
    throw InvalidInput("unknown metric tag");
}

}  // namespace shapeflow
