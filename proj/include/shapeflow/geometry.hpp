#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shapeflow/fourier.hpp"

namespace shapeflow {

constexpr int kDefaultSamples = 256;
constexpr int kDefaultModes = 32;

// Star-shaped domain about the origin, boundary r = eta(theta) > 0.
// Invariant: samples are the exact synthesis of the stored Fourier coefficients
// at n uniform angles, and min(samples) > 0.
struct RadialDomain {
    Eigen::VectorXd fourier;  // (a0, a1..aK, b1..bK)
    Eigen::VectorXd samples;  // eta(2*pi*i/N), i = 0..N-1

    static RadialDomain fromFourier(const Eigen::VectorXd& coeffs, int n_samples = kDefaultSamples);
    static RadialDomain fromSamples(const Eigen::VectorXd& samples, int modes = kDefaultModes);

    int modes() const { return static_cast<int>((fourier.size() - 1) / 2); }
    int sampleCount() const { return static_cast<int>(samples.size()); }

    double eta(double theta) const { return fourierEval(fourier, theta); }
    double etaDeriv(double theta, int order = 1) const { return fourierDeriv(fourier, theta, order); }

    double minRadius() const { return samples.minCoeff(); }
    double maxRadius() const { return samples.maxCoeff(); }
    // Discrete C^2 surrogate: max |second central difference| / dtheta^2 of the samples.
    double maxSecondDifference() const;
};

// Convex body given by support function samples rho(2*pi*i/N) on an even grid.
// Invariant: rho_{i-1} + rho_{i+1} >= 2 rho_i cos(2*pi/N) (discrete sublinearity),
// up to a relative slack of 1e-9.
struct ConvexBody {
    Eigen::VectorXd support;

    static ConvexBody fromSupportSamples(const Eigen::VectorXd& rho);
    int sampleCount() const { return static_cast<int>(support.size()); }
    // Minimum slack of the discrete convexity certificate (negative = violated).
    double convexityMargin() const;
};

using Shape = std::variant<RadialDomain, ConvexBody>;

enum class MetricTag {
    HausdorffCompact,  // d^H between the closed sets
    HausdorffOpen,     // d^H between the complements within a disk container
    Char,              // L1 distance of characteristic functions (symmetric difference area)
    LpSupport,         // L^p distance of support functions (convex bodies only)
    SobolevRadial      // W^{1,2}(S^1) distance of radial graphs (radial domains only)
};

struct MetricKind {
    MetricTag tag = MetricTag::Char;
    double p = 2.0;                  // LpSupport exponent, p in [1, inf]
    double container_radius = 0.0;   // required by HausdorffOpen; Char fallback rasterizer

    static MetricKind hausdorff() { return {MetricTag::HausdorffCompact, 2.0, 0.0}; }
    static MetricKind hausdorffOpen(double container) { return {MetricTag::HausdorffOpen, 2.0, container}; }
    static MetricKind charFn(double container = 0.0) { return {MetricTag::Char, 2.0, container}; }
    static MetricKind lpSupport(double p) { return {MetricTag::LpSupport, p, 0.0}; }
    static MetricKind sobolevRadial() { return {MetricTag::SobolevRadial, 2.0, 0.0}; }
};

struct AdmissibilityConfig {
    double inradius_min = 0.2;        // eta (or rho) >= this
    double second_diff_max = 60.0;    // cap on RadialDomain::maxSecondDifference
    double volume_cap = 40.0;         // area <= this
    double container_radius = 4.0;    // shape contained in the origin-centered disk
};

struct AdmissibilityReport {
    bool admissible = true;
    std::string binding;  // first violated constraint: "", "inradius", "smoothness", "volume", "containment", "convexity"
    double min_radius = 0.0;
    double max_radius = 0.0;
    double second_diff = 0.0;
    double area = 0.0;
};

// --- constructors / combinators ----------------------------------------------

// Support samples of the convex hull of a point set (>= 1 point; hull taken
// implicitly by maximizing over all points).
ConvexBody polygonToSupport(const std::vector<Eigen::Vector2d>& vertices, int n_samples = kDefaultSamples);

// (1-t) K0 + t K1 in the Minkowski sense; t in [0,1], matching sample counts.
ConvexBody minkowskiCombine(const ConvexBody& k0, const ConvexBody& k1, double t);

// Pointwise radial interpolation eta_t = (1-t) eta_0 + t eta_1.
RadialDomain radialInterpolate(const RadialDomain& d0, const RadialDomain& d1, double t);

RadialDomain rescaleToArea(const RadialDomain& d, double target_area);

// Radial graph of a convex body with the origin in its interior (boundary traced
// via x(theta) = rho u + rho' u_perp, then resampled along rays from the origin).
RadialDomain supportToRadial(const ConvexBody& body, int modes, int n_samples = kDefaultSamples);

// --- measurements -------------------------------------------------------------

double area(const RadialDomain& d);
double area(const ConvexBody& k);
double area(const Shape& s);

double perimeter(const RadialDomain& d);
double perimeter(const ConvexBody& k);
double perimeter(const Shape& s);

// Signed curvature of the radial boundary at each sample angle (positive for convex arcs).
Eigen::VectorXd boundaryCurvature(const RadialDomain& d);

Eigen::Vector2d steinerPoint(const ConvexBody& k);
ConvexBody recentered(const ConvexBody& k);  // Steiner point moved to the origin

double diameter(const RadialDomain& d);  // bounding value 2*maxRadius
double diameter(const ConvexBody& k);    // max width, exact on the sample grid
double diameter(const Shape& s);

AdmissibilityReport isAdmissible(const Shape& s, const AdmissibilityConfig& cfg);

// --- metric -------------------------------------------------------------------

double distance(const Shape& a, const Shape& b, const MetricKind& metric);

// Dense boundary polyline (m points) used by the sampling-based metrics.
std::vector<Eigen::Vector2d> boundaryPoints(const Shape& s, int m);
bool insideShape(const Shape& s, const Eigen::Vector2d& p, double tol = 0.0);

}  // namespace shapeflow
