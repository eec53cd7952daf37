#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "shapeflow/geometry.hpp"

namespace testsupport {

using namespace shapeflow;

// Deterministic uniform double in [0,1): portable, unlike std::uniform_real_distribution.
inline double canonical(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline RadialDomain makeDisk(double r, int n = kDefaultSamples, int modes = kDefaultModes) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * modes + 1);
    c[0] = r;
    return RadialDomain::fromFourier(c, n);
}

inline RadialDomain makeFlower(double base, double amp, int k) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * kDefaultModes + 1);
    c[0] = base;
    c[k] = amp;
    return RadialDomain::fromFourier(c, kDefaultSamples);
}

inline ConvexBody makeSquare(double half) {
    return polygonToSupport({{-half, -half}, {half, -half}, {half, half}, {-half, half}});
}

inline ConvexBody makeEllipseBody(double a, double b, int n = kDefaultSamples) {
    Eigen::VectorXd rho(n);
    for (int i = 0; i < n; ++i) {
        const double th = thetaAt(i, n);
        rho[i] = std::sqrt(a * a * std::cos(th) * std::cos(th) + b * b * std::sin(th) * std::sin(th));
    }
    return ConvexBody::fromSupportSamples(rho);
}

inline RadialDomain makeEllipseRadial(double a, double b, int n = kDefaultSamples, int modes = kDefaultModes) {
    Eigen::VectorXd eta(n);
    for (int i = 0; i < n; ++i) {
        const double th = thetaAt(i, n);
        eta[i] = a * b / std::sqrt(b * b * std::cos(th) * std::cos(th) + a * a * std::sin(th) * std::sin(th));
    }
    return RadialDomain::fromSamples(eta, modes);
}

inline RadialDomain randomDomain(std::mt19937_64& rng, double amp = 0.2) {
    for (int attempt = 0; attempt < 50; ++attempt) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * kDefaultModes + 1);
        c[0] = 0.8 + 0.4 * canonical(rng);
        for (int k = 1; k <= 6; ++k) {
            c[k] = amp * (2.0 * canonical(rng) - 1.0) / (k * k);
            c[kDefaultModes + k] = amp * (2.0 * canonical(rng) - 1.0) / (k * k);
        }
        const Eigen::VectorXd s = fourierSynthesize(c, kDefaultSamples);
        if (s.minCoeff() > 0.25) return RadialDomain::fromFourier(c, kDefaultSamples);
        amp *= 0.7;
    }
    throw std::logic_error("random domain generation failed");
}

inline ConvexBody randomBody(std::mt19937_64& rng) {
    std::vector<Eigen::Vector2d> pts;
    const int m = 5 + static_cast<int>(canonical(rng) * 6);
    for (int i = 0; i < m; ++i) {
        const double r = 0.5 + 0.8 * canonical(rng);
        const double th = kTwoPi * canonical(rng);
        pts.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    return polygonToSupport(pts);
}

// Smooth low-mode boundary field, sup-normalized to ~1.
inline Eigen::VectorXd randomField(std::mt19937_64& rng, int n = kDefaultSamples) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int k = 0; k <= 5; ++k) {
        const double ck = 2.0 * canonical(rng) - 1.0;
        const double sk = 2.0 * canonical(rng) - 1.0;
        for (int i = 0; i < n; ++i) {
            const double th = thetaAt(i, n);
            g[i] += ck * std::cos(k * th) + (k > 0 ? sk * std::sin(k * th) : 0.0);
        }
    }
    return g / g.cwiseAbs().maxCoeff();
}

}  // namespace testsupport
