#pragma once

#include <Eigen/Dense>

namespace shapeflow {

// Real trigonometric series stored as c = (a0, a1..aK, b1..bK), size 2K+1:
//   f(theta) = a0 + sum_{k=1}^{K} a_k cos(k theta) + b_k sin(k theta)

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double thetaAt(int i, int n) { return kTwoPi * static_cast<double>(i) / n; }

// Number of modes K encoded by a coefficient vector; throws InvalidInput on even size.
int fourierModes(const Eigen::VectorXd& coeffs);

double fourierEval(const Eigen::VectorXd& coeffs, double theta);

// order-th derivative at theta (order >= 0)
double fourierDeriv(const Eigen::VectorXd& coeffs, double theta, int order);

// Samples f at n uniform angles 2*pi*i/n, i = 0..n-1.
Eigen::VectorXd fourierSynthesize(const Eigen::VectorXd& coeffs, int n_samples);

// Derivative coefficient vector (same K).
Eigen::VectorXd fourierDerivCoeffs(const Eigen::VectorXd& coeffs);

// Projects n uniform samples onto modes 0..K. Exact inverse of synthesize when
// the signal is band-limited below the Nyquist mode (2K < n).
Eigen::VectorXd fourierAnalyze(const Eigen::VectorXd& samples, int modes);

// Derivative of the trigonometric interpolant, evaluated on the sample grid.
// The Nyquist mode (present only for even n) is dropped; it does not affect
// odd-order derivatives at the grid points.
Eigen::VectorXd spectralDerivative(const Eigen::VectorXd& samples, int order = 1);

}  // namespace shapeflow
