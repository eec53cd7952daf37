#include "shapeflow/fourier.hpp"

#include <cmath>

#include "shapeflow/errors.hpp"

namespace shapeflow {

int fourierModes(const Eigen::VectorXd& coeffs) {
    const auto n = coeffs.size();
    if (n < 1 || n % 2 == 0) throw InvalidInput("fourier coefficient vector must have odd size 2K+1");
    return static_cast<int>((n - 1) / 2);
}

double fourierEval(const Eigen::VectorXd& coeffs, double theta) {
    const int K = fourierModes(coeffs);
    double f = coeffs[0];
    for (int k = 1; k <= K; ++k) f += coeffs[k] * std::cos(k * theta) + coeffs[K + k] * std::sin(k * theta);
    return f;
}

double fourierDeriv(const Eigen::VectorXd& coeffs, double theta, int order) {
    if (order < 0) throw InvalidInput("derivative order must be >= 0");
    if (order == 0) return fourierEval(coeffs, theta);
    const int K = fourierModes(coeffs);
    double f = 0.0;
    for (int k = 1; k <= K; ++k) {
        // d/dtheta rotates (cos, sin) by pi/2 and scales by k
        const double kp = std::pow(static_cast<double>(k), order);
        const double phase = order * 1.5707963267948966192313216916398;
        f += kp * (coeffs[k] * std::cos(k * theta + phase) + coeffs[K + k] * std::sin(k * theta + phase));
    }
    return f;
}

Eigen::VectorXd fourierSynthesize(const Eigen::VectorXd& coeffs, int n_samples) {
    if (n_samples < 1) throw InvalidInput("n_samples must be positive");
    const int K = fourierModes(coeffs);
    Eigen::VectorXd out(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double th = thetaAt(i, n_samples);
        double f = coeffs[0];
        for (int k = 1; k <= K; ++k) f += coeffs[k] * std::cos(k * th) + coeffs[K + k] * std::sin(k * th);
        out[i] = f;
    }
    return out;
}

Eigen::VectorXd fourierDerivCoeffs(const Eigen::VectorXd& coeffs) {
    const int K = fourierModes(coeffs);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(coeffs.size());
    for (int k = 1; k <= K; ++k) {
        d[k] = k * coeffs[K + k];       // (a_k cos)' contributes -k a_k sin; (b_k sin)' -> k b_k cos
        d[K + k] = -k * coeffs[k];
    }
    return d;
}

Eigen::VectorXd fourierAnalyze(const Eigen::VectorXd& samples, int modes) {
    const int n = static_cast<int>(samples.size());
    if (n < 2) throw InvalidInput("need at least two samples");
    if (modes < 0 || 2 * modes >= n) throw InvalidInput("modes must satisfy 0 <= 2K < n_samples");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * modes + 1);
    c[0] = samples.mean();
    for (int k = 1; k <= modes; ++k) {
        double ak = 0.0, bk = 0.0;
        for (int i = 0; i < n; ++i) {
            const double th = thetaAt(i, n);
            ak += samples[i] * std::cos(k * th);
            bk += samples[i] * std::sin(k * th);
        }
        c[k] = 2.0 * ak / n;
        c[modes + k] = 2.0 * bk / n;
    }
    return c;
}

Eigen::VectorXd spectralDerivative(const Eigen::VectorXd& samples, int order) {
    const int n = static_cast<int>(samples.size());
    if (n < 4) throw InvalidInput("need at least four samples");
    const int K = (n - 1) / 2;  // drops Nyquist for even n
    Eigen::VectorXd c = fourierAnalyze(samples, K);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = fourierDeriv(c, thetaAt(i, n), order);
    return out;
}

}  // namespace shapeflow
