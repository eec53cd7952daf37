#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "shapeflow/fem.hpp"
#include "shapeflow/geometry.hpp"

namespace shapeflow {

enum class InnerSolver { NelderMead, GradientAssisted };

struct FlowConfig {
    double h = 0.05;                              // time step
    double T = 1.0;                               // horizon
    MetricKind metric = MetricKind::sobolevRadial();
    BoundaryCondition bc = BoundaryCondition::dirichlet();
    std::optional<double> volume_constraint;      // fixed area, enforced by projection
    InnerSolver inner_solver = InnerSolver::NelderMead;
    double inner_tol = 1e-10;
    int max_inner_evals = 220;
    std::uint64_t seed = 0;
    int flow_modes = 8;                           // Fourier order of the inner parameter vector
    double alpha = 0.0;                           // convexity modulus recorded for the checkers
    double mesh_target_factor = 0.04;             // flow mesh: target_h = factor * diameter
    AdmissibilityConfig admissibility;
};

// Throws ConfigError: h > 0, T >= h, Robin flows need beta > 0.
void validateConfig(const FlowConfig& cfg);

struct FlowTrajectory {
    std::vector<Shape> shapes;            // w(0..n)
    std::vector<double> phi_values;       // lambda(w(i)) at flow resolution, as used by the steps
    std::vector<double> step_distances;   // d(w(i), w(i+1)), size n
    std::vector<int> inner_eval_counts;   // objective evaluations per step
    std::vector<double> wall_times;       // seconds per step
    std::vector<std::uint8_t> stagnated;  // step emitted w(i+1) = w(i)
    double h = 0.0;

    int steps() const { return static_cast<int>(step_distances.size()); }
    // Piecewise-constant interpolant w(floor(t/h)), clamped to the last iterate.
    const Shape& at(double t) const;
};

// lambda_1(y) at the flow's mesh resolution; +infinity when y is inadmissible.
double phiValue(const Shape& y, const FlowConfig& cfg);

// phi(y) + d^2(x, y) / (2h); +infinity when y is inadmissible.
double phi(double h, const Shape& x, const Shape& y, const FlowConfig& cfg);

// One implicit step: approximately minimizes phi(cfg.h, x, .) over the Fourier
// parameter vector, projecting onto the volume constraint, with the guarantee
// that the result never ranks above x itself (stagnation returns x).
Shape eulerStep(const Shape& x, const FlowConfig& cfg);

FlowTrajectory runFlow(const Shape& u0, const FlowConfig& cfg);

struct GmmTable {
    std::vector<double> h_values;
    std::vector<double> sample_times;
    std::vector<std::array<int, 2>> pairs;  // index pairs into h_values
    Eigen::MatrixXd cross_distance;         // pairs x sample_times
};

// Empirical Cauchy table: distances between trajectories run at the steps in
// h_list (strictly decreasing), compared at multiples of the coarsest step.
GmmTable gmmDiagnostic(const Shape& u0, const FlowConfig& cfg, const std::vector<double>& h_list);

struct ContractionReport {
    std::vector<double> times;
    std::vector<double> distances;      // d(u(t), v(t))
    double initial_distance = 0.0;
    double max_margin = 0.0;            // max_t d(t) - e^{-alpha t} d(0)
    double tolerance = 0.0;
    bool pass = false;
};

ContractionReport contractionCheck(const Shape& u0, const Shape& v0, const FlowConfig& cfg,
                                   double alpha);

struct EviReport {
    std::vector<double> residuals;  // one per step
    double max_positive = 0.0;
    double phi_z = 0.0;
};

// Discrete evolution variational inequality residual against the test shape z:
//   r_i = [d^2(w(i+1),z) - d^2(w(i),z)]/(2h) + (alpha/2) d^2(w(i+1),z)
//         + phi(w(i+1)) - phi(z).
EviReport eviResidual(const FlowTrajectory& traj, const Shape& z, double alpha,
                      const FlowConfig& cfg);

struct AprioriRow {
    int n = 0;
    double lhs_sq = 0.0;   // d^2(reference(t), n-step iterate at t)
    double rhs = 0.0;      // (t/n) (phi(u0) - min_y phi-step value)
    double tolerance = 0.0;
    bool pass = false;
};

struct AprioriTable {
    std::vector<AprioriRow> rows;
    int reference_n = 0;
};

// A priori estimate: compares coarse n-step iterates at time t against the
// finest run in n_list, row-by-row against the one-step energy gap bound.
AprioriTable aprioriCheck(const Shape& u0, double t, const std::vector<int>& n_list,
                          const FlowConfig& cfg);

}  // namespace shapeflow
