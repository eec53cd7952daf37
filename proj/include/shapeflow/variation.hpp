#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "shapeflow/fem.hpp"
#include "shapeflow/geometry.hpp"

namespace shapeflow {

// Boundary perturbation x -> x + t v + (t^2/2) w, stored through its normal
// components sampled at the domain's angle grid. Only v . nu moves the shape;
// an optional tangential component is carried for norm bookkeeping.
struct PerturbationField {
    Eigen::VectorXd normal;             // (v . nu)(theta_i), one per domain sample
    Eigen::VectorXd tangential;         // (v . tau)(theta_i); empty means zero
    Eigen::VectorXd second_order;       // (w . nu)(theta_i); empty means zero

    static PerturbationField fromNormal(const Eigen::VectorXd& g);
    static PerturbationField fromNormal(const Eigen::VectorXd& g,
                                        const Eigen::VectorXd& w_normal);

    bool hasSecondOrder() const { return second_order.size() > 0; }
};

// || v ||_{W^{1,2}(boundary)}^2 of the vector field g nu + s tau, including the
// curvature coupling from differentiating the frame along the boundary.
double fieldNormW12(const RadialDomain& domain, const PerturbationField& field);

struct VariationOptions {
    double target_h = 0.0;   // 0 -> 0.025 * diameter(domain)
    int refinements = 1;     // uniform refinement passes after the base mesh
    int pinned_rings = 0;    // 0 -> derive from target_h; >0 forces the ring count
    double residual_tol = 1e-10;
    AdmissibilityConfig admissibility;  // guards finite-difference excursions
};

// Shape derivative of the first eigenvalue in direction v, from the boundary
// integral of the eigenfunction data (no volume remeshing). Dirichlet uses the
// normal-flux form; Robin evaluates the full boundary integrand using the
// boundary condition to split the gradient trace.
double firstVariation(const RadialDomain& domain, const BoundaryCondition& bc,
                      const PerturbationField& field,
                      const VariationOptions& opts = {});

// Per-boundary-node density of the same derivative against the normal
// displacement: lambda_dot[v] = sum_i density[i] * (v . nu)(boundary_theta[i]),
// quadrature weights included. `res` must be the eigenpair solved on `mesh`.
Eigen::VectorXd firstVariationDensity(const RadialDomain& domain, const BoundaryCondition& bc,
                                      const TriMesh& mesh, const EigenResult& res);

// Central finite differences of t -> lambda_1(Omega_t), Richardson-extrapolated
// over {delta, delta/2}. `delta` is the peak boundary displacement; the internal
// pseudo-time step is delta / max|normal realization|, so scaling the field
// rescales the step and reuses identical shape evaluations. order is 1 or 2.
// All evaluations share one pinned mesh resolution derived from `domain`.
double finiteDiffVariation(const RadialDomain& domain, const BoundaryCondition& bc,
                           const PerturbationField& field, double delta, int order,
                           const VariationOptions& opts = {});

double defaultFdStep(const RadialDomain& domain);  // 1e-2 * diameter

struct SecondVariationReport {
    std::vector<double> ratios;     // |second difference| / ||v||_{W^{1,2}}^2
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    bool bounded = false;           // max within 10x median over the sample
};

// Empirical boundedness of the second variation over (domain, field) pairs.
SecondVariationReport secondVariationBound(const std::vector<RadialDomain>& domains,
                                           const std::vector<PerturbationField>& fields,
                                           const BoundaryCondition& bc,
                                           const VariationOptions& opts = {});

struct ConvexityReport {
    Eigen::VectorXd t_grid;
    Eigen::VectorXd values;               // lambda along the interpolation path
    Eigen::VectorXd second_differences;   // interior uniform-grid second differences
    double distance_sq = 0.0;             // squared Sobolev path length
    double alpha_estimate = 0.0;          // min second difference / distance_sq
    bool chord_ok = false;                // chord bound with alpha_estimate holds
};

// Samples lambda_1 along the radial interpolation eta_t = (1-t) eta_0 + t eta_1
// and reports the strongest quadratic lower bound the data supports. Requires a
// Robin condition with beta > 0 and a uniform t grid containing 0 and 1.
ConvexityReport alphaConvexityCheck(const RadialDomain& eta0, const RadialDomain& eta1,
                                    const BoundaryCondition& bc,
                                    const Eigen::VectorXd& t_points,
                                    const VariationOptions& opts = {});

// Worst chord margin of the same path data against an externally supplied alpha;
// nonnegative (up to slack) means the quadratic bound persists on this grid.
double chordWorstMargin(const RadialDomain& eta0, const RadialDomain& eta1,
                        const BoundaryCondition& bc, const Eigen::VectorXd& t_points,
                        double alpha, const VariationOptions& opts = {});

struct SigmaReport {
    bool power_holds = false;        // F_t^{1/sigma} >= chord of endpoints
    bool linear_holds = false;       // F_t <= linear chord (evaluated for sigma < 0)
    bool implication_ok = false;     // power form implied the linear form on samples
};

// Pure arithmetic check of the sigma-power concavity form on sampled data.
// sigma == 0 is rejected; F must be positive. tol is relative.
SigmaReport generalSigmaCheck(const Eigen::VectorXd& t_points, const Eigen::VectorXd& F,
                              double sigma, double tol = 0.0);

struct BmiReport {
    Eigen::VectorXd t_grid;
    Eigen::VectorXd lambda;
    Eigen::VectorXd strong_margin;   // lambda_t^{-1/2} - chord (>= -slack wanted)
    Eigen::VectorXd weak_margin;     // chord - lambda_t      (>= -slack wanted)
    double slack = 0.0;              // relative budget from the mesh resolution
    double mesh_h = 0.0;             // worst mesh width relative to body diameter
    bool probe_only = false;         // Robin runs report margins without a verdict
    bool pass = false;
};

// Eigenvalue concavity along the Minkowski interpolation of two convex bodies.
// Dirichlet: strong (inverse square root) and weak (linear) forms checked
// against the mesh slack. Robin: margins are reported, no verdict is claimed.
BmiReport brunnMinkowskiCheck(const ConvexBody& k0, const ConvexBody& k1,
                              const Eigen::VectorXd& t_points,
                              const BoundaryCondition& bc,
                              const VariationOptions& opts = {});

}  // namespace shapeflow
