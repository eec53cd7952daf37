#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>

#include "shapeflow/mesh.hpp"

namespace shapeflow {

struct BoundaryCondition {
    enum class Kind { Dirichlet, Robin };
    Kind kind = Kind::Dirichlet;
    double beta = 0.0;

    static BoundaryCondition dirichlet() { return {Kind::Dirichlet, 0.0}; }
    static BoundaryCondition robin(double beta) { return {Kind::Robin, beta}; }
    bool isRobin() const { return kind == Kind::Robin; }
};

using SpMat = Eigen::SparseMatrix<double>;

// P1 stiffness, mass, and boundary-mass matrices over all mesh vertices.
struct AssembledSystem {
    SpMat stiffness;
    SpMat mass;
    SpMat boundary_mass;
};

struct SolveOptions {
    double residual_tol = 1e-10;
    int max_iterations = 600;
    std::optional<double> shift_hint;  // previous lambda1, used to warm-start the shift
    bool want_lambda2 = false;
};

struct EigenResult {
    double lambda1 = 0.0;
    std::optional<double> lambda2;
    Eigen::VectorXd u;        // vertex values, M-normalized; zero on the boundary for Dirichlet
    double residual = 0.0;    // ||A u - lambda M u|| / (1 + |lambda|), u M-normalized
    double h_max = 0.0;
    double trace_ratio = 0.0; // boundary L2 mass over interior L2 mass of u
    int iterations = 0;
};

AssembledSystem assemble(const TriMesh& mesh);

// First (optionally second) eigenpair of the Laplacian with the given boundary
// condition, by shift-inverted inverse iteration. Negative Robin parameters are
// handled by an LDLT-inertia bisection that brackets lambda1 from below before
// shifting.
EigenResult solveEigen(const TriMesh& mesh, const BoundaryCondition& bc, const SolveOptions& opts = {});

// Reference value for the centered disk of radius R (radial shooting + bisection).
double diskOracle(double radius, const BoundaryCondition& bc);

// Rayleigh quotient of an arbitrary vertex vector under the assembled forms.
double rayleigh(const Eigen::VectorXd& u, const BoundaryCondition& bc, const AssembledSystem& sys);

// Eigenvalues of the pencil (A, M) strictly below sigma, by LDLT inertia.
int eigenvalueCountBelow(const SpMat& A, const SpMat& M, double sigma);

}  // namespace shapeflow
