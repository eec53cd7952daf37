#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "shapeflow/geometry.hpp"

namespace shapeflow {

// Conforming P1 triangle mesh of a star-shaped domain, built from concentric
// rings of a reference disk mapped radially onto r = eta(theta). Ring j carries
// 8j vertices, so the boundary has 8*rings vertices at uniform angles.
struct TriMesh {
    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles;   // CCW
    std::vector<int> boundary_loop;              // CCW vertex indices, closed implicitly
    std::vector<double> boundary_theta;          // angle parameter per boundary vertex
    double h_max = 0.0;
    int rings = 0;

    int vertexCount() const { return static_cast<int>(vertices.size()); }
    int triangleCount() const { return static_cast<int>(triangles.size()); }
    int boundaryCount() const { return static_cast<int>(boundary_loop.size()); }
};

// Smallest ring count whose boundary vertex count 8*n_r aligns with the sample
// grid (8*n_r divides N or N divides 8*n_r) and meets the target element size.
int ringCountFor(const RadialDomain& d, double target_h);

TriMesh triangulateFixed(const RadialDomain& d, int rings);
TriMesh triangulate(const RadialDomain& d, double target_h);

// Uniform 4-split; edge midpoints on the boundary are projected back onto the curve.
TriMesh refine(const TriMesh& mesh, const RadialDomain& d);

double minAngle(const TriMesh& mesh);          // radians
double meshArea(const TriMesh& mesh);
double triangleArea(const TriMesh& mesh, int t);

}  // namespace shapeflow
