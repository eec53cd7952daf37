#include "shapeflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

constexpr int kMaxRings = 512;

void finalizeSizes(TriMesh& m) {
    double h = 0.0;
    for (const auto& t : m.triangles) {
        for (int e = 0; e < 3; ++e) {
            h = std::max(h, (m.vertices[t[e]] - m.vertices[t[(e + 1) % 3]]).norm());
        }
    }
    m.h_max = h;
}

double worstIncidentAngle(const TriMesh& m, const std::vector<int>& tris) {
    double worst = 10.0;
    for (int t : tris) {
        const auto& tri = m.triangles[t];
        const Eigen::Vector2d e1 = m.vertices[tri[1]] - m.vertices[tri[0]];
        const Eigen::Vector2d e2 = m.vertices[tri[2]] - m.vertices[tri[0]];
        if (e1.x() * e2.y() - e1.y() * e2.x() <= 0.0) return -1.0;  // inverted
        for (int e = 0; e < 3; ++e) {
            const Eigen::Vector2d a = m.vertices[tri[(e + 1) % 3]] - m.vertices[tri[e]];
            const Eigen::Vector2d b = m.vertices[tri[(e + 2) % 3]] - m.vertices[tri[e]];
            worst = std::min(worst, std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)));
        }
    }
    return worst;
}

// Smart Laplacian smoothing: move an interior vertex to its neighbor average only
// when the worst incident angle improves. Counteracts the tangential shear the
// radial map introduces where eta'/eta is large.
void smoothInterior(TriMesh& m, int sweeps) {
    const int nv = m.vertexCount();
    std::vector<std::vector<int>> vtris(nv);
    for (int t = 0; t < m.triangleCount(); ++t) {
        for (int e = 0; e < 3; ++e) vtris[m.triangles[t][e]].push_back(t);
    }
    std::vector<std::vector<int>> nbrs(nv);
    for (const auto& tri : m.triangles) {
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e], b = tri[(e + 1) % 3];
            nbrs[a].push_back(b);
            nbrs[b].push_back(a);
        }
    }
    std::vector<bool> locked(nv, false);
    for (int v : m.boundary_loop) locked[v] = true;

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int v = 0; v < nv; ++v) {
            if (locked[v] || nbrs[v].empty()) continue;
            Eigen::Vector2d mean = Eigen::Vector2d::Zero();
            for (int w : nbrs[v]) mean += m.vertices[w];
            mean /= static_cast<double>(nbrs[v].size());
            const Eigen::Vector2d old = m.vertices[v];
            const double before = worstIncidentAngle(m, vtris[v]);
            m.vertices[v] = mean;
            if (worstIncidentAngle(m, vtris[v]) <= before) m.vertices[v] = old;
        }
    }
}

}  // namespace

int ringCountFor(const RadialDomain& d, double target_h) {
    if (target_h <= 0.0) throw InvalidInput("target_h must be positive");
    const int N = d.sampleCount();
    // Outer cells have radial extent ~R/n and arc extent ~pi*R/(4n); the diagonal
    // bounds the element size by ~1.3 R / n.
    const int wanted = static_cast<int>(std::ceil(1.3 * d.maxRadius() / target_h));
    for (int n = std::max(wanted, 3); n <= kMaxRings; ++n) {
        const int b = 8 * n;
        if (N % b == 0 || b % N == 0) return n;
    }
    throw InvalidInput("target_h too fine for the ring cap");
}

TriMesh triangulateFixed(const RadialDomain& d, int rings) {
    if (rings < 3) throw TargetTooCoarse("mesh needs at least 3 rings");
    if (rings > kMaxRings) throw InvalidInput("ring count exceeds cap");
    const int N = d.sampleCount();
    const int B = 8 * rings;
    if (N % B != 0 && B % N != 0) throw InvalidInput("boundary count must align with the sample grid");

    TriMesh m;
    m.rings = rings;
    m.vertices.reserve(1 + 4 * rings * (rings + 1));
    m.triangles.reserve(8 * rings * rings);

    std::vector<int> ring_start(rings + 1);
    m.vertices.emplace_back(0.0, 0.0);
    ring_start[0] = 0;
    for (int j = 1; j <= rings; ++j) {
        ring_start[j] = static_cast<int>(m.vertices.size());
        const int mj = 8 * j;
        const double f = static_cast<double>(j) / rings;
        for (int i = 0; i < mj; ++i) {
            const double th = kTwoPi * i / mj;
            const double r = f * d.eta(th);
            m.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }

    for (int i = 0; i < 8; ++i) {
        m.triangles.push_back({0, ring_start[1] + i, ring_start[1] + (i + 1) % 8});
    }
    for (int j = 1; j < rings; ++j) {
        const int ma = 8 * j, mb = 8 * (j + 1);
        const int sa = ring_start[j], sb = ring_start[j + 1];
        int ia = 0, ib = 0;
        while (ia < ma || ib < mb) {
            const double fa = static_cast<double>(ia + 1) / ma;
            const double fb = static_cast<double>(ib + 1) / mb;
            if (ib < mb && (ia == ma || fb <= fa)) {
                m.triangles.push_back({sa + ia % ma, sb + ib % mb, sb + (ib + 1) % mb});
                ++ib;
            } else {
                m.triangles.push_back({sa + ia % ma, sb + ib % mb, sa + (ia + 1) % ma});
                ++ia;
            }
        }
    }

    m.boundary_loop.resize(B);
    m.boundary_theta.resize(B);
    for (int i = 0; i < B; ++i) {
        m.boundary_loop[i] = ring_start[rings] + i;
        m.boundary_theta[i] = kTwoPi * i / B;
    }
    smoothInterior(m, 12);
    finalizeSizes(m);
    return m;
}

TriMesh triangulate(const RadialDomain& d, double target_h) {
    return triangulateFixed(d, ringCountFor(d, target_h));
}

TriMesh refine(const TriMesh& mesh, const RadialDomain& d) {
    TriMesh out;
    out.rings = 2 * mesh.rings;
    out.vertices = mesh.vertices;

    const int B = mesh.boundaryCount();
    std::vector<bool> on_boundary(mesh.vertexCount(), false);
    std::vector<double> theta_of(mesh.vertexCount(), 0.0);
    std::vector<int> loop_pos(mesh.vertexCount(), -1);
    for (int i = 0; i < B; ++i) {
        on_boundary[mesh.boundary_loop[i]] = true;
        theta_of[mesh.boundary_loop[i]] = mesh.boundary_theta[i];
        loop_pos[mesh.boundary_loop[i]] = i;
    }

    std::map<std::pair<int, int>, int> midpoint;
    std::vector<int> boundary_mid(B, -1);  // midpoint of boundary edge i -> i+1
    auto midOf = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        int idx;
        int first = -1;  // boundary-ordered start of the edge, if any
        if (on_boundary[a] && on_boundary[b]) {
            if ((loop_pos[b] - loop_pos[a] + B) % B == 1) first = a;
            else if ((loop_pos[a] - loop_pos[b] + B) % B == 1) first = b;
        }
        if (first >= 0) {
            const double th = theta_of[first] + kTwoPi / (2.0 * B);
            const double r = d.eta(th);
            idx = static_cast<int>(out.vertices.size());
            out.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
            boundary_mid[loop_pos[first]] = idx;
        } else {
            idx = static_cast<int>(out.vertices.size());
            out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        }
        midpoint.emplace(key, idx);
        return idx;
    };

    out.triangles.reserve(4 * mesh.triangleCount());
    for (const auto& t : mesh.triangles) {
        const int m01 = midOf(t[0], t[1]);
        const int m12 = midOf(t[1], t[2]);
        const int m20 = midOf(t[2], t[0]);
        out.triangles.push_back({t[0], m01, m20});
        out.triangles.push_back({t[1], m12, m01});
        out.triangles.push_back({t[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }

    out.boundary_loop.resize(2 * B);
    out.boundary_theta.resize(2 * B);
    for (int i = 0; i < B; ++i) {
        if (boundary_mid[i] < 0) throw Error("refine: missing boundary midpoint");
        out.boundary_loop[2 * i] = mesh.boundary_loop[i];
        out.boundary_loop[2 * i + 1] = boundary_mid[i];
        out.boundary_theta[2 * i] = mesh.boundary_theta[i];
        out.boundary_theta[2 * i + 1] = mesh.boundary_theta[i] + kTwoPi / (2.0 * B);
    }
    smoothInterior(out, 6);
    finalizeSizes(out);
    return out;
}

double triangleArea(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d e1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
    const Eigen::Vector2d e2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double meshArea(const TriMesh& mesh) {
    double acc = 0.0;
    for (int t = 0; t < mesh.triangleCount(); ++t) acc += triangleArea(mesh, t);
    return acc;
}

double minAngle(const TriMesh& mesh) {
    double worst = kTwoPi;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const Eigen::Vector2d a = mesh.vertices[t[(e + 1) % 3]] - mesh.vertices[t[e]];
            const Eigen::Vector2d b = mesh.vertices[t[(e + 2) % 3]] - mesh.vertices[t[e]];
            const double ang = std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
            worst = std::min(worst, ang);
        }
    }
    return worst;
}

}  // namespace shapeflow
