#include "shapeflow/fem.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

using Triplet = Eigen::Triplet<double>;

Eigen::Vector2d series(double r, double lam) {
    // J0-type power series for u'' + u'/r + lam*u = 0, u(0) = 1; valid for any sign of lam.
    const double x = lam * r * r;
    double u = 1.0, up = 0.0;
    double term = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= -x / (4.0 * k * k);
        u += term;
        up += 2.0 * k * term / r;
    }
    return {u, up};
}

// Radial ODE u'' = -u'/r - lam*u integrated by classic RK4.
Eigen::Vector2d shoot(double radius, double lam) {
    const double r0 = radius * 1e-3;
    const Eigen::Vector2d s0 = series(r0, lam);
    double u = s0[0], up = s0[1];
    const int n = 4000;
    const double h = (radius - r0) / n;
    auto f = [lam](double r, double uu, double vv) { return Eigen::Vector2d(vv, -vv / r - lam * uu); };
    double r = r0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d k1 = f(r, u, up);
        const Eigen::Vector2d k2 = f(r + h / 2, u + h / 2 * k1[0], up + h / 2 * k1[1]);
        const Eigen::Vector2d k3 = f(r + h / 2, u + h / 2 * k2[0], up + h / 2 * k2[1]);
        const Eigen::Vector2d k4 = f(r + h, u + h * k3[0], up + h * k3[1]);
        u += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        up += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
        r += h;
    }
    return {u, up};
}

double bisect(double lo, double hi, double flo, const std::function<double(double)>& f) {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Pencil {
    SpMat A;  // stiffness (+ beta * boundary mass for Robin), restricted for Dirichlet
    SpMat M;
    std::vector<int> dof_of_vertex;  // -1 for eliminated boundary vertices
    int n = 0;
};

Pencil buildPencil(const TriMesh& mesh, const AssembledSystem& sys, const BoundaryCondition& bc) {
    Pencil p;
    const int nv = mesh.vertexCount();
    if (bc.isRobin()) {
        p.A = sys.stiffness + bc.beta * sys.boundary_mass;
        p.M = sys.mass;
        p.dof_of_vertex.resize(nv);
        for (int i = 0; i < nv; ++i) p.dof_of_vertex[i] = i;
        p.n = nv;
        return p;
    }
    std::vector<bool> on_boundary(nv, false);
    for (int v : mesh.boundary_loop) on_boundary[v] = true;
    p.dof_of_vertex.assign(nv, -1);
    int n = 0;
    for (int i = 0; i < nv; ++i) {
        if (!on_boundary[i]) p.dof_of_vertex[i] = n++;
    }
    p.n = n;
    auto restrict_ = [&](const SpMat& full) {
        std::vector<Triplet> trips;
        trips.reserve(full.nonZeros());
        for (int k = 0; k < full.outerSize(); ++k) {
            for (SpMat::InnerIterator it(full, k); it; ++it) {
                const int r = p.dof_of_vertex[static_cast<int>(it.row())];
                const int c = p.dof_of_vertex[static_cast<int>(it.col())];
                if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
            }
        }
        SpMat out(n, n);
        out.setFromTriplets(trips.begin(), trips.end());
        return out;
    };
    p.A = restrict_(sys.stiffness);
    p.M = restrict_(sys.mass);
    return p;
}

int inertiaBelow(const SpMat& A, const SpMat& M, double sigma) {
    SpMat S = A - sigma * M;
    Eigen::SimplicialLDLT<SpMat> ldlt(S);
    if (ldlt.info() != Eigen::Success) throw IterationDivergence("LDLT factorization failed in inertia count");
    const auto& D = ldlt.vectorD();
    int count = 0;
    for (Eigen::Index i = 0; i < D.size(); ++i) {
        if (D[i] < 0.0) ++count;
    }
    return count;
}

// Bracket lambda1 from below when the pencil may be indefinite (Robin, beta <= 0):
// returns sigma with zero pencil eigenvalues below it and lambda1 within reach.
double bracketShift(const SpMat& A, const SpMat& M) {
    double lo = -1.0;
    for (int tries = 0; inertiaBelow(A, M, lo) > 0; ++tries) {
        if (tries > 60) throw BracketFailure("could not bracket the lowest eigenvalue from below");
        lo *= 4.0;
    }
    double hi = std::max(1.0, -lo * 1e-3);
    for (int tries = 0; inertiaBelow(A, M, hi) == 0; ++tries) {
        if (tries > 60) throw BracketFailure("could not bracket the lowest eigenvalue from above");
        hi *= 4.0;
    }
    while (hi - lo > 0.05 * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (inertiaBelow(A, M, mid) == 0) lo = mid;
        else hi = mid;
    }
    return lo - 0.05 * std::max(hi - lo, 1e-6);
}

struct IterationOutcome {
    double lambda = 0.0;
    Eigen::VectorXd u;
    double residual = 0.0;
    int iterations = 0;
};

IterationOutcome inverseIterate(const SpMat& A, const SpMat& M, double sigma, Eigen::VectorXd v,
                                const std::vector<Eigen::VectorXd>& deflate, const SolveOptions& opts) {
    const auto mdot = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(M * y); };
    auto mOrth = [&](Eigen::VectorXd& x) {
        for (const auto& d : deflate) x -= d * mdot(d, x);
    };
    auto factorAt = [&](double s) {
        auto f = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
        f->compute(SpMat(A - s * M));
        if (f->info() != Eigen::Success) throw IterationDivergence("shifted factorization failed");
        return f;
    };
    auto factor = factorAt(sigma);

    mOrth(v);
    double vnorm = std::sqrt(mdot(v, v));
    if (vnorm <= 0.0) throw ZeroVector("start vector vanished under deflation");
    v /= vnorm;

    double lambda = v.dot(A * v);
    double residual = 1.0;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        Eigen::VectorXd w = factor->solve(M * v);
        mOrth(w);
        mOrth(w);
        const double wnorm = std::sqrt(mdot(w, w));
        if (!std::isfinite(wnorm) || wnorm <= 0.0) throw IterationDivergence("inverse iteration broke down");
        w /= wnorm;
        const double lam_new = w.dot(A * w);
        const Eigen::VectorXd r = A * w - lam_new * (M * w);
        residual = r.norm() / (1.0 + std::abs(lam_new));
        const bool settled = std::abs(lam_new - lambda) <= 1e-14 * (1.0 + std::abs(lam_new));
        lambda = lam_new;
        v = std::move(w);
        if (residual <= opts.residual_tol && settled) break;
        if ((it + 1) % 12 == 0 && residual > opts.residual_tol) {
            // Rayleigh re-shift: clustered levels (e.g. split degenerate pairs) make a
            // fixed shift crawl, so chase the quotient from just below.
            double s = lambda - std::max(4.0 * residual, 1e-9) * (1.0 + std::abs(lambda));
            for (int tries = 0; tries < 4; ++tries) {
                try {
                    factor = factorAt(s);
                    break;
                } catch (const IterationDivergence&) {
                    s -= 1e-5 * (1.0 + std::abs(lambda));
                }
            }
        }
    }
    if (residual > 1e3 * opts.residual_tol) {
        throw IterationDivergence("eigensolver failed to reach the residual tolerance");
    }
    IterationOutcome out;
    out.lambda = lambda;
    out.u = std::move(v);
    out.residual = residual;
    out.iterations = it + 1;
    return out;
}

}  // namespace

AssembledSystem assemble(const TriMesh& mesh) {
    const int nv = mesh.vertexCount();
    std::vector<Triplet> kt, mt, bt;
    kt.reserve(9 * mesh.triangleCount());
    mt.reserve(9 * mesh.triangleCount());

    for (int t = 0; t < mesh.triangleCount(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Vector2d& p0 = mesh.vertices[tri[0]];
        const Eigen::Vector2d& p1 = mesh.vertices[tri[1]];
        const Eigen::Vector2d& p2 = mesh.vertices[tri[2]];
        const double a2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
        if (a2 <= 1e-14 * mesh.h_max * mesh.h_max) throw DegenerateTriangle("non-positive triangle area");
        const double area = 0.5 * a2;
        // grad of barycentric i is perp(opposite edge) / (2 area)
        const Eigen::Vector2d g[3] = {
            Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / a2,
            Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / a2,
            Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / a2,
        };
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                kt.emplace_back(tri[i], tri[j], area * g[i].dot(g[j]));
                mt.emplace_back(tri[i], tri[j], area / (i == j ? 6.0 : 12.0));
            }
        }
    }

    const int B = mesh.boundaryCount();
    for (int i = 0; i < B; ++i) {
        const int a = mesh.boundary_loop[i];
        const int b = mesh.boundary_loop[(i + 1) % B];
        const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
        bt.emplace_back(a, a, len / 3.0);
        bt.emplace_back(b, b, len / 3.0);
        bt.emplace_back(a, b, len / 6.0);
        bt.emplace_back(b, a, len / 6.0);
    }

    AssembledSystem sys;
    sys.stiffness.resize(nv, nv);
    sys.mass.resize(nv, nv);
    sys.boundary_mass.resize(nv, nv);
    sys.stiffness.setFromTriplets(kt.begin(), kt.end());
    sys.mass.setFromTriplets(mt.begin(), mt.end());
    sys.boundary_mass.setFromTriplets(bt.begin(), bt.end());
    return sys;
}

int eigenvalueCountBelow(const SpMat& A, const SpMat& M, double sigma) { return inertiaBelow(A, M, sigma); }

EigenResult solveEigen(const TriMesh& mesh, const BoundaryCondition& bc, const SolveOptions& opts) {
    const AssembledSystem sys = assemble(mesh);
    const Pencil p = buildPencil(mesh, sys, bc);

    double sigma;
    if (opts.shift_hint) {
        sigma = *opts.shift_hint - 0.1 * (1.0 + std::abs(*opts.shift_hint));
    } else if (bc.isRobin() && bc.beta <= 0.0) {
        sigma = bracketShift(p.A, p.M);
    } else {
        sigma = 0.0;  // pencil is definite: lambda1 > 0
    }

    Eigen::VectorXd v0 = Eigen::VectorXd::Ones(p.n);
    const IterationOutcome first = inverseIterate(p.A, p.M, sigma, v0, {}, opts);

    EigenResult res;
    res.lambda1 = first.lambda;
    res.h_max = mesh.h_max;
    res.residual = first.residual;
    res.iterations = first.iterations;

    Eigen::VectorXd u1 = first.u;
    if (u1.sum() < 0.0) u1 = -u1;  // ground state sign convention

    if (opts.want_lambda2) {
        Eigen::VectorXd v1(p.n);
        for (int i = 0; i < mesh.vertexCount(); ++i) {
            const int d = p.dof_of_vertex[i];
            if (d >= 0) v1[d] = mesh.vertices[i].x() + 0.25 * mesh.vertices[i].y();
        }
        const double sigma2 = first.lambda + 0.05 * (1.0 + std::abs(first.lambda));
        const IterationOutcome second = inverseIterate(p.A, p.M, sigma2, v1, {u1}, opts);
        res.lambda2 = second.lambda;
        res.residual = std::max(res.residual, second.residual);
        res.iterations += second.iterations;
    }

    // expand to full vertex vector
    res.u = Eigen::VectorXd::Zero(mesh.vertexCount());
    for (int i = 0; i < mesh.vertexCount(); ++i) {
        const int d = p.dof_of_vertex[i];
        if (d >= 0) res.u[i] = u1[d];
    }
    res.trace_ratio = res.u.dot(sys.boundary_mass * res.u) / res.u.dot(sys.mass * res.u);
    return res;
}

double diskOracle(double radius, const BoundaryCondition& bc) {
    if (radius <= 0.0) throw InvalidInput("disk radius must be positive");
    const auto F = [&](double lam) {
        const Eigen::Vector2d ur = shoot(radius, lam);
        return bc.isRobin() ? ur[1] + bc.beta * ur[0] : ur[0];
    };

    if (bc.isRobin() && bc.beta == 0.0) return 0.0;

    double lo, hi;
    if (bc.isRobin() && bc.beta < 0.0) {
        lo = -1.2 * bc.beta * bc.beta - 1.0;
        hi = -1e-12;
        while (F(lo) <= 0.0) {
            lo *= 4.0;
            if (lo < -1e8 / (radius * radius)) throw BracketFailure("negative-beta bracket failed");
        }
    } else {
        // First sign change of the shooting functional on a forward scan.
        const double cap = 400.0 / (radius * radius);
        const double step = cap / 2000.0;
        lo = 1e-9;
        double flo = F(lo);
        hi = 0.0;
        for (double x = lo + step; x <= cap; x += step) {
            const double fx = F(x);
            if ((fx > 0) != (flo > 0)) {
                hi = x;
                break;
            }
            lo = x;
            flo = fx;
        }
        if (hi == 0.0) throw BracketFailure("no sign change for the disk eigenvalue");
    }
    return bisect(lo, hi, F(lo), F);
}

double rayleigh(const Eigen::VectorXd& u, const BoundaryCondition& bc, const AssembledSystem& sys) {
    const double m = u.dot(sys.mass * u);
    if (m <= 1e-300) throw ZeroVector("Rayleigh quotient of a null vector");
    double num = u.dot(sys.stiffness * u);
    if (bc.isRobin()) num += bc.beta * u.dot(sys.boundary_mass * u);
    return num / m;
}

}  // namespace shapeflow
