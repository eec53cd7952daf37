#include "shapeflow/variation.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "shapeflow/errors.hpp"
#include "shapeflow/fourier.hpp"
#include "shapeflow/mesh.hpp"
#include "shapeflow/slack.hpp"

namespace shapeflow {

namespace {

double curvatureAt(const RadialDomain& d, double theta) {
    const double e = d.eta(theta);
    const double ep = d.etaDeriv(theta, 1);
    const double epp = d.etaDeriv(theta, 2);
    const double g = e * e + ep * ep;
    return (e * e + 2.0 * ep * ep - e * epp) / (g * std::sqrt(g));
}

int pinnedRings(const RadialDomain& d, const VariationOptions& opts) {
    if (opts.pinned_rings > 0) return opts.pinned_rings;
    const double target = opts.target_h > 0.0 ? opts.target_h : 0.025 * diameter(d);
    return ringCountFor(d, target);
}

TriMesh buildMesh(const RadialDomain& d, int rings, int refinements) {
    TriMesh m = triangulateFixed(d, rings);
    for (int r = 0; r < refinements; ++r) m = refine(m, d);
    return m;
}

// Values of a field given on the domain sample grid, at b_count uniform angles.
// Subsamples when the grids nest; otherwise evaluates the trig interpolant.
// Both paths are linear, and exactly homogeneous under field scaling.
Eigen::VectorXd resampleToBoundary(const Eigen::VectorXd& samples, int b_count) {
    const int n = static_cast<int>(samples.size());
    Eigen::VectorXd out(b_count);
    if (b_count <= n && n % b_count == 0) {
        const int step = n / b_count;
        for (int i = 0; i < b_count; ++i) out[i] = samples[i * step];
        return out;
    }
    const Eigen::VectorXd coeffs = fourierAnalyze(samples, (n - 1) / 2);
    for (int i = 0; i < b_count; ++i) out[i] = fourierEval(coeffs, thetaAt(i, b_count));
    return out;
}

void requireFieldSize(const RadialDomain& d, const PerturbationField& f) {
    const int n = d.sampleCount();
    if (f.normal.size() != n)
        throw InvalidInput("perturbation field has " + std::to_string(f.normal.size()) +
                           " normal samples, domain has " + std::to_string(n));
    if (f.tangential.size() != 0 && f.tangential.size() != n)
        throw InvalidInput("tangential field sample count mismatch");
    if (f.second_order.size() != 0 && f.second_order.size() != n)
        throw InvalidInput("second-order field sample count mismatch");
}

}  // namespace

PerturbationField PerturbationField::fromNormal(const Eigen::VectorXd& g) {
    PerturbationField f;
    f.normal = g;
    return f;
}

PerturbationField PerturbationField::fromNormal(const Eigen::VectorXd& g,
                                                const Eigen::VectorXd& w_normal) {
    PerturbationField f;
    f.normal = g;
    f.second_order = w_normal;
    return f;
}

double fieldNormW12(const RadialDomain& domain, const PerturbationField& field) {
    requireFieldSize(domain, field);
    const int n = domain.sampleCount();
    const Eigen::VectorXd& g = field.normal;
    const Eigen::VectorXd s =
        field.tangential.size() ? field.tangential : Eigen::VectorXd::Zero(n);

    const Eigen::VectorXd dg = spectralDerivative(g);
    const Eigen::VectorXd dsamp = spectralDerivative(s);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double theta = thetaAt(i, n);
        const double e = domain.eta(theta);
        const double ep = domain.etaDeriv(theta, 1);
        const double speed = std::sqrt(e * e + ep * ep);
        const double kappa = curvatureAt(domain, theta);
        // v = g nu + s tau; with CCW tangent and outward normal,
        // dv/ds = (g' - kappa s) nu + (s' + kappa g) tau.
        const double gp = dg[i] / speed;
        const double sp = dsamp[i] / speed;
        const double dn = gp - kappa * s[i];
        const double dt = sp + kappa * g[i];
        total += (g[i] * g[i] + s[i] * s[i] + dn * dn + dt * dt) * speed;
    }
    return std::sqrt(total * kTwoPi / n);
}

Eigen::VectorXd firstVariationDensity(const RadialDomain& domain, const BoundaryCondition& bc,
                                      const TriMesh& mesh, const EigenResult& res) {
    const int b = mesh.boundaryCount();
    Eigen::VectorXd utrace(b);
    for (int i = 0; i < b; ++i) utrace[i] = res.u[mesh.boundary_loop[i]];

    Eigen::VectorXd speed(b), weight(b);
    for (int i = 0; i < b; ++i) {
        const double theta = mesh.boundary_theta[i];
        const double e = domain.eta(theta);
        const double ep = domain.etaDeriv(theta, 1);
        speed[i] = std::sqrt(e * e + ep * ep);
        weight[i] = speed[i] * kTwoPi / b;  // ds at the node, trapezoid-exact on the uniform grid
    }

    Eigen::VectorXd density(b);
    if (!bc.isRobin()) {
        // Consistent flux: for boundary hat functions phi, a(u,phi) - lambda m(u,phi)
        // equals the boundary integral of (du/dnu) phi, so inverting the boundary
        // mass block recovers nodal values of the normal derivative.
        const AssembledSystem sys = assemble(mesh);
        const Eigen::VectorXd resid =
            sys.stiffness * res.u - res.lambda1 * (sys.mass * res.u);
        Eigen::VectorXd rb(b);
        for (int i = 0; i < b; ++i) rb[i] = resid[mesh.boundary_loop[i]];

        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(4 * b);
        for (int i = 0; i < b; ++i) {
            const int j = (i + 1) % b;
            const double len =
                (mesh.vertices[mesh.boundary_loop[j]] - mesh.vertices[mesh.boundary_loop[i]])
                    .norm();
            trips.emplace_back(i, i, len / 3.0);
            trips.emplace_back(j, j, len / 3.0);
            trips.emplace_back(i, j, len / 6.0);
            trips.emplace_back(j, i, len / 6.0);
        }
        SpMat bb(b, b);
        bb.setFromTriplets(trips.begin(), trips.end());
        Eigen::SimplicialLDLT<SpMat> solver(bb);
        if (solver.info() != Eigen::Success)
            throw IterationDivergence("boundary mass factorization failed");
        const Eigen::VectorXd q = solver.solve(rb);

        for (int i = 0; i < b; ++i) density[i] = -q[i] * q[i] * weight[i];
        return density;
    }

    // Robin: split the gradient trace through the boundary condition,
    // |grad u|^2 = (beta u)^2 + (du/dtau)^2, with the tangential derivative taken
    // spectrally in the angle parameter. The full integrand then reads
    // (du/dtau)^2 - beta^2 u^2 - lambda u^2 + beta kappa u^2.
    const double beta = bc.beta;
    const Eigen::VectorXd dutheta = spectralDerivative(utrace);
    for (int i = 0; i < b; ++i) {
        const double u = utrace[i];
        const double dtau = dutheta[i] / speed[i];
        const double kappa = curvatureAt(domain, mesh.boundary_theta[i]);
        const double integrand =
            dtau * dtau - beta * beta * u * u - res.lambda1 * u * u + beta * kappa * u * u;
        density[i] = integrand * weight[i];
    }
    return density;
}

double firstVariation(const RadialDomain& domain, const BoundaryCondition& bc,
                      const PerturbationField& field, const VariationOptions& opts) {
    requireFieldSize(domain, field);
    const int rings = pinnedRings(domain, opts);
    const TriMesh mesh = buildMesh(domain, rings, opts.refinements);

    SolveOptions so;
    so.residual_tol = opts.residual_tol;
    const EigenResult res = solveEigen(mesh, bc, so);

    const Eigen::VectorXd density = firstVariationDensity(domain, bc, mesh, res);
    const Eigen::VectorXd gb = resampleToBoundary(field.normal, mesh.boundaryCount());
    return density.dot(gb);
}

double defaultFdStep(const RadialDomain& domain) { return 1e-2 * diameter(domain); }

double finiteDiffVariation(const RadialDomain& domain, const BoundaryCondition& bc,
                           const PerturbationField& field, double delta, int order,
                           const VariationOptions& opts) {
    requireFieldSize(domain, field);
    if (order != 1 && order != 2) throw InvalidInput("finite-difference order must be 1 or 2");
    if (!(delta > 0.0)) throw InvalidInput("finite-difference step must be positive");

    const int n = domain.sampleCount();
    const int modes = domain.modes();
    const Eigen::VectorXd etap = fourierSynthesize(fourierDerivCoeffs(domain.fourier), n);

    // Radial realization: moving the boundary by t (v.nu) along the normal moves
    // the graph by t g sqrt(eta^2 + eta'^2)/eta along the ray.
    Eigen::VectorXd gv(n), gw = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        const double e = domain.samples[i];
        const double factor = std::sqrt(e * e + etap[i] * etap[i]) / e;
        gv[i] = field.normal[i] * factor;
        if (field.second_order.size()) gw[i] = field.second_order[i] * factor;
    }

    const double scale = std::max(gv.cwiseAbs().maxCoeff(), gw.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    const double t1 = delta / scale;  // peak radial displacement of the first-order part = delta

    const int rings = pinnedRings(domain, opts);

    SolveOptions so;
    so.residual_tol = opts.residual_tol;
    const TriMesh base_mesh = buildMesh(domain, rings, opts.refinements);
    const double lambda0 = solveEigen(base_mesh, bc, so).lambda1;
    so.shift_hint = lambda0;

    const auto lambdaAt = [&](double t) {
        const Eigen::VectorXd samples =
            domain.samples + t * gv + (0.5 * t * t) * gw;
        if (samples.minCoeff() <= 0.0)
            throw AdmissibilityLost("perturbed boundary crosses the origin");
        const RadialDomain d = RadialDomain::fromSamples(samples, modes);
        const AdmissibilityReport rep = isAdmissible(Shape{d}, opts.admissibility);
        if (!rep.admissible)
            throw AdmissibilityLost("perturbed domain violates the " + rep.binding +
                                    " constraint");
        return solveEigen(buildMesh(d, rings, opts.refinements), bc, so).lambda1;
    };

    const auto estimate = [&](double t) {
        if (order == 1) return (lambdaAt(t) - lambdaAt(-t)) / (2.0 * t);
        return (lambdaAt(t) - 2.0 * lambda0 + lambdaAt(-t)) / (t * t);
    };

    const double coarse = estimate(t1);
    const double fine = estimate(0.5 * t1);
    return (4.0 * fine - coarse) / 3.0;
}

SecondVariationReport secondVariationBound(const std::vector<RadialDomain>& domains,
                                           const std::vector<PerturbationField>& fields,
                                           const BoundaryCondition& bc,
                                           const VariationOptions& opts) {
    if (domains.empty() || domains.size() != fields.size())
        throw InvalidInput("second-variation sample needs matching nonempty domain/field lists");
    SecondVariationReport report;
    report.ratios.reserve(domains.size());
    for (size_t i = 0; i < domains.size(); ++i) {
        PerturbationField v = fields[i];
        v.second_order.resize(0);
        const double norm = fieldNormW12(domains[i], v);
        if (norm <= 0.0) throw ZeroVector("perturbation field has zero norm");
        const double second =
            finiteDiffVariation(domains[i], bc, v, defaultFdStep(domains[i]), 2, opts);
        report.ratios.push_back(std::abs(second) / (norm * norm));
    }
    std::vector<double> sorted = report.ratios;
    std::sort(sorted.begin(), sorted.end());
    const size_t m = sorted.size();
    report.max_ratio = sorted.back();
    report.median_ratio =
        (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    report.bounded = report.max_ratio <= 10.0 * std::max(report.median_ratio, 1e-300);
    return report;
}

namespace {

void requireUnitGrid(const Eigen::VectorXd& t, bool uniform) {
    const int nt = static_cast<int>(t.size());
    if (nt < 3) throw InvalidInput("parameter grid needs at least 3 points");
    if (std::abs(t[0]) > 1e-12 || std::abs(t[nt - 1] - 1.0) > 1e-12)
        throw InvalidInput("parameter grid must span [0, 1]");
    for (int i = 1; i < nt; ++i)
        if (!(t[i] > t[i - 1])) throw InvalidInput("parameter grid must be strictly increasing");
    if (uniform) {
        const double dt = t[1] - t[0];
        for (int i = 1; i < nt; ++i)
            if (std::abs(t[i] - t[i - 1] - dt) > 1e-9 * dt)
                throw InvalidInput("parameter grid must be uniformly spaced");
    }
}

// lambda_1 along the radial interpolation path, one pinned mesh resolution.
Eigen::VectorXd pathValues(const RadialDomain& eta0, const RadialDomain& eta1,
                           const BoundaryCondition& bc, const Eigen::VectorXd& t,
                           const VariationOptions& opts) {
    const int rings = std::max(pinnedRings(eta0, opts), pinnedRings(eta1, opts));
    Eigen::VectorXd values(t.size());
    SolveOptions so;
    so.residual_tol = opts.residual_tol;
    for (int i = 0; i < t.size(); ++i) {
        const RadialDomain d = radialInterpolate(eta0, eta1, t[i]);
        values[i] = solveEigen(buildMesh(d, rings, opts.refinements), bc, so).lambda1;
        so.shift_hint = values[i];
    }
    return values;
}

}  // namespace

ConvexityReport alphaConvexityCheck(const RadialDomain& eta0, const RadialDomain& eta1,
                                    const BoundaryCondition& bc,
                                    const Eigen::VectorXd& t_points,
                                    const VariationOptions& opts) {
    if (!bc.isRobin() || bc.beta <= 0.0)
        throw InvalidInput("convexity check requires a Robin condition with beta > 0");
    requireUnitGrid(t_points, /*uniform=*/true);

    ConvexityReport report;
    report.t_grid = t_points;
    report.values = pathValues(eta0, eta1, bc, t_points, opts);

    const double d = distance(Shape{eta0}, Shape{eta1}, MetricKind::sobolevRadial());
    report.distance_sq = d * d;

    const int nt = static_cast<int>(t_points.size());
    const double dt = t_points[1] - t_points[0];
    report.second_differences.resize(nt - 2);
    for (int i = 1; i + 1 < nt; ++i)
        report.second_differences[i - 1] =
            (report.values[i + 1] - 2.0 * report.values[i] + report.values[i - 1]) / (dt * dt);

    report.alpha_estimate =
        report.distance_sq > 0.0 ? report.second_differences.minCoeff() / report.distance_sq : 0.0;

    // Discrete chord lemma: second differences >= alpha d^2 on a uniform grid
    // imply the quadratic chord bound at the grid points, so this should fail
    // only through roundoff.
    const double tol = 1e-9 * report.values.cwiseAbs().maxCoeff();
    report.chord_ok = true;
    for (int i = 0; i < nt; ++i) {
        const double ti = t_points[i];
        const double chord = (1.0 - ti) * report.values[0] + ti * report.values[nt - 1] -
                             0.5 * report.alpha_estimate * ti * (1.0 - ti) * report.distance_sq;
        if (report.values[i] > chord + tol) report.chord_ok = false;
    }
    return report;
}

double chordWorstMargin(const RadialDomain& eta0, const RadialDomain& eta1,
                        const BoundaryCondition& bc, const Eigen::VectorXd& t_points,
                        double alpha, const VariationOptions& opts) {
    if (!bc.isRobin() || bc.beta <= 0.0)
        throw InvalidInput("convexity check requires a Robin condition with beta > 0");
    requireUnitGrid(t_points, /*uniform=*/false);
    const Eigen::VectorXd values = pathValues(eta0, eta1, bc, t_points, opts);
    const double d = distance(Shape{eta0}, Shape{eta1}, MetricKind::sobolevRadial());
    const int nt = static_cast<int>(t_points.size());
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nt; ++i) {
        const double ti = t_points[i];
        const double chord = (1.0 - ti) * values[0] + ti * values[nt - 1] -
                             0.5 * alpha * ti * (1.0 - ti) * d * d;
        worst = std::min(worst, chord - values[i]);
    }
    return worst;
}

SigmaReport generalSigmaCheck(const Eigen::VectorXd& t_points, const Eigen::VectorXd& F,
                              double sigma, double tol) {
    if (sigma == 0.0) throw InvalidSigma("sigma must be nonzero");
    if (t_points.size() != F.size()) throw InvalidInput("grid/value size mismatch");
    requireUnitGrid(t_points, /*uniform=*/false);
    if (F.minCoeff() <= 0.0) throw InvalidInput("sigma check needs positive values");

    const int nt = static_cast<int>(t_points.size());
    const Eigen::ArrayXd a = F.array().pow(1.0 / sigma);
    const double a_scale = a.abs().maxCoeff();
    const double f_scale = F.cwiseAbs().maxCoeff();

    SigmaReport report;
    report.power_holds = true;
    report.linear_holds = true;
    for (int i = 0; i < nt; ++i) {
        const double ti = t_points[i];
        const double chord_a = (1.0 - ti) * a[0] + ti * a[nt - 1];
        if (a[i] < chord_a - tol * a_scale) report.power_holds = false;
        if (sigma < 0.0) {
            const double chord_f = (1.0 - ti) * F[0] + ti * F[nt - 1];
            if (F[i] > chord_f + tol * f_scale) report.linear_holds = false;
        }
    }
    // For sigma <= -1 the power form implies the linear form (convexity of
    // z -> z^sigma); flag any sampled counterexample.
    report.implication_ok =
        !(sigma <= -1.0 && report.power_holds) || report.linear_holds;
    return report;
}

BmiReport brunnMinkowskiCheck(const ConvexBody& k0, const ConvexBody& k1,
                              const Eigen::VectorXd& t_points, const BoundaryCondition& bc,
                              const VariationOptions& opts) {
    requireUnitGrid(t_points, /*uniform=*/false);
    const ConvexBody c0 = recentered(k0);
    const ConvexBody c1 = recentered(k1);

    const int nt = static_cast<int>(t_points.size());
    BmiReport report;
    report.t_grid = t_points;
    report.lambda.resize(nt);
    report.strong_margin.resize(nt);
    report.weak_margin.resize(nt);

    const int radial_modes = 96;
    // Ring counts follow a diameter-proportional target so that jointly scaling
    // both bodies rescales every mesh exactly and leaves the verdict unchanged.
    const auto ringsFor = [&](const RadialDomain& d) {
        if (opts.pinned_rings > 0) return opts.pinned_rings;
        return ringCountFor(d, 0.04 * diameter(d));
    };

    SolveOptions so;
    so.residual_tol = opts.residual_tol;
    double h_rel = 0.0;
    for (int i = 0; i < nt; ++i) {
        const ConvexBody kt = minkowskiCombine(c0, c1, t_points[i]);
        const RadialDomain d = supportToRadial(kt, radial_modes, kt.sampleCount());
        const TriMesh mesh = buildMesh(d, ringsFor(d), opts.refinements);
        report.lambda[i] = solveEigen(mesh, bc, so).lambda1;
        so.shift_hint = report.lambda[i];
        h_rel = std::max(h_rel, mesh.h_max / diameter(d));
    }
    report.mesh_h = h_rel;
    report.slack = meshSlack(h_rel);

    const Eigen::ArrayXd inv_sqrt = report.lambda.array().pow(-0.5);
    for (int i = 0; i < nt; ++i) {
        const double ti = t_points[i];
        report.strong_margin[i] =
            inv_sqrt[i] - ((1.0 - ti) * inv_sqrt[0] + ti * inv_sqrt[nt - 1]);
        report.weak_margin[i] =
            ((1.0 - ti) * report.lambda[0] + ti * report.lambda[nt - 1]) - report.lambda[i];
    }

    if (bc.isRobin()) {
        report.probe_only = true;  // open regime: report margins, claim nothing
        report.pass = true;
        return report;
    }
    const SigmaReport sig = generalSigmaCheck(t_points, report.lambda, -2.0, report.slack);
    report.pass = sig.power_holds && sig.linear_holds && sig.implication_ok;
    return report;
}

}  // namespace shapeflow
