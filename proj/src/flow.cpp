#include "shapeflow/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "shapeflow/errors.hpp"
#include "shapeflow/fourier.hpp"
#include "shapeflow/mesh.hpp"
#include "shapeflow/slack.hpp"
#include "shapeflow/variation.hpp"

namespace shapeflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStagnationMargin = 1e-12;

double canonicalUniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

const RadialDomain* asRadial(const Shape& s) { return std::get_if<RadialDomain>(&s); }
const ConvexBody* asConvex(const Shape& s) { return std::get_if<ConvexBody>(&s); }

TriMesh flowMesh(const RadialDomain& d, const FlowConfig& cfg) {
    return triangulate(d, cfg.mesh_target_factor * diameter(d));
}

RadialDomain radialView(const Shape& s) {
    if (const RadialDomain* d = asRadial(s)) return *d;
    return supportToRadial(*asConvex(s), kDefaultModes);
}

double lambdaOf(const Shape& s, const FlowConfig& cfg, std::optional<double> hint,
                double* h_rel_out = nullptr) {
    const RadialDomain d = radialView(s);
    const TriMesh mesh = flowMesh(d, cfg);
    SolveOptions so;
    so.shift_hint = hint;
    const EigenResult res = solveEigen(mesh, cfg.bc, so);
    if (h_rel_out) *h_rel_out = mesh.h_max / diameter(d);
    return res.lambda1;
}

// Inner parameter space: Fourier coefficients of eta (radial) or of the support
// function (convex), order cfg.flow_modes. Decoding synthesizes samples, applies
// the volume projection, and reports representability failures as nullopt.
struct Parametrization {
    bool radial = true;
    int n_samples = kDefaultSamples;

    static Parametrization of(const Shape& s) {
        Parametrization p;
        if (const RadialDomain* d = asRadial(s)) {
            p.radial = true;
            p.n_samples = d->sampleCount();
        } else {
            p.radial = false;
            p.n_samples = asConvex(s)->sampleCount();
        }
        return p;
    }

    Eigen::VectorXd encode(const Shape& s, const FlowConfig& cfg) const {
        const Eigen::VectorXd& samples = radial ? asRadial(s)->samples : asConvex(s)->support;
        return fourierAnalyze(samples, cfg.flow_modes);
    }

    std::optional<Shape> decode(const Eigen::VectorXd& c, const FlowConfig& cfg) const {
        const Eigen::VectorXd samples = fourierSynthesize(c, n_samples);
        if (samples.minCoeff() <= 0.0) return std::nullopt;
        try {
            if (radial) {
                RadialDomain d = RadialDomain::fromFourier(c, n_samples);
                if (cfg.volume_constraint) d = rescaleToArea(d, *cfg.volume_constraint);
                return Shape{d};
            }
            ConvexBody k = ConvexBody::fromSupportSamples(samples);
            if (cfg.volume_constraint) {
                const double s = std::sqrt(*cfg.volume_constraint / area(k));
                k = ConvexBody::fromSupportSamples(s * k.support);
            }
            return Shape{k};
        } catch (const Error&) {
            return std::nullopt;
        }
    }
};

struct Candidate {
    double phi = kInf;
    double lambda = kInf;
    double dist = 0.0;
    std::optional<Shape> shape;
};

// Phi(h, x; decode(c)) with the admissibility barrier. Counts every evaluation.
struct StepObjective {
    const Shape& x;
    double h;
    const FlowConfig& cfg;
    const Parametrization& par;
    double hint;
    int evals = 0;

    Candidate evaluate(const Eigen::VectorXd& c) {
        ++evals;
        Candidate out;
        std::optional<Shape> y = par.decode(c, cfg);
        if (!y) return out;
        if (!isAdmissible(*y, cfg.admissibility).admissible) return out;
        out.shape = std::move(y);
        out.dist = distance(x, *out.shape, cfg.metric);
        out.lambda = lambdaOf(*out.shape, cfg, hint);
        out.phi = out.lambda + out.dist * out.dist / (2.0 * h);
        return out;
    }
};

void betterOf(Candidate& best, Eigen::VectorXd& best_c, const Candidate& trial,
              const Eigen::VectorXd& trial_c) {
    if (trial.phi < best.phi) {
        best = trial;
        best_c = trial_c;
    }
}

// One textbook Nelder-Mead run started at c0 with the given simplex spread.
// Updates the best candidate seen (which may remain c0 itself).
void nelderMeadPhase(StepObjective& obj, const Eigen::VectorXd& c0, double spread, int budget,
                     std::mt19937_64& rng, Candidate& best, Eigen::VectorXd& best_c) {
    const int dim = static_cast<int>(c0.size());

    std::vector<Eigen::VectorXd> xs;
    std::vector<double> fs;
    xs.reserve(dim + 1);
    xs.push_back(c0);
    {
        Candidate c = obj.evaluate(c0);
        betterOf(best, best_c, c, c0);
        fs.push_back(c.phi);
    }
    for (int j = 0; j < dim && obj.evals < budget; ++j) {
        Eigen::VectorXd v = c0;
        const double jitter = 0.75 + 0.5 * canonicalUniform(rng);
        v[j] += spread * jitter;
        Candidate c = obj.evaluate(v);
        betterOf(best, best_c, c, v);
        xs.push_back(std::move(v));
        fs.push_back(c.phi);
    }
    if (xs.size() < 2) return;
    const int m = static_cast<int>(xs.size());

    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    const auto sortSimplex = [&] {
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    };

    while (obj.evals < budget) {
        sortSimplex();
        const int lo = order[0], hi = order[m - 1], next_hi = order[m - 2];
        if (std::isfinite(fs[lo]) &&
            fs[hi] - fs[lo] <= obj.cfg.inner_tol * (1.0 + std::abs(fs[lo])))
            break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < m; ++i)
            if (i != hi) centroid += xs[i];
        centroid /= static_cast<double>(m - 1);

        const Eigen::VectorXd xr = centroid + (centroid - xs[hi]);
        Candidate cr = obj.evaluate(xr);
        betterOf(best, best_c, cr, xr);

        if (cr.phi < fs[lo] && obj.evals < budget) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[hi]);
            Candidate ce = obj.evaluate(xe);
            betterOf(best, best_c, ce, xe);
            if (ce.phi < cr.phi) {
                xs[hi] = xe;
                fs[hi] = ce.phi;
            } else {
                xs[hi] = xr;
                fs[hi] = cr.phi;
            }
            continue;
        }
        if (cr.phi < fs[next_hi]) {
            xs[hi] = xr;
            fs[hi] = cr.phi;
            continue;
        }
        if (obj.evals >= budget) break;
        const bool outside = cr.phi < fs[hi];
        Eigen::VectorXd xc;
        if (outside)
            xc = centroid + 0.5 * (xr - centroid);
        else
            xc = centroid - 0.5 * (centroid - xs[hi]);
        Candidate cc = obj.evaluate(xc);
        betterOf(best, best_c, cc, xc);
        if (cc.phi < std::min(cr.phi, fs[hi])) {
            xs[hi] = xc;
            fs[hi] = cc.phi;
            continue;
        }
        // Shrink toward the current best vertex.
        for (int i = 1; i < m && obj.evals < budget; ++i) {
            const int idx = order[i];
            xs[idx] = xs[order[0]] + 0.5 * (xs[idx] - xs[order[0]]);
            Candidate cs = obj.evaluate(xs[idx]);
            betterOf(best, best_c, cs, xs[idx]);
            fs[idx] = cs.phi;
        }
    }
}

// Restarted Nelder-Mead. A single simplex crawls when the minimizer lies many
// simplex diameters away and wastes the budget when it lies far inside the
// initial spread, so rebuild around the incumbent: zoom out to the distance the
// previous phase travelled, or zoom in when a phase found nothing at its scale.
void nelderMead(StepObjective& obj, const Eigen::VectorXd& c0, int budget,
                std::mt19937_64& rng, Candidate& best, Eigen::VectorXd& best_c) {
    const double scale = std::max(c0.cwiseAbs().maxCoeff(), 1e-3);
    double spread = 0.02 * scale;
    Eigen::VectorXd anchor = c0;
    while (obj.evals < budget) {
        nelderMeadPhase(obj, anchor, spread, budget, rng, best, best_c);
        if (!best.shape) break;  // nothing admissible found; retrying will not help
        const double travel = (best_c - anchor).cwiseAbs().maxCoeff();
        if (travel > 1e-12 * scale) {
            spread = std::max(0.5 * travel, 1e-5 * scale);
            anchor = best_c;
        } else {
            spread *= 0.125;
            if (spread < 1e-7 * scale) break;
        }
    }
}

// Sobolev metric weights in coefficient space: d^2 = sum_j w_j (dc_j)^2.
Eigen::VectorXd sobolevWeights(int modes) {
    Eigen::VectorXd w(2 * modes + 1);
    w[0] = 2.0 * kTwoPi / 2.0;  // 2 pi
    for (int k = 1; k <= modes; ++k) {
        w[k] = (kTwoPi / 2.0) * (1.0 + k * k);
        w[modes + k] = w[k];
    }
    return w;
}

// One-solve gradient of the step objective at c (radial, Sobolev metric only),
// followed by a preconditioned backtracking probe.
void gradientPolish(StepObjective& obj, const Eigen::VectorXd& cx, int budget,
                    Candidate& best, Eigen::VectorXd& best_c) {
    if (!obj.par.radial || obj.cfg.metric.tag != MetricTag::SobolevRadial) return;
    const int modes = obj.cfg.flow_modes;
    const Eigen::VectorXd w = sobolevWeights(modes);

    for (int round = 0; round < 3 && obj.evals + 2 <= budget; ++round) {
        if (!best.shape) return;
        const RadialDomain& d = std::get<RadialDomain>(*best.shape);
        const TriMesh mesh = flowMesh(d, obj.cfg);
        SolveOptions so;
        so.shift_hint = best.lambda;
        ++obj.evals;  // the gradient solve costs one evaluation
        const EigenResult res = solveEigen(mesh, obj.cfg.bc, so);
        const Eigen::VectorXd density = firstVariationDensity(d, obj.cfg.bc, mesh, res);

        const int b = mesh.boundaryCount();
        Eigen::VectorXd ratio(b);  // eta/speed at boundary nodes: radial move per normal move
        for (int i = 0; i < b; ++i) {
            const double theta = mesh.boundary_theta[i];
            const double e = d.eta(theta);
            const double ep = d.etaDeriv(theta, 1);
            ratio[i] = e / std::sqrt(e * e + ep * ep);
        }

        Eigen::VectorXd grad(2 * modes + 1);
        for (int j = 0; j <= 2 * modes; ++j) {
            double g = 0.0;
            for (int i = 0; i < b; ++i) {
                const double theta = mesh.boundary_theta[i];
                const double basis = j == 0            ? 1.0
                                     : (j <= modes)    ? std::cos(j * theta)
                                                       : std::sin((j - modes) * theta);
                g += density[i] * basis * ratio[i];
            }
            grad[j] = g + w[j] * (best_c[j] - cx[j]) / obj.h;
        }

        Eigen::VectorXd direction(2 * modes + 1);
        for (int j = 0; j <= 2 * modes; ++j) direction[j] = -grad[j] * obj.h / w[j];

        bool improved = false;
        for (double tau : {1.0, 0.5, 0.25, 0.125}) {
            if (obj.evals >= budget) break;
            const Eigen::VectorXd trial = best_c + tau * direction;
            const double before = best.phi;
            Candidate ct = obj.evaluate(trial);
            betterOf(best, best_c, ct, trial);
            if (best.phi < before) {
                improved = true;
                break;
            }
        }
        if (!improved) return;
    }
}

struct StepOutcome {
    Shape shape;
    double lambda = 0.0;
    double dist = 0.0;
    int evals = 0;
    bool stagnated = false;
};

StepOutcome eulerStepDetailed(const Shape& x, double lambda_x, const FlowConfig& cfg,
                              std::mt19937_64& rng) {
    const Parametrization par = Parametrization::of(x);
    const Eigen::VectorXd c0 = par.encode(x, cfg);

    StepObjective obj{x, cfg.h, cfg, par, lambda_x};
    Candidate best;
    Eigen::VectorXd best_c = c0;

    const int budget = std::max(cfg.max_inner_evals, 2 * static_cast<int>(c0.size()) + 4);
    const int search_budget =
        cfg.inner_solver == InnerSolver::GradientAssisted ? (budget * 3) / 5 : budget;
    nelderMead(obj, c0, search_budget, rng, best, best_c);
    if (cfg.inner_solver == InnerSolver::GradientAssisted)
        gradientPolish(obj, c0, budget, best, best_c);

    if (best.shape && best.phi <= lambda_x - kStagnationMargin)
        return {*best.shape, best.lambda, best.dist, obj.evals, false};
    return {x, lambda_x, 0.0, obj.evals, true};
}

double meshRelativeWidth(const Shape& s, const FlowConfig& cfg) {
    const RadialDomain d = radialView(s);
    const TriMesh mesh = flowMesh(d, cfg);
    return mesh.h_max / diameter(d);
}

}  // namespace

void validateConfig(const FlowConfig& cfg) {
    if (!(cfg.h > 0.0)) throw ConfigError("time step must be positive");
    if (!(cfg.T >= cfg.h)) throw ConfigError("horizon must cover at least one step");
    if (cfg.bc.isRobin() && !(cfg.bc.beta > 0.0))
        throw ConfigError("Robin flows require beta > 0: the step functional is unbounded "
                          "below for beta <= 0 and the implicit step has no minimizer");
    if (cfg.flow_modes < 1) throw ConfigError("flow needs at least one Fourier mode");
    if (cfg.max_inner_evals < 1) throw ConfigError("inner evaluation budget must be positive");
    if (!(cfg.inner_tol >= 0.0)) throw ConfigError("inner tolerance must be nonnegative");
    if (cfg.volume_constraint && !(*cfg.volume_constraint > 0.0))
        throw ConfigError("volume constraint must be positive");
}

const Shape& FlowTrajectory::at(double t) const {
    const int idx = static_cast<int>(std::floor(t / h + 1e-9));
    return shapes[std::clamp(idx, 0, static_cast<int>(shapes.size()) - 1)];
}

double phiValue(const Shape& y, const FlowConfig& cfg) {
    if (!isAdmissible(y, cfg.admissibility).admissible) return kInf;
    return lambdaOf(y, cfg, std::nullopt);
}

double phi(double h, const Shape& x, const Shape& y, const FlowConfig& cfg) {
    if (!(h > 0.0)) throw InvalidInput("step weight must be positive");
    if (x.index() != y.index()) throw InvalidInput("mixed shape kinds in a step functional");
    if (!isAdmissible(y, cfg.admissibility).admissible) return kInf;
    const double d = distance(x, y, cfg.metric);
    return lambdaOf(y, cfg, std::nullopt) + d * d / (2.0 * h);
}

Shape eulerStep(const Shape& x, const FlowConfig& cfg) {
    validateConfig(cfg);
    std::mt19937_64 rng(cfg.seed);
    const Parametrization par = Parametrization::of(x);
    std::optional<Shape> w0 = par.decode(par.encode(x, cfg), cfg);
    if (!w0 || !isAdmissible(*w0, cfg.admissibility).admissible)
        throw AdmissibilityLost("initial shape leaves the admissible class after projection");
    return eulerStepDetailed(*w0, phiValue(*w0, cfg), cfg, rng).shape;
}

FlowTrajectory runFlow(const Shape& u0, const FlowConfig& cfg) {
    validateConfig(cfg);
    std::mt19937_64 rng(cfg.seed);

    const Parametrization par = Parametrization::of(u0);
    std::optional<Shape> w0 = par.decode(par.encode(u0, cfg), cfg);
    if (!w0 || !isAdmissible(*w0, cfg.admissibility).admissible)
        throw AdmissibilityLost("initial shape leaves the admissible class after projection");

    FlowTrajectory traj;
    traj.h = cfg.h;
    traj.shapes.push_back(*w0);
    traj.phi_values.push_back(phiValue(*w0, cfg));

    const int n_steps = static_cast<int>(std::ceil(cfg.T / cfg.h - 1e-9));
    for (int i = 0; i < n_steps; ++i) {
        const auto tic = std::chrono::steady_clock::now();
        StepOutcome out = eulerStepDetailed(traj.shapes.back(), traj.phi_values.back(), cfg, rng);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - tic;

        traj.shapes.push_back(std::move(out.shape));
        traj.phi_values.push_back(out.lambda);
        traj.step_distances.push_back(out.dist);
        traj.inner_eval_counts.push_back(out.evals);
        traj.wall_times.push_back(elapsed.count());
        traj.stagnated.push_back(out.stagnated ? 1 : 0);
    }
    return traj;
}

GmmTable gmmDiagnostic(const Shape& u0, const FlowConfig& cfg, const std::vector<double>& h_list) {
    if (h_list.empty()) throw InvalidInput("empty step list");
    for (size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1])) throw InvalidInput("step list must be decreasing");

    std::vector<FlowTrajectory> trajs;
    trajs.reserve(h_list.size());
    for (double h : h_list) {
        FlowConfig c = cfg;
        c.h = h;
        trajs.push_back(runFlow(u0, c));
    }

    GmmTable table;
    table.h_values = h_list;
    const int nt = static_cast<int>(std::floor(cfg.T / h_list[0] + 1e-9));
    for (int k = 1; k <= nt; ++k) table.sample_times.push_back(k * h_list[0]);
    for (size_t i = 0; i < h_list.size(); ++i)
        for (size_t j = i + 1; j < h_list.size(); ++j)
            table.pairs.push_back({static_cast<int>(i), static_cast<int>(j)});

    table.cross_distance.resize(table.pairs.size(), table.sample_times.size());
    for (size_t p = 0; p < table.pairs.size(); ++p)
        for (size_t k = 0; k < table.sample_times.size(); ++k) {
            const double t = table.sample_times[k];
            table.cross_distance(p, k) =
                distance(trajs[table.pairs[p][0]].at(t), trajs[table.pairs[p][1]].at(t),
                         cfg.metric);
        }
    return table;
}

ContractionReport contractionCheck(const Shape& u0, const Shape& v0, const FlowConfig& cfg,
                                   double alpha) {
    const FlowTrajectory tu = runFlow(u0, cfg);
    const FlowTrajectory tv = runFlow(v0, cfg);

    ContractionReport report;
    report.initial_distance = distance(tu.shapes[0], tv.shapes[0], cfg.metric);
    const int n = std::min(tu.steps(), tv.steps());
    report.max_margin = -kInf;
    for (int i = 0; i <= n; ++i) {
        const double t = i * cfg.h;
        const double d = distance(tu.shapes[i], tv.shapes[i], cfg.metric);
        report.times.push_back(t);
        report.distances.push_back(d);
        report.max_margin =
            std::max(report.max_margin, d - std::exp(-alpha * t) * report.initial_distance);
    }
    const double h_rel = meshRelativeWidth(tu.shapes[0], cfg);
    report.tolerance = checkerSlack(cfg.h, h_rel) *
                       std::max(report.initial_distance, 0.01 * diameter(tu.shapes[0]));
    report.pass = report.max_margin <= report.tolerance;
    return report;
}

EviReport eviResidual(const FlowTrajectory& traj, const Shape& z, double alpha,
                      const FlowConfig& cfg) {
    EviReport report;
    report.phi_z = phiValue(z, cfg);
    double d_prev = distance(traj.shapes[0], z, cfg.metric);
    for (int i = 0; i < traj.steps(); ++i) {
        const double d_next = distance(traj.shapes[i + 1], z, cfg.metric);
        const double r = (d_next * d_next - d_prev * d_prev) / (2.0 * traj.h) +
                         0.5 * alpha * d_next * d_next + traj.phi_values[i + 1] - report.phi_z;
        report.residuals.push_back(r);
        d_prev = d_next;
    }
    report.max_positive = 0.0;
    for (double r : report.residuals) report.max_positive = std::max(report.max_positive, r);
    return report;
}

AprioriTable aprioriCheck(const Shape& u0, double t, const std::vector<int>& n_list,
                          const FlowConfig& cfg) {
    if (!(t > 0.0)) throw InvalidInput("comparison time must be positive");
    if (n_list.empty()) throw InvalidInput("empty step-count list");
    for (int n : n_list)
        if (n < 1) throw InvalidInput("step counts must be positive");

    const int ref_n = *std::max_element(n_list.begin(), n_list.end());
    const auto runAt = [&](int n) {
        FlowConfig c = cfg;
        c.h = t / n;
        c.T = t;
        return runFlow(u0, c);
    };
    const FlowTrajectory ref = runAt(ref_n);
    const Shape& ref_final = ref.shapes.back();
    const double h_rel = meshRelativeWidth(ref.shapes[0], cfg);

    AprioriTable table;
    table.reference_n = ref_n;
    for (int n : n_list) {
        if (n == ref_n) continue;
        const FlowTrajectory traj = runAt(n);
        AprioriRow row;
        row.n = n;
        const double d = distance(ref_final, traj.shapes.back(), cfg.metric);
        row.lhs_sq = d * d;
        // One-step relaxed value phi_h(u0) read off the first step of this run.
        const double h = t / n;
        const double relaxed =
            traj.phi_values[1] +
            traj.step_distances[0] * traj.step_distances[0] / (2.0 * h);
        row.rhs = h * (traj.phi_values[0] - relaxed);
        row.tolerance = checkerSlack(h, h_rel) * (1.0 + row.rhs);
        row.pass = row.lhs_sq <= row.rhs + row.tolerance;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace shapeflow
