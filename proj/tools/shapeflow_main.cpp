// Command-line front end: eigenvalue reports, gradient-flow runs, inequality
// checkers, and the aggregated verification suite. Exit codes: 0 = complete /
// property holds, 2 = a checked property failed, 1 = usage or runtime error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "shapeflow/errors.hpp"
#include "shapeflow/fem.hpp"
#include "shapeflow/flow.hpp"
#include "shapeflow/fourier.hpp"
#include "shapeflow/geometry.hpp"
#include "shapeflow/io.hpp"
#include "shapeflow/mesh.hpp"
#include "shapeflow/slack.hpp"
#include "shapeflow/variation.hpp"
#include "shapeflow/verify.hpp"

namespace {

using namespace shapeflow;

BoundaryCondition parseBc(const std::string& name, double beta) {
    if (name == "dirichlet") return BoundaryCondition::dirichlet();
    if (name == "robin") return BoundaryCondition::robin(beta);
    throw InvalidInput("unknown boundary condition '" + name + "' (dirichlet|robin)");
}

MetricKind parseMetric(const std::string& name, double container) {
    if (name == "l2") return MetricKind::lpSupport(2.0);
    if (name == "hausdorff") return MetricKind::hausdorff();
    if (name == "hausdorff-open") return MetricKind::hausdorffOpen(container);
    if (name == "char") return MetricKind::charFn();
    if (name == "sobolev") return MetricKind::sobolevRadial();
    throw InvalidInput("unknown metric '" + name +
                       "' (l2|hausdorff|hausdorff-open|char|sobolev)");
}

RadialDomain asRadialView(const Shape& s) {
    if (const auto* d = std::get_if<RadialDomain>(&s)) return *d;
    const auto& k = std::get<ConvexBody>(s);
    return supportToRadial(k, 96, k.sampleCount());
}

const RadialDomain& requireRadial(const Shape& s, const char* what) {
    if (const auto* d = std::get_if<RadialDomain>(&s)) return *d;
    throw InvalidInput(std::string(what) + " needs a star-shaped (radial) shape");
}

const ConvexBody& requireConvex(const Shape& s, const char* what) {
    if (const auto* k = std::get_if<ConvexBody>(&s)) return *k;
    throw InvalidInput(std::string(what) + " needs a convex-body shape");
}

std::string siblingCsv(const std::string& path) {
    if (path.size() > 5 && path.compare(path.size() - 5, 5, ".json") == 0)
        return path.substr(0, path.size() - 5) + ".csv";
    return path + ".csv";
}

std::optional<double> diskRadiusOf(const std::string& name) {
    if (name == "disk") return 1.0;
    if (name.rfind("disk:", 0) == 0) return std::stod(name.substr(5));
    return std::nullopt;
}

// Flow-style options shared by the flow/gmm/contraction/evi/apriori commands.
struct FlowCliOpts {
    std::string init = "disk";
    std::string bc = "dirichlet";
    double beta = 1.0;
    std::string metric = "sobolev";
    double container = 4.0;
    double h = 0.05;
    double T = 1.0;
    double volume = 0.0;  // 0 = unconstrained
    std::string solver = "nm";
    int budget = 220;
    int modes = 8;
    double mesh_factor = 0.04;
    double alpha = 0.0;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd, bool with_init, bool with_step) {
        if (with_init)
            cmd->add_option("--init", init, "start shape: catalog name or shape JSON path")
                ->required();
        cmd->add_option("--bc", bc, "boundary condition: dirichlet|robin")
            ->check(CLI::IsMember({"dirichlet", "robin"}));
        cmd->add_option("--beta", beta, "Robin parameter (with --bc robin)");
        cmd->add_option("--metric", metric, "l2|hausdorff|hausdorff-open|char|sobolev");
        cmd->add_option("--container", container, "container radius for hausdorff-open");
        if (with_step) cmd->add_option("--h", h, "time step");
        cmd->add_option("--T", T, "time horizon");
        cmd->add_option("--volume", volume, "fixed-area constraint (0 = none)");
        cmd->add_option("--solver", solver, "inner solver: nm|gradient")
            ->check(CLI::IsMember({"nm", "gradient"}));
        cmd->add_option("--budget", budget, "inner objective evaluations per step");
        cmd->add_option("--modes", modes, "Fourier order of the step parametrization");
        cmd->add_option("--mesh-factor", mesh_factor, "mesh target = factor * diameter");
        cmd->add_option("--alpha", alpha, "convexity modulus recorded for the checkers");
        cmd->add_option("--seed", seed, "inner-solver seed");
    }

    FlowConfig make() const {
        FlowConfig cfg;
        cfg.h = h;
        cfg.T = T;
        cfg.bc = parseBc(bc, beta);
        cfg.metric = parseMetric(metric, container);
        if (volume > 0.0) cfg.volume_constraint = volume;
        cfg.inner_solver =
            solver == "gradient" ? InnerSolver::GradientAssisted : InnerSolver::NelderMead;
        cfg.max_inner_evals = budget;
        cfg.flow_modes = modes;
        cfg.mesh_target_factor = mesh_factor;
        cfg.alpha = alpha;
        cfg.seed = seed;
        validateConfig(cfg);
        return cfg;
    }
};

double flowMeshWidth(const Shape& s, const FlowConfig& cfg) {
    const RadialDomain view = asRadialView(s);
    const TriMesh mesh = triangulate(view, cfg.mesh_target_factor * diameter(view));
    return mesh.h_max / diameter(view);
}

// ------------------------------------------------------------------- eigen
struct EigenOpts {
    std::vector<std::string> shapes;
    std::string bc = "dirichlet";
    double beta = 1.0;
    double target_h = 0.0;  // 0 -> 0.02 * diameter
    int refinements = 0;
    bool want_lambda2 = false;
    std::string out = "eigen.csv";
    std::string mesh_out;
};

int cmdEigen(const EigenOpts& o) {
    const BoundaryCondition bc = parseBc(o.bc, o.beta);
    const std::vector<std::string> shapes = o.shapes.empty()
                                                ? std::vector<std::string>{"disk"}
                                                : o.shapes;
    CsvTable table({"domain_id", "bc", "beta", "h_max", "lambda1", "lambda2", "residual"});
    std::optional<TriMesh> last_mesh;
    for (const std::string& name : shapes) {
        const RadialDomain d = asRadialView(catalogShape(name));
        const double target = o.target_h > 0.0 ? o.target_h : 0.02 * diameter(d);
        TriMesh mesh = triangulate(d, target);
        for (int i = 0; i < o.refinements; ++i) mesh = refine(mesh, d);
        SolveOptions so;
        so.want_lambda2 = o.want_lambda2;
        const EigenResult res = solveEigen(mesh, bc, so);
        table.addRow({name, o.bc, formatG12(bc.isRobin() ? bc.beta : 0.0),
                      formatG12(res.h_max), formatG12(res.lambda1),
                      res.lambda2 ? formatG12(*res.lambda2) : std::string(),
                      formatG12(res.residual)});
        std::cout << name << ": lambda1 = " << formatG12(res.lambda1);
        if (res.lambda2) std::cout << ", lambda2 = " << formatG12(*res.lambda2);
        if (const auto r = diskRadiusOf(name)) {
            const double exact = diskOracle(*r, bc);
            std::cout << " (disk reference " << formatG12(exact) << ", rel err "
                      << formatG12(std::abs(res.lambda1 - exact) / std::abs(exact)) << ")";
        }
        std::cout << "\n";
        last_mesh = std::move(mesh);
    }
    table.write(o.out);
    if (!o.mesh_out.empty() && last_mesh) writeMeshOff(o.mesh_out, *last_mesh);
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- flow run
int cmdFlowRun(const FlowCliOpts& o, const std::string& out) {
    const Shape u0 = catalogShape(o.init);
    const FlowConfig cfg = o.make();
    const FlowTrajectory traj = runFlow(u0, cfg);
    writeTrajectory(out, traj);

    CsvTable table({"t", "lambda", "step_distance", "inner_evals", "wall_seconds",
                    "stagnated"});
    for (int i = 0; i < traj.steps(); ++i)
        table.addRow({formatG12(i * traj.h), formatG12(traj.phi_values[i]),
                      formatG12(traj.step_distances[i]),
                      std::to_string(traj.inner_eval_counts[i]),
                      formatG12(traj.wall_times[i]),
                      std::to_string(static_cast<int>(traj.stagnated[i]))});
    table.addRow({formatG12(traj.steps() * traj.h),
                  formatG12(traj.phi_values.back()), "", "", "", ""});
    const std::string csv = siblingCsv(out);
    table.write(csv);

    double path = 0.0;
    for (const double d : traj.step_distances) path += d;
    std::cout << "flow: " << traj.steps() << " steps, lambda "
              << formatG12(traj.phi_values.front()) << " -> "
              << formatG12(traj.phi_values.back()) << ", path length "
              << formatG12(path) << "\nwrote " << out << " and " << csv << "\n";
    return 0;
}

// --------------------------------------------------------------------- gmm
int cmdGmm(const FlowCliOpts& o, const std::vector<double>& h_list,
           const std::string& out) {
    FlowCliOpts adjusted = o;
    if (!h_list.empty()) adjusted.h = h_list.front();
    const FlowConfig cfg = adjusted.make();
    const GmmTable table = gmmDiagnostic(catalogShape(o.init), cfg, h_list);

    CsvTable csv({"h_coarse", "h_fine", "t", "distance"});
    for (std::size_t p = 0; p < table.pairs.size(); ++p)
        for (std::size_t s = 0; s < table.sample_times.size(); ++s)
            csv.addRow({formatG12(table.h_values[table.pairs[p][0]]),
                        formatG12(table.h_values[table.pairs[p][1]]),
                        formatG12(table.sample_times[s]),
                        formatG12(table.cross_distance(static_cast<int>(p),
                                                       static_cast<int>(s)))});
    csv.write(out);
    std::cout << "gmm: " << table.pairs.size() << " step-size pairs at "
              << table.sample_times.size() << " times, max cross-distance "
              << formatG12(table.cross_distance.maxCoeff()) << "\nwrote " << out << "\n";
    return 0;
}

// ------------------------------------------------------------- contraction
int cmdContraction(const FlowCliOpts& o, const std::string& u0_name,
                   const std::string& v0_name, double alpha, const std::string& out) {
    const FlowConfig cfg = o.make();
    const ContractionReport rep =
        contractionCheck(catalogShape(u0_name), catalogShape(v0_name), cfg, alpha);

    CsvTable csv({"t", "distance", "bound"});
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        csv.addRow({formatG12(rep.times[i]), formatG12(rep.distances[i]),
                    formatG12(std::exp(-alpha * rep.times[i]) * rep.initial_distance)});
    csv.write(out);
    std::cout << "contraction: d0 " << formatG12(rep.initial_distance) << ", max excess "
              << formatG12(rep.max_margin) << " vs tolerance "
              << formatG12(rep.tolerance) << " -> " << (rep.pass ? "PASS" : "FAIL")
              << "\nwrote " << out << "\n";
    return rep.pass ? 0 : 2;
}

// --------------------------------------------------------------------- evi
int cmdEvi(const FlowCliOpts& o, const std::vector<std::string>& z_names,
           double alpha, const std::string& out) {
    const Shape u0 = catalogShape(o.init);
    const FlowConfig cfg = o.make();
    const FlowTrajectory traj = runFlow(u0, cfg);
    const double h_rel = flowMeshWidth(u0, cfg);
    const std::vector<std::string> names =
        z_names.empty() ? std::vector<std::string>{"disk"} : z_names;

    CsvTable csv({"z_id", "step", "t", "residual"});
    bool pass = true;
    double worst = 0.0, bound = 0.0;
    for (const std::string& zn : names) {
        const EviReport rep = eviResidual(traj, catalogShape(zn), alpha, cfg);
        const double scale =
            std::max({1.0, std::abs(rep.phi_z), std::abs(traj.phi_values.front())});
        bound = std::max(bound, checkerSlack(cfg.h, h_rel) * scale);
        worst = std::max(worst, rep.max_positive);
        pass = pass && rep.max_positive <= checkerSlack(cfg.h, h_rel) * scale;
        for (std::size_t i = 0; i < rep.residuals.size(); ++i)
            csv.addRow({zn, std::to_string(i), formatG12((i + 1) * cfg.h),
                        formatG12(rep.residuals[i])});
    }
    csv.write(out);
    std::cout << "evi: max positive residual " << formatG12(worst) << " vs budget "
              << formatG12(bound) << " over " << names.size() << " test shapes -> "
              << (pass ? "PASS" : "FAIL") << "\nwrote " << out << "\n";
    return pass ? 0 : 2;
}

// ----------------------------------------------------------------- apriori
int cmdApriori(const FlowCliOpts& o, double t, const std::vector<int>& n_list,
               const std::string& out) {
    const FlowConfig cfg = o.make();
    const AprioriTable table = aprioriCheck(catalogShape(o.init), t, n_list, cfg);

    CsvTable csv({"n", "lhs_sq", "rhs", "tolerance", "pass"});
    bool pass = true;
    for (const auto& row : table.rows) {
        pass = pass && row.pass;
        csv.addRow({std::to_string(row.n), formatG12(row.lhs_sq), formatG12(row.rhs),
                    formatG12(row.tolerance), std::to_string(row.pass ? 1 : 0)});
    }
    csv.write(out);
    std::cout << "apriori: reference n=" << table.reference_n << ", " << table.rows.size()
              << " rows -> " << (pass ? "PASS" : "FAIL") << "\nwrote " << out << "\n";
    return pass ? 0 : 2;
}

// --------------------------------------------------------------------- bmi
int cmdBmi(const std::string& k0_name, const std::string& k1_name,
           const std::string& bc_name, double beta, int points, int refinements,
           const std::string& out) {
    if (points < 3) throw InvalidInput("bmi needs at least 3 grid points");
    const Shape s0 = catalogShape(k0_name), s1 = catalogShape(k1_name);
    const ConvexBody& k0 = requireConvex(s0, "bmi");
    const ConvexBody& k1 = requireConvex(s1, "bmi");
    VariationOptions opts;
    opts.refinements = refinements;
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(points, 0.0, 1.0);
    const BmiReport rep = brunnMinkowskiCheck(k0, k1, t, parseBc(bc_name, beta), opts);

    CsvTable csv({"t", "lambda", "strong_margin", "weak_margin"});
    for (int i = 0; i < t.size(); ++i)
        csv.addRow({formatG12(rep.t_grid[i]), formatG12(rep.lambda[i]),
                    formatG12(rep.strong_margin[i]), formatG12(rep.weak_margin[i])});
    csv.write(out);
    std::cout << "bmi: slack " << formatG12(rep.slack) << ", worst strong margin "
              << formatG12(rep.strong_margin.minCoeff())
              << (rep.probe_only ? " (probe only)" : "") << " -> "
              << (rep.pass ? "PASS" : "FAIL") << "\nwrote " << out << "\n";
    return rep.pass ? 0 : 2;
}

// ------------------------------------------------------------------- alpha
int cmdAlpha(const std::string& d0_name, const std::string& d1_name, double beta,
             int points, int fine_points, const std::string& out) {
    if (points < 3 || fine_points < 3) throw InvalidInput("alpha needs >= 3 grid points");
    const Shape s0 = catalogShape(d0_name), s1 = catalogShape(d1_name);
    const RadialDomain& d0 = requireRadial(s0, "alpha");
    const RadialDomain& d1 = requireRadial(s1, "alpha");
    const BoundaryCondition bc = BoundaryCondition::robin(beta);
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(points, 0.0, 1.0);
    const ConvexityReport rep = alphaConvexityCheck(d0, d1, bc, t);
    const Eigen::VectorXd tf = Eigen::VectorXd::LinSpaced(fine_points, 0.0, 1.0);
    const double fine_margin = chordWorstMargin(d0, d1, bc, tf, rep.alpha_estimate);

    CsvTable csv({"t", "lambda", "second_difference"});
    for (int i = 0; i < t.size(); ++i)
        csv.addRow({formatG12(rep.t_grid[i]), formatG12(rep.values[i]),
                    (i >= 1 && i + 1 < t.size())
                        ? formatG12(rep.second_differences[i - 1])
                        : std::string()});
    csv.write(out);
    std::cout << "alpha: estimate " << formatG12(rep.alpha_estimate) << ", path d^2 "
              << formatG12(rep.distance_sq) << ", fine-grid margin "
              << formatG12(fine_margin) << " -> " << (rep.chord_ok ? "PASS" : "FAIL")
              << "\nwrote " << out << "\n";
    return rep.chord_ok ? 0 : 2;
}

// --------------------------------------------------------------- variation
int cmdVariation(const std::string& shape_name, const std::string& bc_name, double beta,
                 const std::vector<int>& modes_in, const std::string& out) {
    const Shape s = catalogShape(shape_name);
    const RadialDomain& d = requireRadial(s, "variation");
    const BoundaryCondition bc = parseBc(bc_name, beta);
    const std::vector<int> modes = modes_in.empty() ? std::vector<int>{0, 2, 3} : modes_in;
    const int n = static_cast<int>(d.samples.size());

    // Symmetric fields can have a vanishing derivative; judging those relatively
    // would compare noise against noise, so the denominator is floored at 1% of
    // the eigenvalue (the scale a generic unit field moves lambda at).
    const TriMesh scale_mesh = triangulate(d, 0.025 * diameter(d));
    const double lambda_scale = solveEigen(scale_mesh, bc).lambda1;
    const double floor = std::max(1e-2 * std::abs(lambda_scale), 1e-6);

    CsvTable csv({"field_mode", "formula", "finite_difference", "rel_mismatch"});
    double worst = 0.0;
    for (const int k : modes) {
        if (k < 0) throw InvalidInput("field mode must be >= 0");
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) g[i] = k == 0 ? 1.0 : std::cos(k * thetaAt(i, n));
        const PerturbationField v = PerturbationField::fromNormal(g);
        const double formula = firstVariation(d, bc, v);
        const double fd = finiteDiffVariation(d, bc, v, defaultFdStep(d), 1);
        const double rel = std::abs(formula - fd) / std::max(std::abs(fd), floor);
        worst = std::max(worst, rel);
        csv.addRow({std::to_string(k), formatG12(formula), formatG12(fd), formatG12(rel)});
    }
    csv.write(out);
    const bool pass = worst <= 1e-3;
    std::cout << "variation: worst formula/fd mismatch " << formatG12(worst) << " over "
              << modes.size() << " fields -> " << (pass ? "PASS" : "FAIL") << "\nwrote "
              << out << "\n";
    return pass ? 0 : 2;
}

// ------------------------------------------------------------ negbeta-demo
int cmdNegBeta(int levels, double amp, double beta, double target_h,
               const std::string& out) {
    if (levels < 1 || levels > 6) throw InvalidInput("levels must be in 1..6");
    if (beta >= 0.0) throw InvalidInput("this demo needs beta < 0");
    if (amp <= 0.0 || amp >= 0.5) throw InvalidInput("amplitude must be in (0, 0.5)");
    const BoundaryCondition bc = BoundaryCondition::robin(beta);
    const int n = 512, modes = 96;
    const double pi = kTwoPi / 2.0;

    CsvTable csv({"level", "frequency", "perimeter", "lambda"});
    std::vector<double> lams;
    int freq = 1;
    for (int lvl = 0; lvl <= levels; ++lvl, freq *= 2) {
        Eigen::VectorXd eta(n);
        for (int i = 0; i < n; ++i) {
            const double th = thetaAt(i, n);
            eta[i] = lvl == 0 ? 1.0
                              : 1.0 + amp * (2.0 / pi) * std::asin(std::sin(freq * th));
        }
        const RadialDomain d = RadialDomain::fromSamples(eta, modes);
        const double lam = solveEigen(triangulate(d, target_h), bc).lambda1;
        lams.push_back(lam);
        csv.addRow({std::to_string(lvl), std::to_string(lvl == 0 ? 0 : freq),
                    formatG12(perimeter(d)), formatG12(lam)});
    }
    csv.write(out);

    bool decreasing = true;
    for (std::size_t i = 1; i < lams.size(); ++i)
        decreasing = decreasing && lams[i] < lams[i - 1];

    std::string rejection = "flow engine did NOT reject beta < 0";
    try {
        FlowConfig cfg;
        cfg.bc = bc;
        validateConfig(cfg);
    } catch (const ConfigError& e) {
        rejection = std::string("flow engine rejects beta < 0: ") + e.what();
    }
    std::cout << "negbeta-demo: lambda " << formatG12(lams.front()) << " -> "
              << formatG12(lams.back()) << " over " << levels
              << " refinement levels (strictly decreasing: " << (decreasing ? "yes" : "no")
              << ")\n" << rejection << "\nwrote " << out << "\n";
    return decreasing && rejection.rfind("flow engine rejects", 0) == 0 ? 0 : 2;
}

// ------------------------------------------------------------------ verify
int cmdVerify(const std::string& level_name, const std::string& out) {
    const VerifyLevel level = level_name == "full" ? VerifyLevel::Full : VerifyLevel::Quick;
    const VerifyReport report = verifySuite(level, &std::cout);
    writeTextFile(out, verifyVerdictJson(report));
    int passed = 0;
    for (const auto& c : report.criteria) passed += c.pass ? 1 : 0;
    std::cout << "verify (" << verifyLevelName(level) << "): " << passed << "/"
              << report.criteria.size() << " criteria passed in "
              << formatG12(report.total_seconds) << "s\nwrote " << out << "\n";
    return report.allPass() ? 0 : 2;
}

// Flat key=value config: inject pairs as long flags unless the user already
// passed that flag explicitly, so the command line always wins.
std::vector<std::string> effectiveArgs(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string cfg_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
    }
    if (cfg_path.empty()) return args;
    const auto pairs = parseKeyValueFile(cfg_path);
    const auto user_has = [&args](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& [key, value] : pairs) {
        if (key == "config" || user_has(key)) continue;
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D shape gradient-flow engine for the first Laplace eigenvalue:\n"
                 "eigen reports, implicit-Euler flows in shape metrics, and\n"
                 "inequality checkers with pinned error budgets."};
    app.require_subcommand(1);
    // The step-size option is spelled --h, so help must not claim the short -h.
    app.set_help_flag("--help", "print this help and exit");
    const auto sub = [](CLI::App* parent, const std::string& name, const std::string& desc) {
        CLI::App* c = parent->add_subcommand(name, desc);
        c->set_help_flag("--help", "print this help and exit");
        return c;
    };
    std::string config_sink;  // read during pre-scan; registered so parsing accepts it

    int rc = 0;

    // eigen
    EigenOpts eig;
    auto* eigen_cmd = sub(&app, "eigen", "first eigenvalue report (CSV)");
    eigen_cmd->add_option("--shape", eig.shapes, "catalog name or shape JSON path (repeatable)");
    eigen_cmd->add_option("--bc", eig.bc)->check(CLI::IsMember({"dirichlet", "robin"}));
    eigen_cmd->add_option("--beta", eig.beta, "Robin parameter");
    eigen_cmd->add_option("--target-h", eig.target_h, "mesh size (0 = 0.02 * diameter)");
    eigen_cmd->add_option("--refine", eig.refinements, "uniform refinement passes");
    eigen_cmd->add_flag("--lambda2", eig.want_lambda2, "also report the second eigenvalue");
    eigen_cmd->add_option("--out", eig.out, "CSV output path");
    eigen_cmd->add_option("--mesh-out", eig.mesh_out, "OFF dump of the last mesh");
    eigen_cmd->add_option("--config", config_sink, "key=value defaults file");
    eigen_cmd->callback([&] { rc = cmdEigen(eig); });

    // flow run
    auto* flow_cmd = sub(&app, "flow", "implicit-Euler shape flow");
    flow_cmd->require_subcommand(1);
    FlowCliOpts flow_opts;
    std::string flow_out = "trajectory.json";
    auto* flow_run = sub(flow_cmd, "run", "run a flow and dump trajectory + CSV");
    flow_opts.attach(flow_run, /*with_init=*/true, /*with_step=*/true);
    flow_run->add_option("--out", flow_out, "trajectory JSON path (CSV written alongside)");
    flow_run->add_option("--config", config_sink, "key=value defaults file");
    flow_run->callback([&] { rc = cmdFlowRun(flow_opts, flow_out); });

    // gmm
    FlowCliOpts gmm_opts;
    std::vector<double> gmm_h;
    std::string gmm_out = "gmm.csv";
    auto* gmm_cmd = sub(&app, "gmm", "cross-distance table over decreasing step sizes");
    gmm_opts.attach(gmm_cmd, /*with_init=*/true, /*with_step=*/false);
    gmm_cmd->add_option("--h", gmm_h, "step sizes, strictly decreasing (repeatable)")
        ->required()->expected(2, 16);
    gmm_cmd->add_option("--out", gmm_out, "CSV output path");
    gmm_cmd->add_option("--config", config_sink, "key=value defaults file");
    gmm_cmd->callback([&] { rc = cmdGmm(gmm_opts, gmm_h, gmm_out); });

    // contraction
    FlowCliOpts con_opts;
    std::string con_u0, con_v0, con_out = "contraction.csv";
    double con_alpha = 0.0;
    auto* con_cmd = sub(&app, "contraction", "two-flow distance vs exp(-alpha t) bound");
    con_opts.attach(con_cmd, /*with_init=*/false, /*with_step=*/true);
    con_cmd->add_option("--u0", con_u0, "first start shape")->required();
    con_cmd->add_option("--v0", con_v0, "second start shape")->required();
    con_cmd->add_option("--check-alpha", con_alpha, "contraction rate to check against");
    con_cmd->add_option("--out", con_out, "CSV output path");
    con_cmd->add_option("--config", config_sink, "key=value defaults file");
    con_cmd->callback([&] { rc = cmdContraction(con_opts, con_u0, con_v0, con_alpha, con_out); });

    // evi
    FlowCliOpts evi_opts;
    std::vector<std::string> evi_z;
    std::string evi_out = "evi.csv";
    double evi_alpha = 0.0;
    auto* evi_cmd = sub(&app, "evi", "discrete evolution-variational-inequality residuals");
    evi_opts.attach(evi_cmd, /*with_init=*/true, /*with_step=*/true);
    evi_cmd->add_option("--z", evi_z, "test shapes (repeatable, default disk)");
    evi_cmd->add_option("--check-alpha", evi_alpha, "convexity modulus in the residual");
    evi_cmd->add_option("--out", evi_out, "CSV output path");
    evi_cmd->add_option("--config", config_sink, "key=value defaults file");
    evi_cmd->callback([&] { rc = cmdEvi(evi_opts, evi_z, evi_alpha, evi_out); });

    // apriori
    FlowCliOpts ap_opts;
    std::vector<int> ap_n;
    double ap_t = 0.32;
    std::string ap_out = "apriori.csv";
    auto* ap_cmd = sub(&app, "apriori", "coarse-vs-fine iterate distance bound");
    ap_opts.attach(ap_cmd, /*with_init=*/true, /*with_step=*/false);
    ap_cmd->add_option("--t", ap_t, "comparison time");
    ap_cmd->add_option("--n", ap_n, "step counts; the largest is the reference (repeatable)")
        ->required()->expected(2, 16);
    ap_cmd->add_option("--out", ap_out, "CSV output path");
    ap_cmd->add_option("--config", config_sink, "key=value defaults file");
    ap_cmd->callback([&] { rc = cmdApriori(ap_opts, ap_t, ap_n, ap_out); });

    // bmi
    std::string bmi_k0, bmi_k1, bmi_bc = "dirichlet", bmi_out = "bmi.csv";
    double bmi_beta = 1.0;
    int bmi_points = 11, bmi_refine = 1;
    auto* bmi_cmd = sub(&app, "bmi", "eigenvalue concavity along Minkowski paths");
    bmi_cmd->add_option("--k0", bmi_k0, "first convex shape")->required();
    bmi_cmd->add_option("--k1", bmi_k1, "second convex shape")->required();
    bmi_cmd->add_option("--bc", bmi_bc)->check(CLI::IsMember({"dirichlet", "robin"}));
    bmi_cmd->add_option("--beta", bmi_beta, "Robin parameter");
    bmi_cmd->add_option("--points", bmi_points, "grid points on [0,1]");
    bmi_cmd->add_option("--refine", bmi_refine, "mesh refinement passes");
    bmi_cmd->add_option("--out", bmi_out, "CSV output path");
    bmi_cmd->add_option("--config", config_sink, "key=value defaults file");
    bmi_cmd->callback([&] {
        rc = cmdBmi(bmi_k0, bmi_k1, bmi_bc, bmi_beta, bmi_points, bmi_refine, bmi_out);
    });

    // alpha
    std::string al_d0, al_d1, al_out = "alpha.csv";
    double al_beta = 1.0;
    int al_points = 11, al_fine = 21;
    auto* al_cmd = sub(&app, "alpha", "quadratic convexity defect along radial paths");
    al_cmd->add_option("--d0", al_d0, "first star-shaped shape")->required();
    al_cmd->add_option("--d1", al_d1, "second star-shaped shape")->required();
    al_cmd->add_option("--beta", al_beta, "Robin parameter (> 0)");
    al_cmd->add_option("--points", al_points, "estimation grid points");
    al_cmd->add_option("--fine-points", al_fine, "verification grid points");
    al_cmd->add_option("--out", al_out, "CSV output path");
    al_cmd->add_option("--config", config_sink, "key=value defaults file");
    al_cmd->callback([&] { rc = cmdAlpha(al_d0, al_d1, al_beta, al_points, al_fine, al_out); });

    // variation
    std::string var_shape = "perturbed-ball:3,0.15", var_bc = "robin",
                var_out = "variation.csv";
    double var_beta = 1.0;
    std::vector<int> var_modes;
    auto* var_cmd = sub(&app, "variation", "first-variation formula vs finite differences");
    var_cmd->add_option("--shape", var_shape, "star-shaped shape");
    var_cmd->add_option("--bc", var_bc)->check(CLI::IsMember({"dirichlet", "robin"}));
    var_cmd->add_option("--beta", var_beta, "Robin parameter");
    var_cmd->add_option("--field-mode", var_modes, "cos(k theta) field modes, 0 = dilation (repeatable)");
    var_cmd->add_option("--out", var_out, "CSV output path");
    var_cmd->add_option("--config", config_sink, "key=value defaults file");
    var_cmd->callback([&] { rc = cmdVariation(var_shape, var_bc, var_beta, var_modes, var_out); });

    // negbeta-demo
    int nb_levels = 4;
    double nb_amp = 0.12, nb_beta = -1.0, nb_target = 0.045;
    std::string nb_out = "negbeta.csv";
    auto* nb_cmd = sub(&app, "negbeta-demo",
                          "negative Robin parameter: eigenvalue collapse under boundary zigzags");
    nb_cmd->add_option("--levels", nb_levels, "zigzag frequency-doubling levels");
    nb_cmd->add_option("--amp", nb_amp, "zigzag sup-amplitude");
    nb_cmd->add_option("--beta", nb_beta, "Robin parameter (< 0)");
    nb_cmd->add_option("--target-h", nb_target, "mesh size");
    nb_cmd->add_option("--out", nb_out, "CSV output path");
    nb_cmd->add_option("--config", config_sink, "key=value defaults file");
    nb_cmd->callback([&] { rc = cmdNegBeta(nb_levels, nb_amp, nb_beta, nb_target, nb_out); });

    // verify
    std::string ver_level = "quick", ver_out = "verify_verdict.json";
    auto* ver_cmd = sub(&app, "verify", "run the whole verification battery");
    ver_cmd->add_option("--level", ver_level, "quick|full")
        ->check(CLI::IsMember({"quick", "full"}));
    ver_cmd->add_option("--out", ver_out, "verdict JSON path");
    ver_cmd->add_option("--config", config_sink, "key=value defaults file");
    ver_cmd->callback([&] { rc = cmdVerify(ver_level, ver_out); });

    try {
        std::vector<std::string> args = effectiveArgs(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
