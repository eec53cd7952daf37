#include "shapeflow/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "shapeflow/errors.hpp"
#include "shapeflow/fourier.hpp"

namespace shapeflow {

using nlohmann::json;

namespace {

json vectorToJson(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vectorFromJson(const json& arr, const char* what) {
    if (!arr.is_array()) throw InvalidInput(std::string(what) + ": expected an array");
    Eigen::VectorXd v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw InvalidInput(std::string(what) + ": non-numeric entry");
        v[static_cast<int>(i)] = arr[i].get<double>();
    }
    return v;
}

// Radial domains serialize their Fourier vector (the stored representation),
// so reading back reproduces both coefficients and synthesized samples bitwise.
// Convex bodies store support samples directly.
json shapeToJsonObj(const Shape& s) {
    json obj;
    if (const auto* d = std::get_if<RadialDomain>(&s)) {
        obj["kind"] = "radial";
        obj["n_samples"] = d->sampleCount();
        obj["fourier"] = vectorToJson(d->fourier);
    } else {
        const auto& k = std::get<ConvexBody>(s);
        obj["kind"] = "support";
        obj["n_samples"] = k.sampleCount();
        obj["samples"] = vectorToJson(k.support);
    }
    return obj;
}

Shape shapeFromJsonObj(const json& obj) {
    if (!obj.is_object()) throw InvalidInput("shape: expected a JSON object");
    if (!obj.contains("kind") || !obj["kind"].is_string())
        throw InvalidInput("shape: missing string field 'kind'");
    const std::string kind = obj["kind"].get<std::string>();
    if (kind == "radial") {
        if (!obj.contains("fourier")) throw InvalidInput("shape: missing field 'fourier'");
        const Eigen::VectorXd coeffs = vectorFromJson(obj["fourier"], "shape fourier");
        if (coeffs.size() % 2 == 0)
            throw InvalidInput("shape: fourier vector must have odd length");
        if (!obj.contains("n_samples") || !obj["n_samples"].is_number_integer())
            throw InvalidInput("shape: missing integer field 'n_samples'");
        const long n = obj["n_samples"].get<long>();
        if (n < 3) throw InvalidInput("shape: n_samples must be at least 3");
        return Shape{RadialDomain::fromFourier(coeffs, static_cast<int>(n))};
    }
    if (kind == "support") {
        if (!obj.contains("samples")) throw InvalidInput("shape: missing field 'samples'");
        const Eigen::VectorXd samples = vectorFromJson(obj["samples"], "shape samples");
        if (obj.contains("n_samples") &&
            obj["n_samples"].get<long>() != static_cast<long>(samples.size()))
            throw InvalidInput("shape: n_samples does not match the samples array");
        return Shape{ConvexBody::fromSupportSamples(samples)};
    }
    throw InvalidInput("shape: unknown kind '" + kind + "'");
}

json parseJsonText(const std::string& text, const char* what) {
    json obj = json::parse(text, nullptr, false);
    if (obj.is_discarded()) throw InvalidInput(std::string(what) + ": malformed JSON");
    return obj;
}

std::string trimmed(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<double> parseParamList(const std::string& text, const std::string& name) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (trimmed(item.substr(used)).size() > 0) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput("shape '" + name + "': bad numeric parameter '" + item + "'");
        }
    }
    return out;
}

}  // namespace

std::string shapeToJson(const Shape& s) { return shapeToJsonObj(s).dump(2) + "\n"; }

Shape shapeFromJson(const std::string& text) {
    return shapeFromJsonObj(parseJsonText(text, "shape"));
}

void writeShape(const std::string& path, const Shape& s) { writeTextFile(path, shapeToJson(s)); }

Shape readShape(const std::string& path) { return shapeFromJson(readTextFile(path)); }

std::string trajectoryToJson(const FlowTrajectory& traj) {
    json obj;
    obj["h"] = traj.h;
    json shapes = json::array();
    for (const Shape& s : traj.shapes) shapes.push_back(shapeToJsonObj(s));
    obj["shapes"] = std::move(shapes);
    obj["phi_values"] = traj.phi_values;
    obj["step_distances"] = traj.step_distances;
    obj["inner_eval_counts"] = traj.inner_eval_counts;
    obj["wall_times"] = traj.wall_times;
    json flags = json::array();
    for (std::uint8_t f : traj.stagnated) flags.push_back(static_cast<int>(f));
    obj["stagnated"] = std::move(flags);
    return obj.dump(2) + "\n";
}

FlowTrajectory trajectoryFromJson(const std::string& text) {
    const json obj = parseJsonText(text, "trajectory");
    if (!obj.is_object()) throw InvalidInput("trajectory: expected a JSON object");
    FlowTrajectory traj;
    try {
        traj.h = obj.at("h").get<double>();
        for (const json& s : obj.at("shapes")) traj.shapes.push_back(shapeFromJsonObj(s));
        traj.phi_values = obj.at("phi_values").get<std::vector<double>>();
        traj.step_distances = obj.at("step_distances").get<std::vector<double>>();
        if (obj.contains("inner_eval_counts"))
            traj.inner_eval_counts = obj["inner_eval_counts"].get<std::vector<int>>();
        if (obj.contains("wall_times"))
            traj.wall_times = obj["wall_times"].get<std::vector<double>>();
        if (obj.contains("stagnated"))
            for (const json& f : obj["stagnated"])
                traj.stagnated.push_back(static_cast<std::uint8_t>(f.get<int>()));
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("trajectory: ") + e.what());
    }
    if (traj.shapes.size() != traj.phi_values.size() ||
        traj.shapes.size() != traj.step_distances.size() + 1)
        throw InvalidInput("trajectory: inconsistent array lengths");
    return traj;
}

void writeTrajectory(const std::string& path, const FlowTrajectory& traj) {
    writeTextFile(path, trajectoryToJson(traj));
}

FlowTrajectory readTrajectory(const std::string& path) {
    return trajectoryFromJson(readTextFile(path));
}

void writeMeshOff(const std::string& path, const TriMesh& mesh) {
    std::string out = "OFF\n";
    out += std::to_string(mesh.vertexCount()) + " " + std::to_string(mesh.triangleCount()) + " 0\n";
    for (const auto& v : mesh.vertices)
        out += formatG12(v.x()) + " " + formatG12(v.y()) + " 0\n";
    for (const auto& t : mesh.triangles)
        out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
               std::to_string(t[2]) + "\n";
    writeTextFile(path, out);
}

std::string formatG12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::addRow(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
        throw InvalidInput("csv row width does not match the header");
    rows_.push_back(cells);
}

std::string CsvTable::str() const {
    std::string out;
    auto appendRow = [&out](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    appendRow(header_);
    for (const auto& row : rows_) appendRow(row);
    return out;
}

void CsvTable::write(const std::string& path) const { writeTextFile(path, str()); }

Shape catalogShape(const std::string& name) {
    if (name.find('/') != std::string::npos ||
        (name.size() > 5 && name.substr(name.size() - 5) == ".json"))
        return readShape(name);

    std::string base = name;
    std::vector<double> params;
    if (const size_t colon = name.find(':'); colon != std::string::npos) {
        base = name.substr(0, colon);
        params = parseParamList(name.substr(colon + 1), name);
    }
    auto wantParams = [&](size_t n) {
        if (!params.empty() && params.size() != n)
            throw InvalidInput("shape '" + name + "': expected " + std::to_string(n) +
                               " parameters");
        return !params.empty();
    };

    if (base == "disk") {
        const double r = wantParams(1) ? params[0] : 1.0;
        if (r <= 0.0) throw InvalidInput("disk radius must be positive");
        return Shape{RadialDomain::fromSamples(Eigen::VectorXd::Constant(kDefaultSamples, r))};
    }
    if (base == "ellipse") {
        const double a = wantParams(2) ? params[0] : 1.3;
        const double b = params.empty() ? 0.75 : params[1];
        if (a <= 0.0 || b <= 0.0) throw InvalidInput("ellipse semi-axes must be positive");
        Eigen::VectorXd rho(kDefaultSamples);
        for (int i = 0; i < kDefaultSamples; ++i) {
            const double th = thetaAt(i, kDefaultSamples);
            // support function of an axis-aligned ellipse
            rho[i] = std::sqrt(a * a * std::cos(th) * std::cos(th) +
                               b * b * std::sin(th) * std::sin(th));
        }
        return Shape{ConvexBody::fromSupportSamples(rho)};
    }
    if (base == "ellipse-radial") {
        // star-shaped view of the ellipse boundary, for the radial metrics
        const double a = wantParams(2) ? params[0] : 1.3;
        const double b = params.empty() ? 0.75 : params[1];
        if (a <= 0.0 || b <= 0.0) throw InvalidInput("ellipse semi-axes must be positive");
        Eigen::VectorXd rho(kDefaultSamples);
        for (int i = 0; i < kDefaultSamples; ++i) {
            const double th = thetaAt(i, kDefaultSamples);
            const double c = std::cos(th), s = std::sin(th);
            rho[i] = a * b / std::sqrt(b * b * c * c + a * a * s * s);
        }
        return Shape{RadialDomain::fromSamples(rho)};
    }
    if (base == "ball") {
        // convex-body disk, for the metrics that require support functions
        const double r = wantParams(1) ? params[0] : 1.0;
        if (r <= 0.0) throw InvalidInput("ball radius must be positive");
        return Shape{ConvexBody::fromSupportSamples(Eigen::VectorXd::Constant(kDefaultSamples, r))};
    }
    if (base == "square" || base == "square-rot45" || base == "rot-square") {
        const double half = wantParams(1) ? params[0] : 1.0;
        if (half <= 0.0) throw InvalidInput("square half-width must be positive");
        std::vector<Eigen::Vector2d> verts;
        if (base == "square")
            verts = {{half, half}, {-half, half}, {-half, -half}, {half, -half}};
        else {
            const double d = half * std::sqrt(2.0);
            verts = {{d, 0.0}, {0.0, d}, {-d, 0.0}, {0.0, -d}};
        }
        return Shape{polygonToSupport(verts)};
    }
    if (base == "perturbed-ball") {
        const int k = wantParams(2) ? static_cast<int>(params[0]) : 2;
        const double amp = params.empty() ? 0.3 : params[1];
        if (k < 1) throw InvalidInput("perturbed-ball mode must be >= 1");
        Eigen::VectorXd eta(kDefaultSamples);
        for (int i = 0; i < kDefaultSamples; ++i)
            eta[i] = 1.0 + amp * std::cos(k * thetaAt(i, kDefaultSamples));
        if (eta.minCoeff() <= 0.0) throw InvalidInput("perturbed-ball amplitude too large");
        return Shape{RadialDomain::fromSamples(eta)};
    }
    throw InvalidInput("unknown shape name '" + name + "'");
}

std::map<std::string, std::string> parseKeyValueText(const std::string& text,
                                                     const std::string& origin) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trimmed(t.substr(0, eq));
        const std::string value = trimmed(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> parseKeyValueFile(const std::string& path) {
    return parseKeyValueText(readTextFile(path), path);
}

std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeTextFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out << content;
    if (!out) throw InvalidInput("write failed: " + path);
}

}  // namespace shapeflow
