#pragma once

#include <map>
#include <string>
#include <vector>

#include "shapeflow/flow.hpp"
#include "shapeflow/geometry.hpp"
#include "shapeflow/mesh.hpp"

namespace shapeflow {

// Shape JSON schema:
//   radial:  {"kind": "radial",  "n_samples": N, "fourier": [...]}
//   support: {"kind": "support", "n_samples": N, "samples": [...]}
// Radial domains store their Fourier vector (the primary representation), so
// values round-trip bitwise; support samples round-trip bitwise directly.
std::string shapeToJson(const Shape& s);
Shape shapeFromJson(const std::string& text);
void writeShape(const std::string& path, const Shape& s);
Shape readShape(const std::string& path);

// Trajectory JSON: step size, shapes, eigenvalues, step distances, solver stats.
std::string trajectoryToJson(const FlowTrajectory& traj);
FlowTrajectory trajectoryFromJson(const std::string& text);
void writeTrajectory(const std::string& path, const FlowTrajectory& traj);
FlowTrajectory readTrajectory(const std::string& path);

// ASCII OFF dump of a triangulation (z = 0).
void writeMeshOff(const std::string& path, const TriMesh& mesh);

// Fixed %.12g rendering: identical doubles give identical bytes.
std::string formatG12(double v);

// Byte-deterministic CSV table: header row then formatG12 cells (strings verbatim).
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);
    void addRow(const std::vector<std::string>& cells);
    std::string str() const;
    void write(const std::string& path) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Named shape catalog: "disk[:r]" and "perturbed-ball[:k,amp]" and
// "ellipse-radial[:a,b]" are radial domains; "ball[:r]", "ellipse[:a,b]",
// "square[:half]", "square-rot45" (alias "rot-square") are convex bodies.
// Falls back to reading the name as a shape JSON path when it contains a '/'
// or ends in ".json".
Shape catalogShape(const std::string& name);

// Flat key=value config: '#' comments and blank lines skipped; errors carry
// the offending line number.
std::map<std::string, std::string> parseKeyValueText(const std::string& text,
                                                     const std::string& origin);
std::map<std::string, std::string> parseKeyValueFile(const std::string& path);

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& content);

}  // namespace shapeflow
