#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "eitfuse/geometry.hpp"

namespace eitfuse {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Conforming P1 triangulation of the sensing disk (coordinates in mm).
/// Immutable after construction.
struct Mesh {
    std::vector<Point2> nodes;
    std::vector<Triangle> elements;          // counter-clockwise
    std::vector<std::vector<Edge>> electrode_edges;  // one group per electrode
    std::vector<double> element_areas;       // mm^2

    std::size_t node_count() const { return nodes.size(); }
    std::size_t element_count() const { return elements.size(); }
    Point2 centroid(std::size_t e) const;
    double total_area() const;
    /// Sum of edge lengths of electrode `l` (1-based), mm.
    double electrode_length(int l) const;

    friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// Ring-structured triangulation whose node layout repeats in each of the 16
/// electrode sectors, so the mesh is invariant under 22.5 degree rotation.
Mesh build_mesh(const SensorGeometry& geometry, double target_edge_length_mm);

/// Debug listing: `node i x y`, `element k a b c`, `electrode l a b`,
/// 17 significant digits.
void export_mesh(const Mesh& mesh, std::ostream& out);
void export_mesh(const Mesh& mesh, const std::string& path);

}  // namespace eitfuse
