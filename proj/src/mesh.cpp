#include "eitfuse/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "eitfuse/error.hpp"

namespace eitfuse {

namespace {

constexpr double kMinElementArea = 1e-12;

// Node j of a ring with n nodes sits at parameter (2j + offset) / (2n) turns.
// Comparing parameters with integers keeps the zipper exactly periodic per sector.
struct Ring {
    int first = 0;   // index of node 0 in Mesh::nodes
    int count = 0;
    int offset = 0;  // 0 or 1 half-steps
};

// param(a, i) < param(b, j), exact. Indices may run past the ring length.
bool param_less(const Ring& a, std::int64_t i, const Ring& b, std::int64_t j) {
    const std::int64_t lhs = (2 * i + a.offset) * static_cast<std::int64_t>(b.count);
    const std::int64_t rhs = (2 * j + b.offset) * static_cast<std::int64_t>(a.count);
    return lhs < rhs;
}

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

}  // namespace

Point2 Mesh::centroid(std::size_t e) const {
    const auto& t = elements[e];
    return {(nodes[t[0]].x + nodes[t[1]].x + nodes[t[2]].x) / 3.0,
            (nodes[t[0]].y + nodes[t[1]].y + nodes[t[2]].y) / 3.0};
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (double a : element_areas) sum += a;
    return sum;
}

double Mesh::electrode_length(int l) const {
    double sum = 0.0;
    for (const auto& e : electrode_edges.at(l - 1)) {
        sum += std::hypot(nodes[e[1]].x - nodes[e[0]].x, nodes[e[1]].y - nodes[e[0]].y);
    }
    return sum;
}

Mesh build_mesh(const SensorGeometry& geometry, double h) {
    geometry.validate();
    const double radius = geometry.radius_mm;
    if (!(h > 0.0)) throw MeshError("target edge length must be positive");
    if (h > radius / 4.0) throw MeshError("target edge length must not exceed radius/4");

    const int sectors = geometry.electrode_count;
    const double two_pi = 2.0 * std::numbers::pi;
    const double sector = two_pi / sectors;
    const double electrode_arc = geometry.electrode_coverage * sector;
    const double gap_arc = sector - electrode_arc;
    const int per_electrode = std::max(1, static_cast<int>(std::ceil(electrode_arc * radius / h)));
    const int per_gap = std::max(1, static_cast<int>(std::ceil(gap_arc * radius / h)));
    const int per_sector = per_electrode + per_gap;
    // Node 0 of every ring sits at the leading edge of electrode 1.
    const double phase = geometry.electrode_center_angle(1) - 0.5 * electrode_arc;

    const int ring_count = std::max(2, static_cast<int>(std::ceil(radius / h)));

    Mesh mesh;
    std::vector<Ring> rings;
    mesh.nodes.push_back({0.0, 0.0});

    for (int k = 1; k < ring_count; ++k) {
        const double r = radius * k / ring_count;
        const int per = std::max(1, static_cast<int>(std::lround(two_pi * r / (sectors * h))));
        Ring ring{static_cast<int>(mesh.nodes.size()), per * sectors, (ring_count - k) % 2};
        for (int j = 0; j < ring.count; ++j) {
            const double t = (2.0 * j + ring.offset) / (2.0 * ring.count);
            const double a = phase + two_pi * t;
            mesh.nodes.push_back({r * std::cos(a), r * std::sin(a)});
        }
        rings.push_back(ring);
    }

    Ring boundary{static_cast<int>(mesh.nodes.size()), per_sector * sectors, 0};
    for (int s = 0; s < sectors; ++s) {
        for (int i = 0; i < per_sector; ++i) {
            const double a = i < per_electrode
                                 ? phase + s * sector + electrode_arc * i / per_electrode
                                 : phase + s * sector + electrode_arc +
                                       gap_arc * (i - per_electrode) / per_gap;
            mesh.nodes.push_back({radius * std::cos(a), radius * std::sin(a)});
        }
    }
    rings.push_back(boundary);

    auto add_triangle = [&](int a, int b, int c) {
        double area = signed_area(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
        if (area < 0.0) {
            std::swap(b, c);
            area = -area;
        }
        if (area < kMinElementArea) throw MeshError("degenerate triangle generated");
        mesh.elements.push_back({a, b, c});
        mesh.element_areas.push_back(area);
    };

    // Fan around the center node.
    {
        const Ring& inner = rings.front();
        for (int j = 0; j < inner.count; ++j) {
            add_triangle(0, inner.first + j, inner.first + (j + 1) % inner.count);
        }
    }
    // Zipper between consecutive rings.
    for (std::size_t k = 0; k + 1 < rings.size(); ++k) {
        const Ring& a = rings[k];
        const Ring& b = rings[k + 1];
        std::int64_t i = 0;
        std::int64_t j = 0;
        while (i < a.count || j < b.count) {
            const int ai = a.first + static_cast<int>(i % a.count);
            const int bj = b.first + static_cast<int>(j % b.count);
            const bool advance_outer =
                j < b.count && (i >= a.count || !param_less(a, i + 1, b, j + 1));
            if (advance_outer) {
                add_triangle(ai, bj, b.first + static_cast<int>((j + 1) % b.count));
                ++j;
            } else {
                add_triangle(ai, bj, a.first + static_cast<int>((i + 1) % a.count));
                ++i;
            }
        }
    }

    mesh.electrode_edges.resize(sectors);
    for (int s = 0; s < sectors; ++s) {
        for (int i = 0; i < per_electrode; ++i) {
            const int a = boundary.first + s * per_sector + i;
            const int b = boundary.first + (s * per_sector + i + 1) % boundary.count;
            mesh.electrode_edges[s].push_back({a, b});
        }
    }
    return mesh;
}

void export_mesh(const Mesh& mesh, std::ostream& out) {
    const auto old_flags = out.flags();
    const auto old_precision = out.precision();
    out.imbue(std::locale::classic());
    out << std::setprecision(17);
    out << "nodes " << mesh.nodes.size() << '\n';
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        out << "node " << i << ' ' << mesh.nodes[i].x << ' ' << mesh.nodes[i].y << '\n';
    }
    out << "elements " << mesh.elements.size() << '\n';
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& t = mesh.elements[e];
        out << "element " << e << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    for (std::size_t l = 0; l < mesh.electrode_edges.size(); ++l) {
        for (const auto& edge : mesh.electrode_edges[l]) {
            out << "electrode " << l + 1 << ' ' << edge[0] << ' ' << edge[1] << '\n';
        }
    }
    out.flags(old_flags);
    out.precision(old_precision);
}

void export_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    export_mesh(mesh, out);
    if (!out) throw Error("failed writing " + path);
}

}  // namespace eitfuse
