#include "eitfuse/forward.hpp"

#include <cmath>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "eitfuse/error.hpp"

namespace eitfuse {

namespace {

constexpr double kMmToM = 1e-3;

// Unknown layout: node potentials first, then U_1..U_15. U_16 is grounded
// during the solve and the common offset is removed afterwards.
constexpr int kFreeElectrodes = kElectrodeCount - 1;

}  // namespace

void ConductivityField::validate(const Mesh& mesh) const {
    if (values.size() != mesh.element_count()) {
        throw InputError("conductivity field has " + std::to_string(values.size()) +
                         " values for " + std::to_string(mesh.element_count()) + " elements");
    }
    for (std::size_t e = 0; e < values.size(); ++e) {
        if (!(values[e] > 0.0) || !std::isfinite(values[e])) {
            throw InputError("conductivity of element " + std::to_string(e) + " must be positive");
        }
    }
}

std::array<double, 2> element_gradient(const Mesh& mesh, std::size_t e,
                                       const std::vector<double>& u) {
    const auto& t = mesh.elements[e];
    const Point2& p0 = mesh.nodes[t[0]];
    const Point2& p1 = mesh.nodes[t[1]];
    const Point2& p2 = mesh.nodes[t[2]];
    const double x10 = (p1.x - p0.x) * kMmToM, y10 = (p1.y - p0.y) * kMmToM;
    const double x20 = (p2.x - p0.x) * kMmToM, y20 = (p2.y - p0.y) * kMmToM;
    const double det = x10 * y20 - x20 * y10;
    const double du1 = u[t[1]] - u[t[0]];
    const double du2 = u[t[2]] - u[t[0]];
    return {(du1 * y20 - du2 * y10) / det, (x10 * du2 - x20 * du1) / det};
}

double InjectionSolution::electrode_current(const Mesh& mesh, const SensorGeometry& geometry,
                                            int l) const {
    double length = 0.0;
    double integral = 0.0;
    for (const auto& edge : mesh.electrode_edges.at(l - 1)) {
        const double len = kMmToM * std::hypot(mesh.nodes[edge[1]].x - mesh.nodes[edge[0]].x,
                                               mesh.nodes[edge[1]].y - mesh.nodes[edge[0]].y);
        length += len;
        integral += 0.5 * len * (node_potentials[edge[0]] + node_potentials[edge[1]]);
    }
    return (length * electrode_potentials[l - 1] - integral) / geometry.contact_impedance;
}

double FullVoltageSet::voltage(int l, int g) const {
    const auto& U = injections.at(l - 1).electrode_potentials;
    return U[g - 1] - U[g % kElectrodeCount];
}

struct ForwardSolver::Impl {
    const Mesh* mesh = nullptr;
    SensorGeometry geometry;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor;
    int nodes = 0;
};

ForwardSolver::ForwardSolver(const Mesh& mesh, const SensorGeometry& geometry,
                             const ConductivityField& field)
    : impl_(std::make_unique<Impl>()) {
    geometry.validate();
    field.validate(mesh);
    if (mesh.electrode_edges.size() != static_cast<std::size_t>(kElectrodeCount)) {
        throw InputError("mesh must carry 16 electrode edge groups");
    }
    impl_->mesh = &mesh;
    impl_->geometry = geometry;
    const int n = static_cast<int>(mesh.node_count());
    impl_->nodes = n;
    const int size = n + kFreeElectrodes;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.element_count() * 9 + 64 * kElectrodeCount);

    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& t = mesh.elements[e];
        double bx[3], by[3];
        for (int k = 0; k < 3; ++k) {
            const Point2& pj = mesh.nodes[t[(k + 1) % 3]];
            const Point2& pk = mesh.nodes[t[(k + 2) % 3]];
            bx[k] = (pj.y - pk.y) * kMmToM;
            by[k] = (pk.x - pj.x) * kMmToM;
        }
        const double area = mesh.element_areas[e] * kMmToM * kMmToM;
        const double scale = field.values[e] / (4.0 * area);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                triplets.emplace_back(t[a], t[b], scale * (bx[a] * bx[b] + by[a] * by[b]));
    }

    const double inv_z = 1.0 / geometry.contact_impedance;
    for (int l = 0; l < kElectrodeCount; ++l) {
        double length = 0.0;
        for (const auto& edge : mesh.electrode_edges[l]) {
            const int a = edge[0], b = edge[1];
            const double len = kMmToM * std::hypot(mesh.nodes[b].x - mesh.nodes[a].x,
                                                   mesh.nodes[b].y - mesh.nodes[a].y);
            length += len;
            triplets.emplace_back(a, a, inv_z * len / 3.0);
            triplets.emplace_back(b, b, inv_z * len / 3.0);
            triplets.emplace_back(a, b, inv_z * len / 6.0);
            triplets.emplace_back(b, a, inv_z * len / 6.0);
            if (l < kFreeElectrodes) {
                const int col = n + l;
                triplets.emplace_back(a, col, -inv_z * len / 2.0);
                triplets.emplace_back(b, col, -inv_z * len / 2.0);
                triplets.emplace_back(col, a, -inv_z * len / 2.0);
                triplets.emplace_back(col, b, -inv_z * len / 2.0);
            }
        }
        if (l < kFreeElectrodes) triplets.emplace_back(n + l, n + l, inv_z * length);
    }

    Eigen::SparseMatrix<double> A(size, size);
    A.setFromTriplets(triplets.begin(), triplets.end());
    impl_->factor.compute(A);
    if (impl_->factor.info() != Eigen::Success) {
        throw SolverError("CEM system factorization failed (singular or indefinite system)");
    }
    const auto& d = impl_->factor.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0)) {
            throw SolverError("CEM system is singular: non-positive pivot at unknown " +
                              std::to_string(i));
        }
    }
}

ForwardSolver::~ForwardSolver() = default;
ForwardSolver::ForwardSolver(ForwardSolver&&) noexcept = default;
ForwardSolver& ForwardSolver::operator=(ForwardSolver&&) noexcept = default;

InjectionSolution ForwardSolver::solve(InjectionPair pair, double current) const {
    if (pair.source < 1 || pair.source > kElectrodeCount || pair.sink < 1 ||
        pair.sink > kElectrodeCount || pair.source == pair.sink) {
        throw InputError("invalid injection pair (" + std::to_string(pair.source) + ", " +
                         std::to_string(pair.sink) + ")");
    }
    if (current == 0.0 || !std::isfinite(current)) throw InputError("injected current must be non-zero");
    const int n = impl_->nodes;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + kFreeElectrodes);
    if (pair.source <= kFreeElectrodes) rhs[n + pair.source - 1] += current;
    if (pair.sink <= kFreeElectrodes) rhs[n + pair.sink - 1] -= current;
    Eigen::VectorXd x = impl_->factor.solve(rhs);
    if (impl_->factor.info() != Eigen::Success || !x.allFinite()) {
        throw SolverError("CEM solve failed for injection (" + std::to_string(pair.source) + ", " +
                          std::to_string(pair.sink) + ")");
    }

    InjectionSolution sol;
    sol.pair = pair;
    sol.current = current;
    double mean = 0.0;
    for (int l = 0; l < kFreeElectrodes; ++l) {
        sol.electrode_potentials[l] = x[n + l];
        mean += x[n + l];
    }
    sol.electrode_potentials[kFreeElectrodes] = 0.0;
    mean /= kElectrodeCount;
    for (auto& U : sol.electrode_potentials) U -= mean;
    sol.node_potentials.resize(n);
    for (int i = 0; i < n; ++i) sol.node_potentials[i] = x[i] - mean;
    return sol;
}

FullVoltageSet ForwardSolver::solve_all(double current) const {
    FullVoltageSet full;
    full.injections.reserve(kElectrodeCount);
    for (int l = 1; l <= kElectrodeCount; ++l) {
        full.injections.push_back(solve(InjectionPair::adjacent(l), current));
    }
    return full;
}

InjectionSolution solve_injection(const Mesh& mesh, const ConductivityField& field,
                                  const SensorGeometry& geometry, InjectionPair pair,
                                  double current) {
    return ForwardSolver(mesh, geometry, field).solve(pair, current);
}

FullVoltageSet full_forward(const Mesh& mesh, const ConductivityField& field,
                            const SensorGeometry& geometry, double current) {
    return ForwardSolver(mesh, geometry, field).solve_all(current);
}

}  // namespace eitfuse
