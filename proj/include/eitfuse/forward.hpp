#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "eitfuse/geometry.hpp"
#include "eitfuse/mesh.hpp"

namespace eitfuse {

/// Per-element conductivity in S/m.
struct ConductivityField {
    std::vector<double> values;

    static ConductivityField uniform(std::size_t element_count, double sigma) {
        return {std::vector<double>(element_count, sigma)};
    }
    void validate(const Mesh& mesh) const;
};

/// Current enters electrode `source` and leaves through `sink` (both 1-based).
struct InjectionPair {
    int source = 1;
    int sink = 2;

    /// Adjacent pair (l, l+1) with electrode 17 := 1.
    static InjectionPair adjacent(int l) { return {l, l % kElectrodeCount + 1}; }
};

struct InjectionSolution {
    InjectionPair pair;
    double current = 0.0;
    std::vector<double> node_potentials;                   // V
    std::array<double, kElectrodeCount> electrode_potentials{};  // V, sums to zero

    /// Net current leaving the body through electrode `l`, evaluated from the
    /// discrete contact law; +J on the source, -J on the sink.
    double electrode_current(const Mesh& mesh, const SensorGeometry& geometry, int l) const;
};

/// The 16 adjacent-protocol solves for one field. Entry l-1 holds injection (l, l+1).
struct FullVoltageSet {
    std::vector<InjectionSolution> injections;

    /// V^{l,g} = U^l_g - U^l_{g+1}, both indices 1-based.
    double voltage(int l, int g) const;
};

/// Factorizes the CEM system for one conductivity field; each solve reuses the
/// factorization. Not thread-safe for concurrent solves on one instance.
class ForwardSolver {
public:
    ForwardSolver(const Mesh& mesh, const SensorGeometry& geometry, const ConductivityField& field);
    ~ForwardSolver();
    ForwardSolver(ForwardSolver&&) noexcept;
    ForwardSolver& operator=(ForwardSolver&&) noexcept;

    InjectionSolution solve(InjectionPair pair, double current) const;
    FullVoltageSet solve_all(double current) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

InjectionSolution solve_injection(const Mesh& mesh, const ConductivityField& field,
                                  const SensorGeometry& geometry, InjectionPair pair,
                                  double current);

FullVoltageSet full_forward(const Mesh& mesh, const ConductivityField& field,
                            const SensorGeometry& geometry, double current);

/// Constant gradient of a P1 function on element `e`, in V/m.
std::array<double, 2> element_gradient(const Mesh& mesh, std::size_t e,
                                       const std::vector<double>& node_values);

}  // namespace eitfuse
