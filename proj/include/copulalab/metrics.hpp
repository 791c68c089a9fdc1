#pragma once

#include <string>
#include <vector>

#include "copulalab/core.hpp"

namespace copulalab::metrics {

/// Distance value together with the route that produced it.
struct MetricResult {
    std::string metric;
    double value = 0.0;
    std::string method;  // exact-kernel | finite-difference | density-quadrature | grid-sup
    int resolution = 0;
    std::string error_note;

    std::string to_json() const;
};

/// Conditional-distribution estimates K[i][j] ~ K(u_i, [0, v_j]) on the
/// closed lattice. Values are clamped to [0,1] and regularized to be
/// nondecreasing in j; the largest raw monotonicity violation is recorded.
struct KernelEstimate {
    int resolution = 0;
    std::string method;
    double raw_monotonicity_violation = 0.0;
    std::vector<double> values;  // (m+1)^2, u index major

    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution + 1) +
                      static_cast<std::size_t>(j)];
    }
};

/// Sup distance over lattice nodes. Since quasi-copulas are 1-Lipschitz per
/// coordinate, the off-lattice sup exceeds the lattice sup by at most n/m.
MetricResult d_inf(const DependenceFunction& f, const DependenceFunction& g, int resolution);

/// Samples the exact kernel when the function carries one; otherwise the
/// forward difference m*(f(u_i + 1/m, v_j) - f(u_i, v_j)) for i < m (the
/// last row copies its neighbour).
KernelEstimate estimate_kernel(const DependenceFunction& f, int resolution);

/// Midpoint-rule double integral of |K_f - K_g| on a common lattice
/// (n = 2). Finite-difference kernels are taken across each cell, which is
/// exactly the cell average of the kernel in the first coordinate.
MetricResult d1(const DependenceFunction& f, const DependenceFunction& g, int resolution);

/// Midpoint-rule L1 distance of the exact densities. Errors out when either
/// argument lacks one: the partition-supremum definition for singular
/// measures is out of scope here.
MetricResult total_variation(const DependenceFunction& f, const DependenceFunction& g,
                             int resolution = 2048);

/// max |f(u,v) - f(v,u)| over lattice nodes, tightened by a local 3x
/// refinement around the grid argmax.
MetricResult asymmetry(const DependenceFunction& f, int resolution);

}  // namespace copulalab::metrics
