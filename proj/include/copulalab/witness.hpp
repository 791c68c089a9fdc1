#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "copulalab/core.hpp"

namespace copulalab::witness {

// ============================================================================
// Linear independence
// ============================================================================

struct IndependenceReport {
    std::size_t family_size = 0;
    std::size_t sample_count = 0;
    std::size_t numerical_rank = 0;
    double pivot_floor = 0.0;  // smallest retained pivot magnitude
    bool independent = false;

    std::string to_json() const;
};

/// Evaluates each family member at seeded pseudo-random points, then runs
/// pivoted elimination on the value matrix. Pivots below tol * (largest
/// pivot) count as zero.
IndependenceReport independence_rank(const std::vector<DependenceFunction>& family,
                                     std::size_t samples, std::uint64_t seed,
                                     double tol = 1e-8);

// ============================================================================
// Support regions
// ============================================================================

/// Union of convex polygons in the unit square, given by vertex lists.
struct Polygon {
    std::vector<std::array<double, 2>> vertices;
};

struct RegionSpec {
    std::vector<Polygon> polygons;

    bool intersects_cell(double x0, double x1, double y0, double y1) const;
};

/// One polygon per line: "x1,y1 x2,y2 ...".
RegionSpec parse_regions(const std::string& text);

/// Max-metric eps-neighbourhood of a segment (the convex hull of the two
/// endpoint squares).
RegionSpec segment_tube(std::array<double, 2> a, std::array<double, 2> b, double eps);

/// The two quadrilateral bands that contain every c_theta support,
/// theta in [2/3, 3/4].
RegionSpec c_theta_support_band();

/// Tube around the two carrier segments of c_theta.
RegionSpec c_theta_carrier(double theta, double eps = 0.01);

/// Sum of cell volumes over grid cells whose closed cell misses the region.
double support_outside_mass(const DependenceFunction& f, const RegionSpec& region,
                            int resolution);

/// (mass f places on g's carrier tube, mass g places on f's carrier tube);
/// a near-zero pair certifies mutual singularity at this resolution.
std::pair<double, double> singularity_witness(const DependenceFunction& f,
                                              const DependenceFunction& g,
                                              const RegionSpec& carrier_f,
                                              const RegionSpec& carrier_g, int resolution);

// ============================================================================
// Class-stability sweeps
// ============================================================================

/// Draws seeded random convex weights, forms the pointwise mixture and runs
/// the class check; returns the worst trial. Trial t is seeded with
/// seed + t, so trials are independent of execution order.
CheckReport convex_sweep(const std::vector<DependenceFunction>& family,
                         const std::function<CheckReport(const DependenceFunction&)>& class_check,
                         int trials, std::uint64_t seed);

/// asymmetry((1-eps) f + eps Pi^2); strictly below 1/3 for eps > 0, which
/// certifies that the mixture leaves the maximal-asymmetry class.
double nowhere_dense_escape(const DependenceFunction& f, double eps, int resolution = 300);

struct LipschitzBoundaryReport {
    CheckReport at_p;
    CheckReport above_p;
    bool boundary_located = false;  // passes at p and fails at p + delta_p
};

/// Runs the pairwise p-Lipschitz check at p and at p + delta_p.
LipschitzBoundaryReport lipschitz_class_boundary(const DependenceFunction& f, double p,
                                                 double delta_p, int resolution,
                                                 double tol = 1e-9);

// ============================================================================
// Fractal dimension equation
// ============================================================================

/// Solves 4 r^s + (1-2r)^s = 1 for s in (1,2) by bisection, r in (0,1/2).
double hausdorff_dimension(double r);

/// Inverts the dimension map by an outer bisection on r; monotonicity of
/// r -> s is verified on a 100-point sweep first.
double r_for_dimension(double s);

}  // namespace copulalab::witness
