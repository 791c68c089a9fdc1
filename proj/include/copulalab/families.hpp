#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "copulalab/core.hpp"

namespace copulalab::families {

// ============================================================================
// Frechet bounds and the product copula
// ============================================================================

enum class FrechetKind { W, M, Pi };

/// W^n, M^n or Pi^n. M and Pi are copulas for every n; W is a copula only for
/// n = 2 and a proper quasi-copula above.
DependenceFunction frechet(FrechetKind kind, int n);

// ============================================================================
// Ordinal sums
// ============================================================================

struct OrdinalBlock {
    double lo = 0.0;
    double hi = 1.0;
    DependenceFunction component;
};

/// Pastes rescaled components into the diagonal interval blocks, min{u}
/// elsewhere. Components must share one dimension; intervals may share at
/// most one endpoint.
DependenceFunction ordinal_sum(std::vector<OrdinalBlock> blocks);

/// The antidiagonal analogue: component k rescaled onto
/// [a_k,b_k] x [1-b_k,1-a_k], W^2 elsewhere (n = 2).
DependenceFunction w_ordinal_sum(std::vector<OrdinalBlock> blocks);

/// Pointwise convex combination lambda*f + (1-lambda)*g.
DependenceFunction mix(double lambda, const DependenceFunction& f, const DependenceFunction& g);

/// Seeded-weight convex combination of a family.
DependenceFunction convex_mixture(std::vector<DependenceFunction> members,
                                  std::vector<double> weights);

// ============================================================================
// Asymmetric shuffles
// ============================================================================

/// Two-segment shuffle of Min supported on the band between the antidiagonal
/// offsets theta and 1-theta; theta in [2/3, 3/4]. Mass is uniform on the
/// segments (0,theta)->(1-theta,1) and (1-theta,0)->(1,theta).
DependenceFunction c_theta(double theta);

/// Maps a 2-copula to a maximally asymmetric one: mass 2/3 uniform on the
/// segment v = u - 1/3, u in [1/3,1], plus a 1/3-mass rescaled copy of the
/// argument in [0,1/3] x [2/3,1]. Satisfies Phi(C)(2/3,1/3) = 1/3 and
/// Phi(C)(1/3,2/3) = 0, and contracts sup distances by exactly 1/3.
DependenceFunction phi_max_asym(const DependenceFunction& base);

// ============================================================================
// Lipschitz-class families
// ============================================================================

/// min{u, v, max{(u+v-c)/(2-c), 0}} with c in [0,1].
DependenceFunction c_lip(double c);

/// min{u,v,(1-a)(u+v)} below the antidiagonal, min{u,v,a(u+v)+1-2a} above;
/// a in [1/2,1].
DependenceFunction d_lip(double a);

/// lambda*c_lip(c) + (1-lambda)*d_lip(a).
DependenceFunction c_lambda(double lambda, double c, double a);

/// Member of an almost disjoint family of infinite integer sets indexed by
/// alpha in [0,1]: K_alpha collects the binary-prefix encodings
/// encode("1" + prefix_k(alpha)). Distinct indices share only the prefixes
/// before their first differing digit, so intersections are finite.
class AlmostDisjointIndex {
public:
    explicit AlmostDisjointIndex(double alpha);

    double alpha() const { return alpha_; }
    bool contains(std::uint64_t n) const;
    std::vector<std::uint64_t> elements_up_to(std::uint64_t limit) const;

private:
    double alpha_;
    std::uint64_t digits_;  // first 62 binary digits, most significant first
};

/// Ordinal sum over the blocks [1/(n+1), 1/n], n = 1..depth, with component
/// c_lip(c) when n is in K_alpha and d_lip(a) otherwise. Truncation changes
/// values by at most 1/(depth+1) in sup norm.
DependenceFunction a_alpha(const AlmostDisjointIndex& index, double c, double a, int depth = 32);

// ============================================================================
// Mass-redistribution transformations and their fixed points
// ============================================================================

/// Nonnegative matrix summing to 1 with no zero row or column. Rows map to
/// horizontal strips bottom-to-top and columns to vertical strips left-to-
/// right, so the matrix reads as a picture of the unit square.
class TransformationMatrix {
public:
    explicit TransformationMatrix(std::vector<std::vector<double>> rows);

    int row_count() const { return static_cast<int>(entries_.size()); }
    int column_count() const { return static_cast<int>(entries_.front().size()); }
    double entry(int row, int column) const;  // row 0 = bottom strip

    /// Cumulative column sums p_0=0..p_q=1 (vertical strip edges).
    const std::vector<double>& column_edges() const { return column_edges_; }
    /// Cumulative row sums q_0=0..q_p=1 (horizontal strip edges).
    const std::vector<double>& row_edges() const { return row_edges_; }

private:
    std::vector<std::vector<double>> entries_;  // bottom-to-top
    std::vector<double> column_edges_;
    std::vector<double> row_edges_;
};

/// 3x3 matrix with the four corners r/2 and center 1-2r, r in (0,1/2).
TransformationMatrix corner_matrix(double r);
/// 3x3 matrix with corners split as {r-a, a} and center 1-2r, 0 < a < r.
TransformationMatrix corner_matrix(double r, double a);

/// Redistributes the mass of a 2-copula proportionally to the matrix
/// entries: block (i,j) holds mass t_ij as an affine copy of the argument.
DependenceFunction apply_transformation(const TransformationMatrix& t,
                                        const DependenceFunction& base);

struct InvariantCopulaResult {
    DependenceFunction copula;
    double residual = 0.0;  // sup |C - T(C)| on the probe lattice
    int iterations = 0;
    bool converged = false;
};

/// Fixed-point iteration from Pi^2. Exact evaluator composition up to depth
/// 12, then a memoized 1025^2 grid with bilinear interpolation carries
/// further applications; stops when the change on a 257^2 probe lattice
/// drops below tol.
InvariantCopulaResult invariant_copula(const TransformationMatrix& t, double tol = 1e-9,
                                       int max_iterations = 64);

// ============================================================================
// Interval shuffles (S-structures)
// ============================================================================

/// Per-coordinate systems of intervals with matched block lengths; the
/// scaffolding of interval shuffles. d = 2 here.
class SStructure {
public:
    struct Block {
        std::array<double, 2> first;   // [a,b] on the first coordinate
        std::array<double, 2> second;  // [a,b] on the second coordinate
    };

    explicit SStructure(std::vector<Block> blocks);
    const std::vector<Block>& blocks() const { return blocks_; }

private:
    std::vector<Block> blocks_;
};

/// Copula that redistributes, within each block, the mass of the argument
/// through the affine block maps; each block carries its side length in mass.
DependenceFunction s_copula(const SStructure& structure, const DependenceFunction& base);

/// Interleaved structure: first-coordinate interval n maps to the second-
/// coordinate slot that swaps the two base-N digits of n-1. The resulting
/// shuffles converge to Pi^2 in the sup metric as N grows.
SStructure interleaved_structure(int blocks_per_axis);
/// Diagonal structure: N^2 equal blocks along the main diagonal.
SStructure diagonal_structure(int blocks_per_axis);

DependenceFunction theta_shuffle(const DependenceFunction& base, int blocks_per_axis);
DependenceFunction psi_diagonal(const DependenceFunction& base, int blocks_per_axis);

// ============================================================================
// Proper quasi-copula constructions
// ============================================================================

/// Three-branch proper quasi-copula built around a 2-copula: the middle
/// square [1/3,2/3]^2 carries u+v-C(3u-1,3v-1)/3-2/3 and has volume exactly
/// -1/3 for every base.
DependenceFunction q_c_quasi(const DependenceFunction& base);

/// Q'(u_1,...,u_n) = Q(u_1,u_2) u_3...u_n for n >= 3; preserves sup
/// distances.
DependenceFunction lift_to_n(const DependenceFunction& q2, int n);

/// A diagonal candidate: delta(1) = 1, delta(t) <= t, increasing,
/// 2-Lipschitz.
struct Diagonal {
    std::function<double(double)> delta;
};

/// Grid check of the four diagonal axioms.
CheckReport validate_diagonal(const Diagonal& d, int probe_points = 1001, double tol = 1e-9);

/// K_delta(u,v) = min{u, v, (delta(u)+delta(v))/2}; a 2-copula whose
/// diagonal section equals delta.
DependenceFunction diagonal_copula(const Diagonal& d);

/// Samples the diagonal section t -> Q(t,t).
Diagonal diagonal_of(const DependenceFunction& q);

/// Splices a proper quasi-copula into the rectangle [0,t0] x [t0,1] of a
/// copula through volume-ratio rescalers, preserving the diagonal section.
/// Requires positive volume on the rectangle (delta(t0) != t0).
DependenceFunction omega_tilde(const DependenceFunction& base, double t0,
                               const DependenceFunction& q);

// ============================================================================
// Oscillating density family
// ============================================================================

/// uv + (1-cos 2 pi u)(1-cos 2 pi n v)/(8 pi^2 n), carrying its exact kernel
/// and density. The densities oscillate faster with n while staying >= 1/2.
DependenceFunction c_n_oscillating(int n);

}  // namespace copulalab::families
