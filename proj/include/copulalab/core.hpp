#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace copulalab {

// ============================================================================
// Domain types
// ============================================================================

enum class ClassTag { copula, quasi_copula, proper_quasi_copula, unverified };

std::string to_string(ClassTag tag);

/// Point of the closed unit cube [0,1]^n, n >= 2.
class UnitPoint {
public:
    explicit UnitPoint(std::vector<double> coords);
    UnitPoint(double u, double v) : UnitPoint(std::vector<double>{u, v}) {}
    UnitPoint(double u, double v, double w) : UnitPoint(std::vector<double>{u, v, w}) {}

    int dimension() const { return static_cast<int>(coords_.size()); }
    double operator[](int k) const { return coords_[static_cast<std::size_t>(k)]; }
    std::span<const double> coords() const { return coords_; }

private:
    std::vector<double> coords_;
};

/// Axis-aligned box [lower, upper] in the unit cube.
class NBox {
public:
    NBox(UnitPoint lower, UnitPoint upper);

    int dimension() const { return lower_.dimension(); }
    const UnitPoint& lower() const { return lower_; }
    const UnitPoint& upper() const { return upper_; }
    /// True when some edge has zero length.
    bool degenerate() const;

private:
    UnitPoint lower_;
    UnitPoint upper_;
};

/// Certification record attached to a function after an axiom check.
struct Certification {
    ClassTag tag = ClassTag::unverified;
    int resolution = 0;
    double tolerance = 0.0;
};

/// An evaluable map [0,1]^n -> [0,1] with a class tag. The universal currency
/// of the toolkit: every family factory returns one, every check and metric
/// consumes them.
///
/// The tag is advisory until an axiom check certifies it; certifications are
/// recorded with the grid resolution and tolerance used. 2-dimensional
/// functions may carry an exact conditional-distribution kernel
/// (u, v) -> K(u, [0, v]) and/or an exact density, used by the metrics that
/// need them.
class DependenceFunction {
public:
    using Evaluator = std::function<double(std::span<const double>)>;
    using Kernel2D = std::function<double(double, double)>;
    using Density2D = std::function<double(double, double)>;

    DependenceFunction(int dimension, Evaluator evaluator, ClassTag tag, std::string name);

    int dimension() const { return dimension_; }
    ClassTag class_tag() const { return tag_; }
    const std::string& name() const { return name_; }

    double operator()(std::span<const double> coords) const;
    double operator()(double u, double v) const;
    double operator()(const UnitPoint& p) const { return (*this)(p.coords()); }

    const std::optional<Kernel2D>& exact_kernel() const { return kernel_; }
    const std::optional<Density2D>& exact_density() const { return density_; }
    const std::optional<Certification>& certification() const { return certification_; }

    DependenceFunction&& with_kernel(Kernel2D k) &&;
    DependenceFunction&& with_density(Density2D d) &&;
    void set_kernel(Kernel2D k);
    void set_density(Density2D d);

    /// Records the outcome of an axiom check; upgrades the advisory tag.
    void certify(ClassTag tag, int resolution, double tolerance);

private:
    int dimension_;
    Evaluator evaluator_;
    ClassTag tag_;
    std::string name_;
    std::optional<Kernel2D> kernel_;
    std::optional<Density2D> density_;
    std::optional<Certification> certification_;
};

/// Values of a DependenceFunction on the closed lattice {0, 1/m, ..., 1}^n,
/// stored row-major with the first coordinate slowest. Substrate for the
/// metrics and the axiom sweeps.
class GridFunction {
public:
    GridFunction(int dimension, int resolution, std::vector<double> values);

    int dimension() const { return dimension_; }
    int resolution() const { return resolution_; }
    std::size_t node_count() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }

    double at(std::span<const int> index) const;
    double at(int i, int j) const;  // n = 2 shortcut

    std::size_t flat_index(std::span<const int> index) const;

private:
    int dimension_;
    int resolution_;
    std::vector<double> values_;
};

/// Midpoint-sampled density on the m x m cell grid (2-dimensional only).
class DensityGrid {
public:
    DensityGrid(int resolution, std::vector<double> cell_density,
                std::optional<DependenceFunction::Density2D> exact = std::nullopt,
                double tolerance = 1e-6);

    int resolution() const { return resolution_; }
    double at(int i, int j) const;
    const std::vector<double>& cells() const { return cells_; }
    const std::optional<DependenceFunction::Density2D>& exact_density() const { return exact_; }

private:
    int resolution_;
    std::vector<double> cells_;
    std::optional<DependenceFunction::Density2D> exact_;
};

/// Outcome of a grid-certified property check. Violations are reported, not
/// raised; passed <=> worst_violation <= tolerance.
struct CheckReport {
    bool passed = false;
    int resolution = 0;
    double tolerance = 0.0;
    double worst_violation = 0.0;
    std::variant<std::monostate, UnitPoint, NBox> witness;
    std::string checked_property;

    std::string to_json() const;
};

/// Reproducible 64-bit linear congruential generator; coordinates are drawn
/// from the high 53 bits so streams are identical across platforms.
struct Lcg64 {
    std::uint64_t state = 0;

    explicit Lcg64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state;
    }
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

// ============================================================================
// Operations
// ============================================================================

/// Pointwise evaluation with dimension validation.
double evaluate(const DependenceFunction& f, const UnitPoint& p);

/// Inclusion-exclusion signed vertex sum over the 2^n corners of the box.
/// Degenerate boxes return 0.
double box_volume(const DependenceFunction& f, const NBox& box);

/// Samples f at all lattice nodes of resolution m (values clamped to [0,1]
/// on ingest). Grid-based operations are capped at n <= 4.
GridFunction discretize(const DependenceFunction& f, int resolution);

/// Flat text dump: header line "n m", then (m+1)^n node values in row-major
/// order with 17 significant digits.
void write_grid(const GridFunction& grid, std::ostream& os);
void write_grid_file(const GridFunction& grid, const std::string& path);
GridFunction read_grid(std::istream& is);
GridFunction read_grid_file(const std::string& path);

/// Wraps a stored grid as a multilinear interpolant; exact at the nodes.
DependenceFunction grid_interpolant(GridFunction grid, ClassTag tag = ClassTag::unverified,
                                    std::string name = "grid");

/// Builds the cell-density grid from the exact density when available,
/// otherwise from second differences of the cumulative function.
DensityGrid make_density_grid(const DependenceFunction& f, int resolution,
                              double tolerance = 1e-6);

/// Verifies the grounded boundary, the uniform margins at lattice nodes, and
/// nonnegative volume on every unit grid cell. The worst violation is the
/// most negative cell volume or the largest boundary/margin residual; the
/// witness locates it.
CheckReport check_copula_axioms(const DependenceFunction& f, int resolution, double tol);

/// Verifies boundary/margin conditions, monotonicity along every lattice
/// line, and the 1-Lipschitz condition in the sum-of-coordinates distance on
/// adjacent lattice pairs (adjacent pairs suffice by the triangle
/// inequality).
CheckReport check_quasicopula_axioms(const DependenceFunction& f, int resolution, double tol);

/// Verifies |f(x)-f(y)| <= ||x-y||_p over lattice node pairs (n = 2 only).
/// Exhaustive sweep for m <= 128; above that a seeded sampled mode must be
/// requested via sample_pairs > 0. worst_violation is the signed excess
/// max |f(x)-f(y)| - ||x-y||_p; the witness box spans the violating pair.
CheckReport check_p_lipschitz(const DependenceFunction& f, double p, int resolution, double tol,
                              std::size_t sample_pairs = 0, std::uint64_t seed = 0x5eed);

}  // namespace copulalab
